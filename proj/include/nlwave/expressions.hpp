#pragma once

#include <array>
#include <memory>
#include <vector>

#include "nlwave/grid.hpp"

namespace nlwave {

// Closed-form spatial building blocks for scenario data on the periodic box:
//   gaussian:  amp_c * exp(-|x - center|^2 / (2 width^2))
//   planewave: amp_c * exp(i k.x), k = (2 pi / L) * wavevector
//   constant:  amp_c
struct SpatialTerm {
  enum class Kind { Gaussian, PlaneWave, Constant };
  Kind kind = Kind::Constant;
  std::vector<cplx> amplitude;        // one entry per channel
  std::array<double, 3> center{};     // gaussian only
  double width = 1.0;                 // gaussian only, > 0
  std::array<int, 3> wavevector{};    // planewave only (integer per axis)
};

// Separable time factor for forcing terms.
struct TimeEnvelope {
  enum class Kind { One, Cosine, Sine, Exponential };
  Kind kind = Kind::One;
  double rate = 0.0;  // cos(rate t), sin(rate t), exp(rate t)
};

struct FieldExpression {
  std::vector<SpatialTerm> terms;
};

struct ForcingTerm {
  SpatialTerm spatial;
  TimeEnvelope envelope;
};

struct ForcingExpression {
  std::vector<ForcingTerm> terms;
  bool empty() const { return terms.empty(); }
};

double envelope_value(const TimeEnvelope& env, double t);

// Evaluates the expression pointwise on the grid (physical space), then
// transforms if frequency space is requested.
Field evaluate_expression(const FieldExpression& expr,
                          std::shared_ptr<const Grid> grid, int channels,
                          Space out_space);

// Physical-space forcing snapshots at the given times.
std::vector<Field> sample_forcing(const ForcingExpression& expr,
                                  std::shared_ptr<const Grid> grid,
                                  int channels,
                                  const std::vector<double>& times);

}  // namespace nlwave
