#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "nlwave/expressions.hpp"
#include "nlwave/picard.hpp"
#include "nlwave/problem.hpp"
#include "nlwave/suites.hpp"

namespace nlwave {

// One fully validated scenario file. Parsing is strict: unknown keys are
// ConfigErrors naming the offending path, and every structural constraint
// is checked before any compute starts.
struct Scenario {
  std::string name;

  int grid_dim = 1;
  int grid_points = 64;
  double grid_length = 2.0 * 3.141592653589793;

  std::shared_ptr<const OperatorFamily> family;

  std::size_t time_steps = 256;
  double horizon = 1.0;

  TimeMeasure alpha = TimeMeasure::zero(1.0);
  TimeMeasure beta = TimeMeasure::zero(1.0);

  FieldExpression phi, psi;
  ForcingExpression forcing;
  Nonlinearity nonlinearity;

  EstimateParams norms;

  // Solver knobs.
  bool dealias = true;
  double det_margin_fraction = 0.0;
  bool check_box_fit = false;
  Exec exec = Exec::Parallel;
  PicardOptions picard;

  int oracle_fine = 16;
  std::size_t oracle_max_modes = 64;

  struct Tolerances {
    double oracle_rel = 1e-6;
    double pde_residual = 1e-6;
    double condition_residual = 1e-8;
  } tolerances;

  std::uint64_t seed = 0;
  double extend_extra = 0.0;

  // Materializes the grid, data fields, and forcing timeline.
  NonlocalProblem build_problem() const;
};

Scenario load_scenario(const std::string& path);

}  // namespace nlwave
