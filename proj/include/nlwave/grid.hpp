#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace nlwave {

using cplx = std::complex<double>;

// Periodic grid on [0,L)^n, n in {1,2,3}, points_per_axis a power of two
// >= 8. Modes are indexed flat row-major (last axis fastest, FFTW order);
// wavenumbers follow the standard FFT ordering xi = 2 pi m_signed / L.
// Transforms are unitary (both directions scaled by points^(-n/2)).
// Immutable; FFTW plans are cached per channel count behind a mutex and
// executed through the thread-safe new-array interface.
class Grid {
 public:
  Grid(int dim, int points_per_axis, double length);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const { return dim_; }
  int points_per_axis() const { return points_; }
  double length() const { return length_; }
  std::size_t modes() const { return modes_; }
  double cell_volume() const { return cell_volume_; }

  // Signed mode integer m in [-P/2, P/2) for the given axis of a flat index.
  int mode_index(std::size_t flat, int axis) const;
  double xi_component(std::size_t flat, int axis) const;
  double xi_squared(std::size_t flat) const;
  // Physical coordinates of grid node with the same flat index.
  std::array<double, 3> coords(std::size_t flat) const;
  // 2/3-rule mask: true if the mode is kept (|m_signed| <= P/3 per axis).
  bool dealias_keep(std::size_t flat) const;

  // In-place transforms of modes x channels (channel-minor) data.
  void forward_inplace(std::vector<cplx>& data, int channels) const;
  void inverse_inplace(std::vector<cplx>& data, int channels) const;

 private:
  struct Plans;
  Plans& plans_for(int channels) const;

  int dim_;
  int points_;
  double length_;
  std::size_t modes_;
  double cell_volume_;
  std::vector<double> axis_freq_;  // per axis index -> 2 pi m_signed / L

  mutable std::mutex plan_mutex_;
  mutable std::map<int, std::unique_ptr<Plans>> plans_;
};

enum class Space { Physical, Frequency };

// E-valued function on the grid, stored as modes x channels (channel-minor).
struct Field {
  std::shared_ptr<const Grid> grid;
  int channels = 1;
  Space space = Space::Physical;
  std::vector<cplx> data;

  cplx& at(std::size_t mode, int ch) {
    return data[mode * std::size_t(channels) + std::size_t(ch)];
  }
  const cplx& at(std::size_t mode, int ch) const {
    return data[mode * std::size_t(channels) + std::size_t(ch)];
  }
};

Field zero_field(std::shared_ptr<const Grid> grid, int channels, Space space);

// Pure unitary transforms; the argument's tag must match the direction.
Field forward(const Field& physical);
Field inverse(const Field& frequency);

// max |data| over the outermost grid layer divided by max |data| overall
// (0 if the field is identically 0). Physical-space box-fit diagnostic.
double boundary_leak_ratio(const Field& physical);

}  // namespace nlwave
