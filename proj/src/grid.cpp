#include "nlwave/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <string>

#include "nlwave/errors.hpp"

namespace nlwave {

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// FFTW's planner is not thread-safe; plan creation/destruction is global.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Grid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Grid::Grid(int dim, int points_per_axis, double length)
    : dim_(dim), points_(points_per_axis), length_(length) {
  if (dim_ < 1 || dim_ > 3)
    throw ConfigError("grid dimension must be 1, 2, or 3");
  if (!power_of_two(points_) || points_ < 8)
    throw ConfigError("points per axis must be a power of two >= 8");
  if (!(length_ > 0.0) || !std::isfinite(length_))
    throw ConfigError("grid length must be positive and finite");
  modes_ = 1;
  for (int d = 0; d < dim_; ++d) modes_ *= std::size_t(points_);
  const double h = length_ / double(points_);
  cell_volume_ = 1.0;
  for (int d = 0; d < dim_; ++d) cell_volume_ *= h;
  axis_freq_.resize(points_);
  const double base = 2.0 * M_PI / length_;
  for (int m = 0; m < points_; ++m) {
    const int ms = (2 * m < points_) ? m : m - points_;
    axis_freq_[m] = base * double(ms);
  }
}

Grid::~Grid() = default;

int Grid::mode_index(std::size_t flat, int axis) const {
  // Row-major, last axis fastest.
  std::size_t rest = flat;
  int idx = 0;
  for (int d = dim_ - 1; d >= 0; --d) {
    const int component = int(rest % std::size_t(points_));
    if (d == axis) idx = component;
    rest /= std::size_t(points_);
  }
  return (2 * idx < points_) ? idx : idx - points_;
}

double Grid::xi_component(std::size_t flat, int axis) const {
  std::size_t rest = flat;
  double freq = 0.0;
  for (int d = dim_ - 1; d >= 0; --d) {
    const int component = int(rest % std::size_t(points_));
    if (d == axis) freq = axis_freq_[component];
    rest /= std::size_t(points_);
  }
  return freq;
}

double Grid::xi_squared(std::size_t flat) const {
  std::size_t rest = flat;
  double acc = 0.0;
  for (int d = dim_ - 1; d >= 0; --d) {
    const double f = axis_freq_[rest % std::size_t(points_)];
    acc += f * f;
    rest /= std::size_t(points_);
  }
  return acc;
}

std::array<double, 3> Grid::coords(std::size_t flat) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const double h = length_ / double(points_);
  std::size_t rest = flat;
  for (int d = dim_ - 1; d >= 0; --d) {
    x[d] = h * double(rest % std::size_t(points_));
    rest /= std::size_t(points_);
  }
  return x;
}

bool Grid::dealias_keep(std::size_t flat) const {
  const int cutoff = points_ / 3;
  std::size_t rest = flat;
  for (int d = dim_ - 1; d >= 0; --d) {
    const int m = int(rest % std::size_t(points_));
    const int ms = (2 * m < points_) ? m : m - points_;
    if (std::abs(ms) > cutoff) return false;
    rest /= std::size_t(points_);
  }
  return true;
}

Grid::Plans& Grid::plans_for(int channels) const {
  std::lock_guard<std::mutex> lock(plan_mutex_);
  auto it = plans_.find(channels);
  if (it != plans_.end()) return *it->second;

  auto plans = std::make_unique<Plans>();
  std::vector<cplx> buffer(modes_ * std::size_t(channels));
  int n[3] = {points_, points_, points_};
  auto* raw = reinterpret_cast<fftw_complex*>(buffer.data());
  {
    std::lock_guard<std::mutex> global(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->fwd = fftw_plan_many_dft(dim_, n, channels, raw, nullptr, channels,
                                    1, raw, nullptr, channels, 1,
                                    FFTW_FORWARD, flags);
    plans->bwd = fftw_plan_many_dft(dim_, n, channels, raw, nullptr, channels,
                                    1, raw, nullptr, channels, 1,
                                    FFTW_BACKWARD, flags);
  }
  if (!plans->fwd || !plans->bwd) throw SolveError("fftw plan creation failed");
  auto [pos, inserted] = plans_.emplace(channels, std::move(plans));
  (void)inserted;
  return *pos->second;
}

void Grid::forward_inplace(std::vector<cplx>& data, int channels) const {
  if (data.size() != modes_ * std::size_t(channels))
    throw SolveError("transform size mismatch");
  Plans& plans = plans_for(channels);
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.fwd, raw, raw);
  const double scale = std::pow(double(points_), -0.5 * double(dim_));
  for (cplx& v : data) v *= scale;
}

void Grid::inverse_inplace(std::vector<cplx>& data, int channels) const {
  if (data.size() != modes_ * std::size_t(channels))
    throw SolveError("transform size mismatch");
  Plans& plans = plans_for(channels);
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.bwd, raw, raw);
  const double scale = std::pow(double(points_), -0.5 * double(dim_));
  for (cplx& v : data) v *= scale;
}

Field zero_field(std::shared_ptr<const Grid> grid, int channels, Space space) {
  Field f;
  f.channels = channels;
  f.space = space;
  f.data.assign(grid->modes() * std::size_t(channels), cplx(0.0));
  f.grid = std::move(grid);
  return f;
}

Field forward(const Field& physical) {
  if (physical.space != Space::Physical)
    throw SolveError("forward transform expects a physical-space field");
  Field out = physical;
  out.grid->forward_inplace(out.data, out.channels);
  out.space = Space::Frequency;
  return out;
}

Field inverse(const Field& frequency) {
  if (frequency.space != Space::Frequency)
    throw SolveError("inverse transform expects a frequency-space field");
  Field out = frequency;
  out.grid->inverse_inplace(out.data, out.channels);
  out.space = Space::Physical;
  return out;
}

double boundary_leak_ratio(const Field& physical) {
  if (physical.space != Space::Physical)
    throw SolveError("leak ratio expects a physical-space field");
  const Grid& g = *physical.grid;
  double global_max = 0.0;
  double boundary_max = 0.0;
  for (std::size_t m = 0; m < g.modes(); ++m) {
    double mag = 0.0;
    for (int c = 0; c < physical.channels; ++c)
      mag = std::max(mag, std::abs(physical.at(m, c)));
    global_max = std::max(global_max, mag);
    bool on_boundary = false;
    std::size_t rest = m;
    for (int d = g.dim() - 1; d >= 0; --d) {
      const int idx = int(rest % std::size_t(g.points_per_axis()));
      if (idx == 0 || idx == g.points_per_axis() - 1) on_boundary = true;
      rest /= std::size_t(g.points_per_axis());
    }
    if (on_boundary) boundary_max = std::max(boundary_max, mag);
  }
  if (global_max == 0.0) return 0.0;
  return boundary_max / global_max;
}

}  // namespace nlwave
