#include "sem/randomness.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sem {

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon_(horizon), steps_(steps), dt_(0.0) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("time grid horizon T must be positive and finite");
  if (steps == 0) throw std::invalid_argument("time grid needs at least one step");
  dt_ = horizon / static_cast<double>(steps);
}

TimeGrid make_grid(double horizon, std::size_t steps) {
  return TimeGrid(horizon, steps);
}

Seed derive_path_seed(Seed seed, std::uint64_t path_index) noexcept {
  return Seed{mix64(seed.master + kGoldenGamma * (path_index + 1))};
}

double SplitMixStream::next_open_unit() noexcept {
  constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
  return (static_cast<double>(next() >> 11) + 0.5) * kTwoPow53Inv;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile needs p in (0, 1)");

  static constexpr std::array<double, 6> a{
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step: relative error drops from ~1e-9 to near machine precision.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

BrownianIncrements::BrownianIncrements(TimeGrid grid, std::vector<double> values,
                                       Seed seed, std::uint64_t path_index)
    : grid_(grid), values_(std::move(values)), seed_(seed), path_index_(path_index) {
  if (values_.size() != grid_.steps())
    throw std::invalid_argument("increment count " + std::to_string(values_.size()) +
                                " does not match grid steps " +
                                std::to_string(grid_.steps()));
}

std::vector<double> BrownianIncrements::prefix_sums() const {
  std::vector<double> out(values_.size() + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    acc += values_[i];
    out[i + 1] = acc;
  }
  return out;
}

BrownianIncrements sample_brownian(Seed seed, const TimeGrid& grid,
                                   std::uint64_t path_index) {
  SplitMixStream stream(seed);
  const double scale = std::sqrt(grid.dt());
  std::vector<double> values(grid.steps());
  for (auto& v : values) {
    const double z = normal_quantile(stream.next_open_unit());
    v = std::round(z * scale / kIncrementQuantum) * kIncrementQuantum;
  }
  return BrownianIncrements(grid, std::move(values), seed, path_index);
}

BrownianIncrements coarsen(const BrownianIncrements& increments, std::size_t factor) {
  const auto& grid = increments.grid();
  if (factor == 0 || grid.steps() % factor != 0)
    throw std::invalid_argument("coarsening factor " + std::to_string(factor) +
                                " does not divide " + std::to_string(grid.steps()));
  if (factor == 1) return increments;

  const auto fine = increments.values();
  const std::size_t n = grid.steps() / factor;
  std::vector<double> values(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t l = j * factor; l < (j + 1) * factor; ++l) acc += fine[l];
    values[j] = acc;
  }
  return BrownianIncrements(TimeGrid(grid.horizon(), n), std::move(values),
                            increments.seed(), increments.path_index());
}

}  // namespace sem
