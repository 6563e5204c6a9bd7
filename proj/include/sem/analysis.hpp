#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sem/engine.hpp"

namespace sem {

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n), 0 when n = 1
  std::size_t n_samples = 0;
};

struct HolderEstimate {
  double exponent = 0.0;
  double regression_r2 = 0.0;
  std::vector<std::size_t> lags;
  double moment_order_q = 2.0;
};

struct AcfSeries {
  std::vector<double> values;  // values[l] for lag l = 0..max_lag
  std::size_t series_length = 0;
};

struct ConvergenceReport {
  std::vector<double> dt_levels;  // coarsest first
  std::vector<double> sup_mse;
  /// Empty when some level matches the reference exactly (constant h = 1/2).
  std::optional<double> fitted_slope;
  double theoretical_rate_bound = 0.0;  // 2 h_star
  std::size_t n_paths = 0;
  std::size_t reference_steps = 0;
  bool degenerate_exact() const noexcept { return !fitted_slope.has_value(); }
};

/// Raised when an estimator meets a path with no variation.
class DegenerateSeries : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample mean of |X_k|^p over the ensemble.
MonteCarloEstimate estimate_moment(const Ensemble& ensemble, double p, std::size_t node);
MonteCarloEstimate estimate_moment(std::span<const SamplePath> paths, double p,
                                   std::size_t node);

/// Structure-function estimate: S(m) = mean_k |X_{k+m} - X_k|^q, then
/// exponent = slope(log S(m) vs log(m dt)) / q. Needs >= 3 strictly
/// increasing lags with max lag <= N/4.
HolderEstimate estimate_holder(const SamplePath& path, double q,
                               std::span<const std::size_t> lags);

/// Lags 1, 2, 4, ..., up to `max_lag`.
std::vector<std::size_t> dyadic_lags(std::size_t max_lag);

/// Biased-normalized autocorrelation of a_k = |X_{k+1} - X_k|:
/// r(l) = sum_{k<n-l} (a_k - mean)(a_{k+l} - mean) / sum_k (a_k - mean)^2.
AcfSeries acf_abs_increments(const SamplePath& path, std::size_t max_lag);

/// Ordinary least-squares slope of log(ys) on log(xs).
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// Least-squares slope and coefficient of determination of ys on xs.
struct LinearFit {
  double slope;
  double intercept;
  double r2;
};
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Coupled strong-convergence study. Per path, increments are sampled on the
/// reference grid N_base * r^n_levels and coarsened to each level
/// N_base * r^l, l = 0..n_levels-1. sup_mse[l] is the maximum over that
/// level's nodes of the path-averaged squared difference to the reference
/// at the shared node.
ConvergenceReport convergence_study(const SimulationConfig& base_config,
                                    std::size_t n_levels, std::size_t refine_factor,
                                    std::size_t threads = 0);

}  // namespace sem
