#include "sem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sem {

MonteCarloEstimate estimate_moment(const Ensemble& ensemble, double p, std::size_t node) {
  return estimate_moment(std::span<const SamplePath>(ensemble.paths), p, node);
}

MonteCarloEstimate estimate_moment(std::span<const SamplePath> paths, double p,
                                   std::size_t node) {
  if (paths.empty()) throw std::invalid_argument("moment of an empty ensemble");
  if (!(p >= 0.0)) throw std::invalid_argument("moment order must be nonnegative");

  const std::size_t n = paths.size();
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (node >= paths[i].values.size())
      throw std::invalid_argument("node " + std::to_string(node) + " is beyond the grid");
    samples[i] = std::pow(std::abs(paths[i].values[node]), p);
  }

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return {mean, sd / std::sqrt(static_cast<double>(n)), n};
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("line fit needs two equal-length series of length >= 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct abscissae");
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return {slope, my - slope * mx, r2};
}

double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("log-log fit needs two equal-length series of length >= 2");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("log-log fit needs strictly positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return fit_line(lx, ly).slope;
}

std::vector<std::size_t> dyadic_lags(std::size_t max_lag) {
  std::vector<std::size_t> lags;
  for (std::size_t m = 1; m <= max_lag; m *= 2) lags.push_back(m);
  return lags;
}

HolderEstimate estimate_holder(const SamplePath& path, double q,
                               std::span<const std::size_t> lags) {
  if (!(q > 0.0)) throw std::invalid_argument("moment order q must be positive");
  if (lags.size() < 3) throw std::invalid_argument("Holder estimate needs at least 3 lags");
  if (!std::is_sorted(lags.begin(), lags.end()) ||
      std::adjacent_find(lags.begin(), lags.end()) != lags.end() || lags.front() == 0)
    throw std::invalid_argument("Holder lags must be positive and strictly increasing");
  const std::size_t n = path.grid.steps();
  if (lags.back() > n / 4)
    throw std::invalid_argument("largest Holder lag exceeds N/4");

  const auto& x = path.values;
  std::vector<double> log_scale, log_s;
  for (std::size_t m : lags) {
    double acc = 0.0;
    for (std::size_t k = 0; k + m <= n; ++k) acc += std::pow(std::abs(x[k + m] - x[k]), q);
    const double s = acc / static_cast<double>(n + 1 - m);
    if (!(s > 0.0))
      throw DegenerateSeries("path has no variation at lag " + std::to_string(m));
    log_scale.push_back(std::log(static_cast<double>(m) * path.grid.dt()));
    log_s.push_back(std::log(s));
  }
  const LinearFit fit = fit_line(log_scale, log_s);
  return {fit.slope / q, fit.r2, std::vector<std::size_t>(lags.begin(), lags.end()), q};
}

AcfSeries acf_abs_increments(const SamplePath& path, std::size_t max_lag) {
  const std::size_t n = path.grid.steps();
  if (2 * max_lag >= n) throw std::invalid_argument("ACF max_lag must be below N/2");

  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = std::abs(path.values[k + 1] - path.values[k]);
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(n);
  for (double& v : a) v -= mean;

  double c0 = 0.0;
  for (double v : a) c0 += v * v;
  if (!(c0 > 0.0)) throw DegenerateSeries("absolute increments are constant");

  AcfSeries out;
  out.series_length = n;
  out.values.resize(max_lag + 1);
  out.values[0] = 1.0;
  for (std::size_t l = 1; l <= max_lag; ++l) {
    double c = 0.0;
    for (std::size_t k = 0; k + l < n; ++k) c += a[k] * a[k + l];
    out.values[l] = c / c0;
  }
  return out;
}

ConvergenceReport convergence_study(const SimulationConfig& base_config,
                                    std::size_t n_levels, std::size_t refine_factor,
                                    std::size_t threads) {
  if (n_levels < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
  if (refine_factor < 2) throw std::invalid_argument("refine factor must be at least 2");

  const double horizon = base_config.grid.horizon();
  std::vector<std::size_t> steps(n_levels + 1);
  steps[0] = base_config.grid.steps();
  for (std::size_t l = 1; l <= n_levels; ++l) {
    if (steps[l - 1] > (std::size_t{1} << 40) / refine_factor)
      throw std::invalid_argument("convergence study reference grid is too large");
    steps[l] = steps[l - 1] * refine_factor;
  }
  const TimeGrid ref_grid(horizon, steps[n_levels]);

  std::vector<SimulationConfig> configs;
  for (std::size_t l = 0; l <= n_levels; ++l)
    configs.emplace_back(TimeGrid(horizon, steps[l]), base_config.kernel, base_config.seed,
                         base_config.n_paths, base_config.offset);

  // sq_err[path][level] holds per-node squared differences for that path.
  const std::size_t n_paths = base_config.n_paths;
  std::vector<std::vector<std::vector<double>>> sq_err(n_paths);
  parallel_for_paths(n_paths, threads, [&](std::size_t p) {
    const auto fine = sample_brownian(derive_path_seed(base_config.seed, p), ref_grid, p);
    const auto reference = simulate_discrete(configs[n_levels], fine);
    auto& mine = sq_err[p];
    mine.resize(n_levels);
    for (std::size_t l = 0; l < n_levels; ++l) {
      const std::size_t factor = steps[n_levels] / steps[l];
      const auto path = simulate_discrete(configs[l], coarsen(fine, factor));
      mine[l].resize(steps[l] + 1);
      for (std::size_t k = 0; k <= steps[l]; ++k) {
        const double d = path.values[k] - reference.values[k * factor];
        mine[l][k] = d * d;
      }
    }
  });

  ConvergenceReport report;
  report.n_paths = n_paths;
  report.reference_steps = steps[n_levels];
  report.theoretical_rate_bound = 2.0 * base_config.kernel.hurst.h_star();
  for (std::size_t l = 0; l < n_levels; ++l) {
    double sup = 0.0;
    for (std::size_t k = 0; k <= steps[l]; ++k) {
      double acc = 0.0;
      for (std::size_t p = 0; p < n_paths; ++p) acc += sq_err[p][l][k];
      sup = std::max(sup, acc / static_cast<double>(n_paths));
    }
    report.dt_levels.push_back(horizon / static_cast<double>(steps[l]));
    report.sup_mse.push_back(sup);
  }
  const bool any_zero = std::any_of(report.sup_mse.begin(), report.sup_mse.end(),
                                    [](double v) { return v == 0.0; });
  if (!any_zero) report.fitted_slope = fit_loglog_slope(report.dt_levels, report.sup_mse);
  return report;
}

}  // namespace sem
