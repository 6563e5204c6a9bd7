#include "sem/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sem {

namespace {

// Slack for rounding in the difference quotients of the validators.
bool within(double value, double bound) {
  return value <= bound * (1.0 + 1e-12) + 1e-15;
}

void expect_arity(std::string_view name, std::span<const double> params,
                  std::size_t arity) {
  if (params.size() != arity)
    throw std::invalid_argument(std::string(name) + " takes " + std::to_string(arity) +
                                " parameter(s), got " + std::to_string(params.size()));
}

double lattice_point(double lo, double hi, std::size_t i, std::size_t n) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void check_lattice(const SamplingLattice& lattice) {
  if (lattice.t_samples < 2 || lattice.x_samples < 2)
    throw std::invalid_argument("validation lattice needs at least 2 samples per axis");
  if (!(lattice.horizon > 0.0) || !(lattice.x_max > lattice.x_min))
    throw std::invalid_argument("validation lattice has an empty domain");
}

// Shared Lipschitz scan for both function kinds.
template <class F>
void scan_lipschitz(const F& f, double lip_x, double lip_t, const SamplingLattice& lat,
                    ValidationReport& report) {
  const std::size_t nt = lat.t_samples, nx = lat.x_samples;
  std::vector<double> prev_row(nx), row(nx);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = lattice_point(0.0, lat.horizon, i, nt);
    for (std::size_t j = 0; j < nx; ++j) {
      const double x = lattice_point(lat.x_min, lat.x_max, j, nx);
      row[j] = f(t, x);
      if (j > 0) {
        const double xp = lattice_point(lat.x_min, lat.x_max, j - 1, nx);
        const double diff = std::abs(row[j] - row[j - 1]);
        const double bound = lip_x * std::abs(x - xp);
        if (!within(diff, bound))
          report.violations.push_back({"lipschitz_x", t, xp, t, x, diff, bound});
      }
      if (i > 0) {
        const double tp = lattice_point(0.0, lat.horizon, i - 1, nt);
        const double diff = std::abs(row[j] - prev_row[j]);
        const double bound = lip_t * std::abs(t - tp);
        if (!within(diff, bound))
          report.violations.push_back({"lipschitz_t", tp, x, t, x, diff, bound});
      }
    }
    std::swap(prev_row, row);
  }
}

}  // namespace

HurstFunction::HurstFunction(Evaluator raw, double h_star, double h_sup, double lip_x,
                             double lip_t, std::string name, std::vector<double> params)
    : raw_(std::move(raw)),
      h_star_(h_star),
      h_sup_(h_sup),
      lip_x_(lip_x),
      lip_t_(lip_t),
      name_(std::move(name)),
      params_(std::move(params)) {
  if (!raw_) throw std::invalid_argument("Hurst function needs an evaluator");
  if (!(h_star > 0.0 && h_star <= h_sup && h_sup <= 1.0))
    throw std::invalid_argument("Hurst bounds must satisfy 0 < h_star <= h_sup <= 1");
  if (!(lip_x >= 0.0) || !(lip_t >= 0.0))
    throw std::invalid_argument("Lipschitz constants must be nonnegative");
}

double HurstFunction::operator()(double t, double x) const {
  if (is_constant()) return h_star_;
  return std::clamp(raw_(t, x), h_star_, h_sup_);
}

HurstEvaluation eval_hurst(const HurstFunction& h, double t, double x) {
  const double raw = h.raw(t, x);
  const double value = std::clamp(raw, h.h_star(), h.h_sup());
  return {value, value != raw};
}

HurstFunction builtin_hurst(std::string_view name, std::span<const double> params) {
  std::vector<double> p(params.begin(), params.end());
  if (name == "constant") {
    expect_arity(name, params, 1);
    const double H = params[0];
    if (!(H > 0.0 && H < 1.0))
      throw std::invalid_argument("constant Hurst value must lie in (0, 1)");
    return HurstFunction([H](double, double) { return H; }, H, H, 0.0, 0.0,
                         std::string(name), std::move(p));
  }
  if (name == "smooth_at_origin") {
    expect_arity(name, params, 0);
    return HurstFunction([](double, double x) { return 0.5 + 0.5 / (1.0 + x * x); },
                         0.5, 1.0, kHalfBellSlope, 0.0, std::string(name));
  }
  if (name == "rough_at_origin") {
    expect_arity(name, params, 0);
    return HurstFunction(
        [](double, double x) { return std::max(kHurstClipFloor, 0.5 - 0.5 / (1.0 + x * x)); },
        kHurstClipFloor, 0.5, kHalfBellSlope, 0.0, std::string(name));
  }
  if (name == "bell") {
    expect_arity(name, params, 0);
    return HurstFunction(
        [](double, double x) { return std::max(kHurstClipFloor, 1.0 / (1.0 + x * x)); },
        kHurstClipFloor, 1.0, 2.0 * kHalfBellSlope, 0.0, std::string(name));
  }
  if (name == "trig") {
    expect_arity(name, params, 3);
    const double alpha = params[0], beta = params[1], gamma = params[2];
    const double lo = alpha - std::abs(beta), hi = alpha + std::abs(beta);
    if (!(lo > 0.0) || !(hi < 1.0))
      throw std::invalid_argument("trig Hurst needs alpha - |beta| > 0 and alpha + |beta| < 1");
    return HurstFunction(
        [alpha, beta, gamma](double, double x) { return alpha + beta * std::sin(gamma * x); },
        lo, hi, std::abs(beta * gamma), 0.0, std::string(name), std::move(p));
  }
  throw std::invalid_argument("unknown Hurst function '" + std::string(name) + "'");
}

DampeningFunction::DampeningFunction(Evaluator eval, double lip_x, double lip_t,
                                     double growth_c, std::string name,
                                     std::vector<double> params,
                                     std::optional<double> constant_value)
    : eval_(std::move(eval)),
      lip_x_(lip_x),
      lip_t_(lip_t),
      growth_c_(growth_c),
      name_(std::move(name)),
      params_(std::move(params)),
      constant_(constant_value) {
  if (!eval_) throw std::invalid_argument("dampening function needs an evaluator");
  if (!(lip_x >= 0.0) || !(lip_t >= 0.0) || !(growth_c >= 0.0))
    throw std::invalid_argument("dampening constants must be nonnegative");
}

DampeningFunction builtin_dampening(std::string_view name, std::span<const double> params) {
  std::vector<double> p(params.begin(), params.end());
  if (name == "constant") {
    expect_arity(name, params, 1);
    const double c = params[0];
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("constant dampening must be nonnegative and finite");
    return DampeningFunction([c](double, double) { return c; }, 0.0, 0.0, c,
                             std::string(name), std::move(p), c);
  }
  if (name == "abs") {
    expect_arity(name, params, 1);
    const double c = params[0];
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("abs dampening scale must be nonnegative and finite");
    return DampeningFunction([c](double, double x) { return c * std::abs(x); }, c, 0.0, c,
                             std::string(name), std::move(p));
  }
  if (name == "bell") {
    expect_arity(name, params, 0);
    return DampeningFunction([](double, double x) { return 1.0 / (1.0 + x * x); },
                             2.0 * kHalfBellSlope, 0.0, 1.0, std::string(name));
  }
  throw std::invalid_argument("unknown dampening function '" + std::string(name) + "'");
}

ValidationReport validate_hurst(const HurstFunction& h, const SamplingLattice& lattice) {
  check_lattice(lattice);
  ValidationReport report;
  const auto raw = [&h](double t, double x) { return h.raw(t, x); };
  for (std::size_t i = 0; i < lattice.t_samples; ++i) {
    const double t = lattice_point(0.0, lattice.horizon, i, lattice.t_samples);
    for (std::size_t j = 0; j < lattice.x_samples; ++j) {
      const double x = lattice_point(lattice.x_min, lattice.x_max, j, lattice.x_samples);
      const double v = raw(t, x);
      if (!(v >= h.h_star()))
        report.violations.push_back({"range", t, x, t, x, v, h.h_star()});
      else if (!(v <= h.h_sup()))
        report.violations.push_back({"range", t, x, t, x, v, h.h_sup()});
    }
  }
  scan_lipschitz(raw, h.lip_x(), h.lip_t(), lattice, report);
  report.samples_used = lattice.t_samples * lattice.x_samples;
  report.passed = report.violations.empty();
  return report;
}

ValidationReport validate_dampening(const DampeningFunction& f,
                                    const SamplingLattice& lattice) {
  check_lattice(lattice);
  ValidationReport report;
  for (std::size_t i = 0; i < lattice.t_samples; ++i) {
    const double t = lattice_point(0.0, lattice.horizon, i, lattice.t_samples);
    for (std::size_t j = 0; j < lattice.x_samples; ++j) {
      const double x = lattice_point(lattice.x_min, lattice.x_max, j, lattice.x_samples);
      const double v = f(t, x);
      if (!(v >= 0.0)) report.violations.push_back({"nonnegativity", t, x, t, x, v, 0.0});
      const double bound = f.growth_c() * (1.0 + std::abs(x));
      if (!within(std::abs(v), bound))
        report.violations.push_back({"growth", t, x, t, x, std::abs(v), bound});
    }
  }
  scan_lipschitz(f, f.lip_x(), f.lip_t(), lattice, report);
  report.samples_used = lattice.t_samples * lattice.x_samples;
  report.passed = report.violations.empty();
  return report;
}

}  // namespace sem
