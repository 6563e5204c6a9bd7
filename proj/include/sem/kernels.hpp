#pragma once

#include <cmath>
#include <optional>

#include "sem/model.hpp"

namespace sem {

/// Kernel of the SEM equation, or of SEM-Gamma when a dampening function is
/// present.
struct KernelParams {
  KernelParams(HurstFunction hurst, std::optional<DampeningFunction> dampening,
               double horizon);

  HurstFunction hurst;
  std::optional<DampeningFunction> dampening;
  double horizon;

  bool is_gamma() const noexcept { return dampening.has_value(); }
  /// True when sigma depends on t - s only.
  bool is_lag_only() const noexcept;
};

/// sigma for a given lag = t - s > 0:
///   lag^(h(t, x) - 1/2)                      (SEM)
///   exp(-f(t, x) lag) * lag^(h(t, x) - 1/2)  (SEM-Gamma)
/// No validation; this is the inner loop of the Euler scheme.
inline double sigma_lag(const KernelParams& params, double t, double lag, double x) {
  const double value = std::pow(lag, params.hurst(t, x) - 0.5);
  if (!params.dampening) return value;
  return value * std::exp(-(*params.dampening)(t, x) * lag);
}

/// sigma(t, s, x) for 0 <= s < t <= T. s >= t throws std::domain_error.
double sigma(const KernelParams& params, double t, double s, double x);

/// k(t, s) = C_T (t - s)^(2 h_star - 1) with C_T = max(1, T)^(2 (h_sup - h_star)).
/// Dominates sigma^2 for every Hurst function with range [h_star, h_sup].
double dominating_kernel(double h_star, double horizon, double h_sup, double t, double s);

/// lambda_gamma(t, t', s) = C (t - t')^gamma (t' - s)^(-1 + h_star - gamma/2)
/// for 0 <= s < t' <= t and 0 < gamma < 2 h_star.
double lambda_gamma(double gamma, double constant, double h_star, double t,
                    double t_prime, double s);

/// Closed form of the integral of lambda_gamma over s in [0, t']:
/// C (t')^(h_star - gamma/2) (t - t')^gamma / (h_star - gamma/2).
double lambda_gamma_integral(double gamma, double constant, double h_star, double t,
                             double t_prime);

/// Power-difference inequality for u > v > 0, beta in [0, 1]:
///   alpha <= 0:      |u^a - v^a| <= 2^(1-b) |a|^b |u-v|^b v^(a-b)
///   alpha in (0, 1): |u^a - v^a| <= |a|^b |u-v|^(a + b(1-a)) v^(-b(1-a))
/// The factor on the second branch is |a|^b; with a bare |a| the bound fails
/// already at b = 0 once v is small.
/// The left side is evaluated as v^a |expm1(a log1p((u-v)/v))| so it carries
/// no cancellation; the comparison allows 1e-12 relative slack.
/// Precondition violations throw std::invalid_argument.
bool check_fund_ineq(double u, double v, double alpha, double beta);

}  // namespace sem
