#include "sem/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sem {

KernelParams::KernelParams(HurstFunction hurst_fn,
                           std::optional<DampeningFunction> dampening_fn,
                           double horizon_T)
    : hurst(std::move(hurst_fn)), dampening(std::move(dampening_fn)), horizon(horizon_T) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("kernel horizon T must be positive and finite");
}

bool KernelParams::is_lag_only() const noexcept {
  return hurst.is_constant() && (!dampening || dampening->constant_value().has_value());
}

double sigma(const KernelParams& params, double t, double s, double x) {
  if (!(s < t))
    throw std::domain_error("sigma is singular on s >= t (t = " + std::to_string(t) +
                            ", s = " + std::to_string(s) + ")");
  return sigma_lag(params, t, t - s, x);
}

double dominating_kernel(double h_star, double horizon, double h_sup, double t, double s) {
  if (!(s < t)) throw std::domain_error("dominating kernel needs s < t");
  const double c_t = std::pow(std::max(1.0, horizon), 2.0 * (h_sup - h_star));
  return c_t * std::pow(t - s, 2.0 * h_star - 1.0);
}

namespace {

void check_lambda_domain(double gamma, double constant, double h_star, double t,
                         double t_prime) {
  if (!(constant > 0.0)) throw std::invalid_argument("lambda_gamma needs a positive constant");
  if (!(gamma > 0.0 && gamma < 2.0 * h_star))
    throw std::invalid_argument("lambda_gamma needs 0 < gamma < 2 h_star");
  if (!(t_prime <= t) || !(t_prime > 0.0))
    throw std::invalid_argument("lambda_gamma needs 0 < t' <= t");
}

}  // namespace

double lambda_gamma(double gamma, double constant, double h_star, double t,
                    double t_prime, double s) {
  check_lambda_domain(gamma, constant, h_star, t, t_prime);
  if (!(s >= 0.0 && s < t_prime))
    throw std::invalid_argument("lambda_gamma needs 0 <= s < t'");
  if (t == t_prime) return 0.0;
  return constant * std::pow(t - t_prime, gamma) *
         std::pow(t_prime - s, -1.0 + h_star - 0.5 * gamma);
}

double lambda_gamma_integral(double gamma, double constant, double h_star, double t,
                             double t_prime) {
  check_lambda_domain(gamma, constant, h_star, t, t_prime);
  const double a = h_star - 0.5 * gamma;
  return constant * std::pow(t_prime, a) * std::pow(t - t_prime, gamma) / a;
}

bool check_fund_ineq(double u, double v, double alpha, double beta) {
  if (!(u > v && v > 0.0))
    throw std::invalid_argument("check_fund_ineq needs u > v > 0");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("check_fund_ineq needs beta in [0, 1]");
  if (!(alpha < 1.0)) throw std::invalid_argument("check_fund_ineq needs alpha < 1");

  const double gap = u - v;
  const double lhs = std::pow(v, alpha) * std::abs(std::expm1(alpha * std::log1p(gap / v)));
  double rhs;
  if (alpha <= 0.0) {
    rhs = std::pow(2.0, 1.0 - beta) * std::pow(std::abs(alpha), beta) *
          std::pow(gap, beta) * std::pow(v, alpha - beta);
  } else {
    rhs = std::pow(alpha, beta) * std::pow(gap, alpha + beta * (1.0 - alpha)) *
          std::pow(v, -beta * (1.0 - alpha));
  }
  return lhs <= rhs * (1.0 + 1e-12);
}

}  // namespace sem
