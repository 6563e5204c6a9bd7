#include "sem/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace sem {

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("log_gamma needs a positive finite argument");
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);

  static constexpr double g = 7.0;
  static constexpr std::array<double, 9> c{
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

  const double z = x - 1.0;
  double series = c[0];
  for (std::size_t k = 1; k < c.size(); ++k) series += c[k] / (z + static_cast<double>(k));
  const double tt = z + g + 0.5;
  constexpr double half_log_two_pi = 0.91893853320467274178;
  return half_log_two_pi + (z + 0.5) * std::log(tt) - tt + std::log(series);
}

double mittag_leffler(const MittagLefflerParams& params, double z) {
  if (!(params.beta > 0.0)) throw std::invalid_argument("Mittag-Leffler needs beta > 0");
  if (!(params.tolerance > 0.0) || params.max_terms < 1)
    throw std::invalid_argument("Mittag-Leffler needs tolerance > 0 and max_terms >= 1");
  if (!(z >= 0.0) || !std::isfinite(z))
    throw std::invalid_argument("Mittag-Leffler is evaluated for finite z >= 0 only");
  if (z == 0.0) return 1.0;

  const double log_z = std::log(z);
  double sum = 1.0;
  for (std::size_t k = 1; k < params.max_terms; ++k) {
    const double kd = static_cast<double>(k);
    const double term = std::exp(kd * log_z - log_gamma(kd * params.beta + 1.0));
    if (term < params.tolerance) return sum;
    sum += term;
    if (!std::isfinite(sum)) throw std::overflow_error("Mittag-Leffler value exceeds double range");
  }
  throw SeriesNotConverged(sum, params.max_terms);
}

double gronwall_bound(double a, double g, double beta, double t,
                      const MittagLefflerParams& series) {
  if (!(a >= 0.0) || !(g >= 0.0) || !(beta > 0.0) || !(t >= 0.0))
    throw std::invalid_argument("gronwall_bound needs a, g, t >= 0 and beta > 0");
  if (a == 0.0) return 0.0;
  MittagLefflerParams p = series;
  p.beta = beta;
  const double arg = g * std::exp(log_gamma(beta)) * std::pow(t, beta);
  return a * mittag_leffler(p, arg);
}

}  // namespace sem
