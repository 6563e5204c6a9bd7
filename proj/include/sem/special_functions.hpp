#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sem {

struct MittagLefflerParams {
  double beta = 1.0;
  double tolerance = 1e-12;
  std::size_t max_terms = 10000;
};

/// The defining series ran out of terms before its last term dropped below
/// the tolerance.
class SeriesNotConverged : public std::runtime_error {
 public:
  SeriesNotConverged(double partial_sum, std::size_t terms)
      : std::runtime_error("Mittag-Leffler series did not converge within " +
                           std::to_string(terms) + " terms"),
        partial_sum_(partial_sum),
        terms_(terms) {}
  double partial_sum() const noexcept { return partial_sum_; }
  std::size_t terms() const noexcept { return terms_; }

 private:
  double partial_sum_;
  std::size_t terms_;
};

/// log Gamma(x) for x > 0 by the Lanczos approximation (g = 7, 9 coefficients),
/// with Gamma(x) = Gamma(x + 1) / x below x = 1/2.
double log_gamma(double x);

/// E_beta(z) = sum_k z^k / Gamma(k beta + 1) for z >= 0. Terms are formed in
/// log space; summation stops at the first term below params.tolerance.
/// Throws SeriesNotConverged after max_terms, std::overflow_error if the sum
/// leaves the double range.
double mittag_leffler(const MittagLefflerParams& params, double z);

/// a E_beta(g Gamma(beta) t^beta): the fractional Gronwall bound for constant
/// a and g.
double gronwall_bound(double a, double g, double beta, double t,
                      const MittagLefflerParams& series = {});

}  // namespace sem
