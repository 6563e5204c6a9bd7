#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sem {

/// Floor applied to the rough_at_origin and bell Hurst functions, whose raw
/// formulas reach 0.
inline constexpr double kHurstClipFloor = 0.05;

/// Maximum of |d/dx (1/2)/(1+x^2)|, attained at x = 1/sqrt(3).
inline constexpr double kHalfBellSlope = 0.32475952641916445;  // 3*sqrt(3)/16

/// h(t, x) with declared range [h_star, h_sup] and declared Lipschitz
/// constants. The raw evaluator is what validators inspect; operator() clips
/// to the declared range.
class HurstFunction {
 public:
  using Evaluator = std::function<double(double t, double x)>;

  /// Requires 0 < h_star <= h_sup <= 1. The upper end is closed because the
  /// smooth_at_origin and bell examples attain h = 1 at x = 0.
  HurstFunction(Evaluator raw, double h_star, double h_sup, double lip_x,
                double lip_t, std::string name = "custom",
                std::vector<double> params = {});

  double raw(double t, double x) const { return raw_(t, x); }
  double operator()(double t, double x) const;

  double h_star() const noexcept { return h_star_; }
  double h_sup() const noexcept { return h_sup_; }
  double lip_x() const noexcept { return lip_x_; }
  double lip_t() const noexcept { return lip_t_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& params() const noexcept { return params_; }

  /// A degenerate range pins every evaluation to h_star.
  bool is_constant() const noexcept { return h_star_ == h_sup_; }

 private:
  Evaluator raw_;
  double h_star_, h_sup_, lip_x_, lip_t_;
  std::string name_;
  std::vector<double> params_;
};

struct HurstEvaluation {
  double value;
  bool clipped;
};

HurstEvaluation eval_hurst(const HurstFunction& h, double t, double x);

/// Names: constant(H), smooth_at_origin, rough_at_origin, bell,
/// trig(alpha, beta, gamma). Throws std::invalid_argument for unknown names,
/// wrong arity or parameters that leave (0, 1).
HurstFunction builtin_hurst(std::string_view name, std::span<const double> params = {});

/// Nonnegative f(t, x) with |f| <= growth_c (1 + |x|) and declared Lipschitz
/// constants.
class DampeningFunction {
 public:
  using Evaluator = std::function<double(double t, double x)>;

  DampeningFunction(Evaluator eval, double lip_x, double lip_t, double growth_c,
                    std::string name = "custom", std::vector<double> params = {},
                    std::optional<double> constant_value = std::nullopt);

  double operator()(double t, double x) const { return eval_(t, x); }

  double lip_x() const noexcept { return lip_x_; }
  double lip_t() const noexcept { return lip_t_; }
  double growth_c() const noexcept { return growth_c_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& params() const noexcept { return params_; }
  /// Set only when f is known to be independent of (t, x).
  std::optional<double> constant_value() const noexcept { return constant_; }

 private:
  Evaluator eval_;
  double lip_x_, lip_t_, growth_c_;
  std::string name_;
  std::vector<double> params_;
  std::optional<double> constant_;
};

/// Names: constant(c), abs(c) for c*|x|, bell for 1/(1+x^2).
DampeningFunction builtin_dampening(std::string_view name,
                                    std::span<const double> params = {});

struct SamplingLattice {
  double horizon = 1.0;
  std::size_t t_samples = 1000;
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t x_samples = 1000;
};

struct Violation {
  std::string quantity;  // "range", "lipschitz_x", "lipschitz_t", "nonnegativity", "growth"
  double t;
  double x;
  double t2;  // second point of a pair, equal to t/x for pointwise checks
  double y;
  double value;
  double bound;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;
  std::size_t samples_used = 0;
};

/// Falsification on a uniform lattice: range containment, and the declared
/// Lipschitz constants on adjacent pairs in x and in t.
ValidationReport validate_hurst(const HurstFunction& h, const SamplingLattice& lattice = {});

/// As validate_hurst, with nonnegativity and linear growth in place of range.
ValidationReport validate_dampening(const DampeningFunction& f,
                                    const SamplingLattice& lattice = {});

}  // namespace sem
