#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sem {

/// Uniform grid t_k = k * dt on [0, T] with dt = T / N.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }

  /// Span of m steps, computed as (m * T) / N. With a power-of-two refinement
  /// factor r, lag(m * r) on the refined grid equals lag(m) here bit for bit.
  double lag(std::size_t m) const noexcept {
    return (static_cast<double>(m) * horizon_) / static_cast<double>(steps_);
  }

  /// Node k; node(steps()) is exactly horizon().
  double node(std::size_t k) const noexcept {
    return k == steps_ ? horizon_ : lag(k);
  }

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

TimeGrid make_grid(double horizon, std::size_t steps);

struct Seed {
  std::uint64_t master = 0;
  bool operator==(const Seed&) const = default;
};

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Per-path seed: mix64(master + golden * (path_index + 1)).
/// Injective in path_index for a fixed master and injective in master for a
/// fixed path_index.
Seed derive_path_seed(Seed seed, std::uint64_t path_index) noexcept;

/// Counter-based SplitMix64 stream: draw i is mix64(seed + golden * (i + 1)).
/// Any draw can be computed without touching the others.
class SplitMixStream {
 public:
  explicit SplitMixStream(Seed seed) noexcept : state_(seed.master) {}

  std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform in the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
  double next_open_unit() noexcept;

 private:
  std::uint64_t state_;
};

/// Standard normal quantile. Acklam's rational approximation followed by one
/// Halley correction step against erfc, giving close to full double precision.
double normal_quantile(double p);

/// Brownian increments are rounded to multiples of 2^-36. Every partial sum of
/// lattice values with magnitude below 2^17 is then exact in binary64, so
/// coarsened increments and Brownian values at shared nodes agree bit for bit
/// regardless of summation order.
inline constexpr double kIncrementQuantum = 1.0 / 68719476736.0;  // 2^-36

class BrownianIncrements {
 public:
  BrownianIncrements(TimeGrid grid, std::vector<double> values, Seed seed,
                     std::uint64_t path_index = 0);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  Seed seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return path_index_; }

  /// B(t_0), ..., B(t_N) accumulated left to right from B(0) = 0.
  std::vector<double> prefix_sums() const;

  bool operator==(const BrownianIncrements&) const = default;

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  Seed seed_;
  std::uint64_t path_index_;
};

/// N draws of N(0, dt), one uniform per draw through normal_quantile.
BrownianIncrements sample_brownian(Seed seed, const TimeGrid& grid,
                                   std::uint64_t path_index = 0);

/// Sums consecutive blocks of `factor` increments, left to right.
BrownianIncrements coarsen(const BrownianIncrements& increments,
                           std::size_t factor);

}  // namespace sem
