#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sem/kernels.hpp"
#include "sem/randomness.hpp"

namespace sem {

/// Deterministic offset g(t). An empty function means g = 0.
using Offset = std::function<double(double t)>;

struct SimulationConfig {
  SimulationConfig(TimeGrid grid, KernelParams kernel, Seed seed, std::size_t n_paths,
                   Offset offset = {});

  TimeGrid grid;
  KernelParams kernel;
  Seed seed;
  std::size_t n_paths;
  Offset offset;

  double offset_at(double t) const { return offset ? offset(t) : 0.0; }
};

/// Euler values at t_0..t_N for one realization.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
  std::uint64_t path_index = 0;

  bool operator==(const SamplePath&) const = default;
};

struct Ensemble {
  SimulationConfig config;
  std::vector<SamplePath> paths;
};

/// Raised by monte_carlo when a single path fails; carries the path index.
class PathFailure : public std::runtime_error {
 public:
  PathFailure(std::uint64_t path_index, const std::string& what)
      : std::runtime_error("path " + std::to_string(path_index) + ": " + what),
        path_index_(path_index) {}
  std::uint64_t path_index() const noexcept { return path_index_; }

 private:
  std::uint64_t path_index_;
};

/// Discrete Euler-Maruyama scheme
///   X_0 = g(0),  X_k = g(t_k) + sum_{i<k} sigma(t_k, t_i, X_i) dB_i,
/// with the inner sum accumulated left to right. Theta(N^2) kernel
/// evaluations, or Theta(N) plus N^2/2 multiply-adds when the kernel depends
/// on the lag only; both routes produce identical bits.
SamplePath simulate_discrete(const SimulationConfig& config,
                             const BrownianIncrements& increments);

/// Continuous-time interpolation of a coarse Euler path evaluated on the grid
/// refined by `refine_factor`. Each fine node tau_j = k*r + p receives
///   g(tau_j) + sum_{i<k} sigma(tau_j, t_i, X_i) dB^coarse_i
///            + sigma(tau_j, t_k, X_k) (dB^fine_{kr} + ... + dB^fine_{kr+p-1}),
/// which groups the fine-interval sum by the frozen coarse node eta(s). At
/// coarse nodes (p = 0) the result equals the coarse path bit for bit.
/// Throws std::invalid_argument unless coarsen(fine_increments, r) drives
/// coarse_path under config.
SamplePath interpolate_on_refinement(const SimulationConfig& config,
                                     const SamplePath& coarse_path,
                                     const BrownianIncrements& fine_increments,
                                     std::size_t refine_factor);

/// Worker count used when the caller passes 0: SEM_THREADS if set, otherwise
/// the hardware concurrency.
std::size_t default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
/// rethrown as PathFailure for the lowest failing index.
void parallel_for_paths(std::size_t count, std::size_t threads,
                        const std::function<void(std::size_t)>& fn);

/// n_paths paths; path i uses sample_brownian(derive_path_seed(seed, i), grid).
/// The result does not depend on `threads`.
Ensemble monte_carlo(const SimulationConfig& config, std::size_t threads = 0);

}  // namespace sem
