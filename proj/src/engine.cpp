#include "sem/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <new>
#include <optional>
#include <string>
#include <thread>

namespace sem {

SimulationConfig::SimulationConfig(TimeGrid grid_, KernelParams kernel_, Seed seed_,
                                   std::size_t n_paths_, Offset offset_)
    : grid(grid_),
      kernel(std::move(kernel_)),
      seed(seed_),
      n_paths(n_paths_),
      offset(std::move(offset_)) {
  if (n_paths == 0) throw std::invalid_argument("n_paths must be at least 1");
  if (grid.horizon() != kernel.horizon)
    throw std::invalid_argument("grid horizon and kernel horizon differ");
}

namespace {

// sigma_lag at every lag m = 1..N for kernels that ignore (t, x).
std::vector<double> lag_weights(const KernelParams& kernel, const TimeGrid& grid) {
  std::vector<double> w(grid.steps() + 1, 0.0);
  for (std::size_t m = 1; m <= grid.steps(); ++m)
    w[m] = sigma_lag(kernel, 0.0, grid.lag(m), 0.0);
  return w;
}

}  // namespace

SamplePath simulate_discrete(const SimulationConfig& config,
                             const BrownianIncrements& increments) {
  const TimeGrid& grid = config.grid;
  if (!(increments.grid() == grid))
    throw std::invalid_argument("Brownian increments were sampled on a different grid");

  const std::size_t n = grid.steps();
  const auto dB = increments.values();
  std::vector<double> x(n + 1, 0.0);
  x[0] = config.offset_at(0.0);

  if (config.kernel.is_lag_only()) {
    const auto w = lag_weights(config.kernel, grid);
    for (std::size_t k = 1; k <= n; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) acc += w[k - i] * dB[i];
      x[k] = config.offset ? config.offset(grid.node(k)) + acc : acc;
    }
  } else {
    const KernelParams& kernel = config.kernel;
    for (std::size_t k = 1; k <= n; ++k) {
      const double t = grid.node(k);
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        acc += sigma_lag(kernel, t, grid.lag(k - i), x[i]) * dB[i];
      x[k] = config.offset ? config.offset(t) + acc : acc;
    }
  }
  return SamplePath{grid, std::move(x), increments.path_index()};
}

SamplePath interpolate_on_refinement(const SimulationConfig& config,
                                     const SamplePath& coarse_path,
                                     const BrownianIncrements& fine_increments,
                                     std::size_t refine_factor) {
  const TimeGrid& coarse = config.grid;
  if (!(coarse_path.grid == coarse))
    throw std::invalid_argument("coarse path grid differs from the configuration grid");
  if (refine_factor == 0) throw std::invalid_argument("refine factor must be positive");
  const TimeGrid fine(coarse.horizon(), coarse.steps() * refine_factor);
  if (!(fine_increments.grid() == fine))
    throw std::invalid_argument("fine increments are not on the refined grid");

  const BrownianIncrements coarse_inc = coarsen(fine_increments, refine_factor);
  if (simulate_discrete(config, coarse_inc).values != coarse_path.values)
    throw std::invalid_argument(
        "coarse path was not generated by the coarsened fine increments");
  if (refine_factor == 1) return coarse_path;

  const KernelParams& kernel = config.kernel;
  const auto dBc = coarse_inc.values();
  const auto dBf = fine_increments.values();
  const auto& xc = coarse_path.values;
  const std::size_t r = refine_factor;

  std::vector<double> out(fine.steps() + 1, 0.0);
  out[0] = xc[0];
  for (std::size_t j = 1; j <= fine.steps(); ++j) {
    const std::size_t k = j / r, p = j % r;
    double acc = 0.0;
    double t;
    if (p == 0) {
      t = coarse.node(k);
      for (std::size_t i = 0; i < k; ++i)
        acc += sigma_lag(kernel, t, coarse.lag(k - i), xc[i]) * dBc[i];
    } else {
      t = fine.node(j);
      for (std::size_t i = 0; i < k; ++i)
        acc += sigma_lag(kernel, t, fine.lag(j - i * r), xc[i]) * dBc[i];
      double partial = 0.0;
      for (std::size_t l = k * r; l < j; ++l) partial += dBf[l];
      acc += sigma_lag(kernel, t, fine.lag(p), xc[k]) * partial;
    }
    out[j] = config.offset ? config.offset(t) + acc : acc;
  }
  return SamplePath{fine, std::move(out), coarse_path.path_index};
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("SEM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for_paths(std::size_t count, std::size_t threads,
                        const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = default_thread_count();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::optional<std::size_t> first_bad;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first_bad || i < *first_bad) {
          first_bad = i;
          first_error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  if (!first_error) return;
  try {
    std::rethrow_exception(first_error);
  } catch (const PathFailure&) {
    throw;
  } catch (const std::bad_alloc&) {
    throw PathFailure(*first_bad, "out of memory");
  } catch (const std::exception& e) {
    throw PathFailure(*first_bad, e.what());
  }
}

Ensemble monte_carlo(const SimulationConfig& config, std::size_t threads) {
  std::vector<std::optional<SamplePath>> slots(config.n_paths);
  parallel_for_paths(config.n_paths, threads, [&](std::size_t i) {
    const auto inc = sample_brownian(derive_path_seed(config.seed, i), config.grid, i);
    slots[i] = simulate_discrete(config, inc);
  });
  std::vector<SamplePath> paths;
  paths.reserve(slots.size());
  for (auto& slot : slots) paths.push_back(std::move(*slot));
  return Ensemble{config, std::move(paths)};
}

}  // namespace sem
