#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <cstdlib>
#include <new>
#include <random>
#include <vector>

#include "sem/engine.hpp"
#include "support/oracles.hpp"

using namespace sem;

namespace {

HurstFunction constant_h(double H) { return builtin_hurst("constant", std::vector<double>{H}); }

DampeningFunction constant_f(double f) {
  return builtin_dampening("constant", std::vector<double>{f});
}

SimulationConfig make_config(HurstFunction h, std::optional<DampeningFunction> f, double T,
                             std::size_t N, std::uint64_t seed = 1, std::size_t n_paths = 1,
                             Offset g = {}) {
  return SimulationConfig(TimeGrid(T, N), KernelParams(std::move(h), std::move(f), T),
                          Seed{seed}, n_paths, std::move(g));
}

struct Moments {
  double mean, var, var_se, excess_kurtosis;
};

Moments sample_moments(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  long double s = 0;
  for (double x : xs) s += x;
  const long double mean = s / n;
  long double m2 = 0, m4 = 0;
  for (double x : xs) {
    const long double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  return {static_cast<double>(mean), static_cast<double>(m2 * n / (n - 1)),
          static_cast<double>(std::sqrt((m4 - m2 * m2) / n)),
          static_cast<double>(m4 / (m2 * m2) - 3)};
}

std::vector<double> column(const Ensemble& e, std::size_t k) {
  std::vector<double> out;
  for (const auto& p : e.paths) out.push_back(p.values[k]);
  return out;
}

}  // namespace

TEST_CASE("constant h = 1/2 reproduces the Brownian prefix sums bit for bit") {
  for (std::size_t N : {1, 2, 7, 64, 1000, 4096}) {
    const auto cfg = make_config(constant_h(0.5), std::nullopt, 1.5, N, N);
    const auto inc = sample_brownian(Seed{N}, cfg.grid);
    const auto path = simulate_discrete(cfg, inc);
    CHECK(path.values == inc.prefix_sums());
  }
}

TEST_CASE("general loop and lag-only fast path agree bit for bit") {
  const HurstFunction general([](double, double) { return 0.3; }, 0.2, 0.4, 0.0, 0.0);
  REQUIRE(!KernelParams(general, std::nullopt, 1.0).is_lag_only());
  const auto fast_cfg = make_config(constant_h(0.3), std::nullopt, 2.0, 300);
  const auto slow_cfg = make_config(general, std::nullopt, 2.0, 300);
  const auto inc = sample_brownian(Seed{3}, fast_cfg.grid);
  CHECK(simulate_discrete(fast_cfg, inc) == simulate_discrete(slow_cfg, inc));

  const auto fast_g = make_config(constant_h(0.3), constant_f(0.7), 2.0, 300);
  const auto slow_g = make_config(
      general,
      DampeningFunction([](double, double) { return 0.7; }, 0.0, 0.0, 0.7), 2.0, 300);
  CHECK(simulate_discrete(fast_g, inc) == simulate_discrete(slow_g, inc));
}

TEST_CASE("SEM-Gamma with f = 0 is bit-identical to SEM") {
  const std::vector<HurstFunction> hs{builtin_hurst("bell"), builtin_hurst("smooth_at_origin"),
                                      constant_h(0.3),
                                      builtin_hurst("trig", std::vector<double>{0.6, 0.2, 1.0})};
  for (const auto& h : hs) {
    for (const auto& f : {constant_f(0.0), builtin_dampening("abs", std::vector<double>{0.0})}) {
      const auto a = make_config(h, std::nullopt, 3.0, 257);
      const auto b = make_config(h, f, 3.0, 257);
      const auto inc = sample_brownian(Seed{17}, a.grid);
      CHECK(simulate_discrete(a, inc) == simulate_discrete(b, inc));
    }
  }
}

TEST_CASE("offset enters additively and fixes the initial value") {
  const Offset g = [](double t) { return 1.0 + t; };
  const auto cfg = make_config(constant_h(0.5), std::nullopt, 1.0, 16, 1, 1, g);
  const auto inc = sample_brownian(Seed{1}, cfg.grid);
  const auto path = simulate_discrete(cfg, inc);
  const auto b = inc.prefix_sums();
  REQUIRE(path.values.size() == 17);
  CHECK(path.values[0] == 1.0);
  for (std::size_t k = 0; k <= 16; ++k) CHECK(path.values[k] == g(cfg.grid.node(k)) + b[k]);

  const auto no_g = make_config(builtin_hurst("bell"), std::nullopt, 1.0, 16);
  CHECK(simulate_discrete(no_g, inc).values[0] == 0.0);
}

TEST_CASE("simulate_discrete matches a direct evaluation of the scheme") {
  const auto cfg = make_config(builtin_hurst("bell"), builtin_dampening("bell"), 2.0, 50);
  const auto inc = sample_brownian(Seed{9}, cfg.grid);
  const auto path = simulate_discrete(cfg, inc);
  const double dt = 2.0 / 50;
  std::vector<double> x(51, 0.0);
  for (std::size_t k = 1; k <= 50; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double lag = (k - i) * dt;
      const double h = std::max(0.05, 1.0 / (1.0 + x[i] * x[i]));
      const double f = 1.0 / (1.0 + x[i] * x[i]);
      acc += std::exp(-f * lag) * std::pow(lag, h - 0.5) * inc.values()[i];
    }
    x[k] = acc;
  }
  for (std::size_t k = 0; k <= 50; ++k)
    CHECK(path.values[k] == doctest::Approx(x[k]).epsilon(1e-12));
}

TEST_CASE("simulate_discrete rejects a grid mismatch") {
  const auto cfg = make_config(constant_h(0.3), std::nullopt, 1.0, 10);
  CHECK_THROWS_AS(simulate_discrete(cfg, sample_brownian(Seed{1}, TimeGrid(1.0, 11))),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_discrete(cfg, sample_brownian(Seed{1}, TimeGrid(2.0, 10))),
                  std::invalid_argument);
}

TEST_CASE("SimulationConfig validation") {
  CHECK_THROWS_AS(make_config(constant_h(0.3), std::nullopt, 1.0, 10, 1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SimulationConfig(TimeGrid(1.0, 10),
                                   KernelParams(constant_h(0.3), std::nullopt, 2.0), Seed{1}, 1),
                  std::invalid_argument);
}

TEST_CASE("interpolation with refine factor 1 returns the coarse path") {
  const auto cfg = make_config(builtin_hurst("bell"), std::nullopt, 1.0, 64);
  const auto inc = sample_brownian(Seed{4}, cfg.grid);
  const auto path = simulate_discrete(cfg, inc);
  CHECK(interpolate_on_refinement(cfg, path, inc, 1) == path);
}

TEST_CASE("interpolation of constant h = 1/2 gives the fine Brownian path") {
  const auto cfg = make_config(constant_h(0.5), std::nullopt, 1.0, 32);
  for (std::size_t r : {2, 3, 4, 8}) {
    const auto fine = sample_brownian(Seed{r}, TimeGrid(1.0, 32 * r));
    const auto coarse = simulate_discrete(cfg, coarsen(fine, r));
    CHECK(interpolate_on_refinement(cfg, coarse, fine, r).values == fine.prefix_sums());
  }
}

TEST_CASE("interpolation reproduces the coarse path at coarse nodes") {
  for (const auto& h : {builtin_hurst("bell"), builtin_hurst("rough_at_origin"),
                        builtin_hurst("trig", std::vector<double>{0.6, 0.2, 1.0})}) {
    for (std::size_t r : {2, 3, 4, 8}) {
      const auto cfg = make_config(h, constant_f(1.0), 10.0, 40);
      const auto fine = sample_brownian(Seed{100 + r}, TimeGrid(10.0, 40 * r));
      const auto coarse = simulate_discrete(cfg, coarsen(fine, r));
      const auto interp = interpolate_on_refinement(cfg, coarse, fine, r);
      REQUIRE(interp.values.size() == 40 * r + 1);
      for (std::size_t k = 0; k <= 40; ++k) REQUIRE(interp.values[k * r] == coarse.values[k]);
    }
  }
}

TEST_CASE("interpolation matches the frozen-node integral at fine nodes") {
  const std::size_t N = 24, r = 4;
  const double T = 2.0;
  const auto cfg = make_config(builtin_hurst("bell"), std::nullopt, T, N);
  const auto fine = sample_brownian(Seed{77}, TimeGrid(T, N * r));
  const auto coarse = simulate_discrete(cfg, coarsen(fine, r));
  const auto interp = interpolate_on_refinement(cfg, coarse, fine, r);
  const double dtf = T / static_cast<double>(N * r);
  for (std::size_t j = 0; j <= N * r; ++j) {
    const double tau = j * dtf;
    double acc = 0.0;
    for (std::size_t l = 0; l < j; ++l) {
      const std::size_t eta = l / r;  // coarse node at or below tau_l
      const double x = coarse.values[eta];
      const double lag = tau - eta * (T / N);
      const double h = std::max(0.05, 1.0 / (1.0 + x * x));
      acc += std::pow(lag, h - 0.5) * fine.values()[l];
    }
    CHECK(interp.values[j] == doctest::Approx(acc).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("interpolation rejects a broken coupling") {
  const auto cfg = make_config(builtin_hurst("bell"), std::nullopt, 1.0, 16);
  const auto fine = sample_brownian(Seed{1}, TimeGrid(1.0, 32));
  const auto other = sample_brownian(Seed{2}, TimeGrid(1.0, 32));
  const auto coarse = simulate_discrete(cfg, coarsen(fine, 2));
  CHECK_THROWS_AS(interpolate_on_refinement(cfg, coarse, other, 2), std::invalid_argument);
  CHECK_THROWS_AS(interpolate_on_refinement(cfg, coarse, fine, 4), std::invalid_argument);
  CHECK_THROWS_AS(interpolate_on_refinement(cfg, coarse, fine, 0), std::invalid_argument);
}

TEST_CASE("monte_carlo with one path equals a direct simulation") {
  const auto cfg = make_config(builtin_hurst("bell"), std::nullopt, 1.0, 100, 555, 1);
  const auto e = monte_carlo(cfg, 1);
  REQUIRE(e.paths.size() == 1);
  const auto direct =
      simulate_discrete(cfg, sample_brownian(derive_path_seed(Seed{555}, 0), cfg.grid, 0));
  CHECK(e.paths[0] == direct);
}

TEST_CASE("monte_carlo is independent of the thread count") {
  const auto cfg = make_config(builtin_hurst("trig", std::vector<double>{0.6, 0.2, 1.0}),
                               constant_f(1.0), 1.0, 128, 31337, 37);
  const auto one = monte_carlo(cfg, 1);
  for (std::size_t threads : {2, 3, 8, 64}) {
    const auto many = monte_carlo(cfg, threads);
    REQUIRE(many.paths.size() == 37);
    for (std::size_t i = 0; i < 37; ++i) {
      CHECK(many.paths[i].path_index == i);
      CHECK(many.paths[i] == one.paths[i]);
    }
  }
}

TEST_CASE("parallel_for_paths reports the lowest failing index") {
  for (std::size_t threads : {1, 4}) {
    try {
      parallel_for_paths(20, threads, [](std::size_t i) {
        if (i == 7 || i == 13) throw std::runtime_error("boom");
      });
      FAIL("expected PathFailure");
    } catch (const PathFailure& e) {
      CHECK(e.path_index() == 7);
    }
    try {
      parallel_for_paths(5, threads, [](std::size_t i) {
        if (i == 2) throw std::bad_alloc();
      });
      FAIL("expected PathFailure");
    } catch (const PathFailure& e) {
      CHECK(e.path_index() == 2);
      CHECK(std::string(e.what()).find("out of memory") != std::string::npos);
    }
  }
}

TEST_CASE("SEM_THREADS sets the default worker count") {
  ::setenv("SEM_THREADS", "3", 1);
  CHECK(default_thread_count() == 3);
  ::unsetenv("SEM_THREADS");
  CHECK(default_thread_count() >= 1);
}

TEST_CASE("variance of B_1 under constant h = 1/2 at M = 1e4") {
  const auto e = monte_carlo(make_config(constant_h(0.5), std::nullopt, 1.0, 64, 2718, 10000));
  const auto m = sample_moments(column(e, 64));
  CHECK(std::abs(m.var - 1.0) <= 4 * m.var_se);
}

TEST_CASE("Gaussian linear form oracle for constant h") {
  for (double H : {0.3, 0.75}) {
    const std::size_t N = 128;
    const auto e = monte_carlo(make_config(constant_h(H), std::nullopt, 1.0, N, 4242, 10000));
    for (std::size_t k : {1, 10, 64, 128}) {
      const auto m = sample_moments(column(e, k));
      const double exact = test::rl_discrete_variance(H, 1.0, N, k);
      INFO("H=", H, " k=", k);
      CHECK(std::abs(m.mean) <= 4 * std::sqrt(exact / 10000));
      CHECK(std::abs(m.var - exact) <= 4 * m.var_se);
      CHECK(m.excess_kurtosis >= -0.2);
      CHECK(m.excess_kurtosis <= 0.2);
    }
  }
}

TEST_CASE("discrete variance approaches the continuous limit") {
  const double discrete = test::rl_discrete_variance(0.75, 1.0, 4096, 4096);
  CHECK(std::abs(discrete - 2.0 / 3.0) <= 0.01 * (2.0 / 3.0));
}

TEST_CASE("damping lowers the terminal variance") {
  const std::size_t N = 256;
  double prev_sample = INFINITY, prev_exact = INFINITY;
  for (double f : {0.0, 0.5, 1.0, 10.0}) {
    const auto e = monte_carlo(make_config(constant_h(0.3), constant_f(f), 1.0, N, 99, 4000));
    const double v = sample_moments(column(e, N)).var;
    long double exact = 0;
    for (std::size_t j = 1; j <= N; ++j) {
      const long double lag = j / static_cast<long double>(N);
      const long double w = std::exp(-f * lag) * std::pow(lag, 0.3L - 0.5L);
      exact += w * w / N;
    }
    CHECK(v <= prev_sample);
    CHECK(static_cast<double>(exact) < prev_exact);
    prev_sample = v;
    prev_exact = static_cast<double>(exact);
  }
}

TEST_CASE("p-moments are finite and stable under doubling M") {
  const auto cfg_small =
      make_config(builtin_hurst("bell"), std::nullopt, 1.0, 128, 5, 2000);
  const auto cfg_large =
      make_config(builtin_hurst("bell"), std::nullopt, 1.0, 128, 6, 4000);
  const auto a = monte_carlo(cfg_small);
  const auto b = monte_carlo(cfg_large);
  for (double p : {2.0, 4.0}) {
    std::vector<double> xa, xb;
    for (const auto& path : a.paths) xa.push_back(std::pow(std::abs(path.values[128]), p));
    for (const auto& path : b.paths) xb.push_back(std::pow(std::abs(path.values[128]), p));
    const auto ma = sample_moments(xa), mb = sample_moments(xb);
    REQUIRE(std::isfinite(ma.mean));
    REQUIRE(std::isfinite(mb.mean));
    const double se = std::sqrt(ma.var / xa.size() + mb.var / xb.size());
    CHECK(std::abs(ma.mean - mb.mean) <= 5 * se);
  }
}
