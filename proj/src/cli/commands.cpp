#include "sem/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sem/analysis.hpp"

namespace sem::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_file_atomically(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

struct Output {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::string summary;
};

Output simulate(const ExperimentConfig& cfg, std::size_t threads) {
  const auto ensemble = monte_carlo(build_simulation(cfg), threads);
  std::string csv = "t";
  for (std::size_t i = 0; i < ensemble.paths.size(); ++i) csv += ",path_" + std::to_string(i);
  csv += '\n';
  const TimeGrid& grid = ensemble.config.grid;
  for (std::size_t k = 0; k <= grid.steps(); ++k) {
    csv += format_real(grid.node(k));
    for (const auto& path : ensemble.paths) {
      csv += ',';
      csv += format_real(path.values[k]);
    }
    csv += '\n';
  }
  std::ostringstream summary;
  summary << "simulated " << ensemble.paths.size() << " path(s) on " << grid.steps()
          << " steps";
  return {{{"paths.csv", std::move(csv)}}, summary.str()};
}

Output converge(const ExperimentConfig& cfg, std::size_t threads) {
  const ConvergeBlock block = cfg.converge.value_or(ConvergeBlock{});
  const auto report =
      convergence_study(build_simulation(cfg), block.levels, block.refine_factor, threads);
  json doc{{"dt_levels", report.dt_levels},
           {"sup_mse", report.sup_mse},
           {"theoretical_rate_bound", report.theoretical_rate_bound},
           {"n_paths", report.n_paths},
           {"levels", block.levels},
           {"refine_factor", block.refine_factor},
           {"reference_steps", report.reference_steps}};
  if (report.fitted_slope) {
    doc["fitted_slope"] = *report.fitted_slope;
    doc["flag"] = nullptr;
  } else {
    doc["fitted_slope"] = nullptr;
    doc["flag"] = "degenerate_exact";
  }
  std::ostringstream summary;
  summary << "convergence study over " << block.levels << " levels: slope ";
  if (report.fitted_slope)
    summary << format_real(*report.fitted_slope);
  else
    summary << "undefined (degenerate_exact)";
  summary << ", bound 2h* = " << format_real(report.theoretical_rate_bound);
  return {{{"convergence.json", doc.dump(2) + "\n"}}, summary.str()};
}

Output holder(const ExperimentConfig& cfg, std::size_t threads) {
  const HolderBlock block = cfg.holder.value_or(HolderBlock{});
  std::vector<std::size_t> lags = block.lags;
  if (lags.empty()) lags = dyadic_lags(std::min<std::size_t>(64, cfg.N / 4));
  if (lags.size() < 3)
    throw ConfigError("N", "too small for the default Holder lags (need N >= 16)");

  const auto ensemble = monte_carlo(build_simulation(cfg), threads);
  json per_path = json::array();
  std::vector<double> exponents;
  for (const auto& path : ensemble.paths) {
    const auto est = estimate_holder(path, block.q, lags);
    per_path.push_back(
        {{"path_index", path.path_index}, {"exponent", est.exponent}, {"r2", est.regression_r2}});
    exponents.push_back(est.exponent);
  }
  std::sort(exponents.begin(), exponents.end());
  const std::size_t m = exponents.size();
  const double median =
      m % 2 ? exponents[m / 2] : 0.5 * (exponents[m / 2 - 1] + exponents[m / 2]);

  json doc{{"q", block.q}, {"lags", lags}, {"median_exponent", median}, {"paths", per_path}};
  if (m == 1) {
    doc["exponent"] = per_path[0]["exponent"];
    doc["r2"] = per_path[0]["r2"];
  }
  return {{{"holder.json", doc.dump(2) + "\n"}},
          "Holder exponent median " + format_real(median) + " over " + std::to_string(m) +
              " path(s)"};
}

Output acf(const ExperimentConfig& cfg, std::size_t threads) {
  const AcfBlock block = cfg.acf.value_or(AcfBlock{std::min<std::size_t>(20, (cfg.N - 1) / 2)});
  const auto ensemble = monte_carlo(build_simulation(cfg), threads);
  std::vector<double> mean(block.max_lag + 1, 0.0);
  for (const auto& path : ensemble.paths) {
    const auto series = acf_abs_increments(path, block.max_lag);
    for (std::size_t l = 0; l <= block.max_lag; ++l) mean[l] += series.values[l];
  }
  const double n = static_cast<double>(ensemble.paths.size());
  std::string csv = "lag,value\n";
  for (std::size_t l = 0; l <= block.max_lag; ++l) {
    // Lag 0 is 1 on every path; dividing the sum would only add rounding.
    const double v = l == 0 ? 1.0 : mean[l] / n;
    csv += std::to_string(l) + "," + format_real(v) + "\n";
  }
  return {{{"acf.csv", std::move(csv)}},
          "ACF of absolute increments up to lag " + std::to_string(block.max_lag) +
              ", averaged over " + std::to_string(ensemble.paths.size()) + " path(s)"};
}

Output moments(const ExperimentConfig& cfg, std::size_t threads) {
  MomentsBlock block = cfg.moments.value_or(MomentsBlock{});
  if (block.nodes.empty()) block.nodes = {cfg.N};
  const auto ensemble = monte_carlo(build_simulation(cfg), threads);
  std::string csv = "node,p,value,std_error\n";
  for (std::size_t node : block.nodes) {
    for (double p : block.p) {
      const auto est = estimate_moment(ensemble, p, node);
      csv += std::to_string(node) + "," + format_real(p) + "," + format_real(est.value) +
             "," + format_real(est.std_error) + "\n";
    }
  }
  return {{{"moments.csv", std::move(csv)}},
          "moments at " + std::to_string(block.nodes.size()) + " node(s) over " +
              std::to_string(ensemble.paths.size()) + " path(s)"};
}

}  // namespace

RunResult run_command(std::string_view command, const ExperimentConfig& config,
                      const fs::path& output_dir, std::size_t threads) {
  const auto start = std::chrono::steady_clock::now();
  Output out;
  if (command == "simulate")
    out = simulate(config, threads);
  else if (command == "converge")
    out = converge(config, threads);
  else if (command == "holder")
    out = holder(config, threads);
  else if (command == "acf")
    out = acf(config, threads);
  else if (command == "moments")
    out = moments(config, threads);
  else
    throw std::invalid_argument("unknown command '" + std::string(command) + "'");

  fs::create_directories(output_dir);
  RunResult result;
  json artifacts = json::array();
  for (const auto& [name, contents] : out.files) {
    write_file_atomically(output_dir / name, contents);
    result.artifacts.push_back(output_dir / name);
    artifacts.push_back(name);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json manifest{{"command", command},
                      {"config", to_json(config)},
                      {"artifacts", artifacts},
                      {"wall_clock_seconds", seconds},
                      {"tool_version", kToolVersion},
                      {"seed_rule", kSeedRule}};
  write_file_atomically(output_dir / "manifest.json", manifest.dump(2) + "\n");
  result.artifacts.push_back(output_dir / "manifest.json");
  result.summary = std::move(out.summary);
  return result;
}

namespace {

void report_error(std::string_view kind, const std::string& message,
                  const std::string& key = {}) {
  json err{{"error", kind}, {"message", message}};
  if (!key.empty()) err["key"] = key;
  std::cerr << err.dump() << '\n';
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"Euler-Maruyama simulation and path statistics for Volterra equations with state-dependent Hurst exponent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config_path;
  std::string output_dir = ".";
  std::size_t threads = 0;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "sample paths and write paths.csv"},
      {"converge", "coupled strong-convergence study, writes convergence.json"},
      {"holder", "structure-function Holder exponent, writes holder.json"},
      {"acf", "autocorrelation of absolute increments, writes acf.csv"},
      {"moments", "p-th absolute moments, writes moments.csv"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--output-dir", output_dir, "directory for data files and manifest");
    sub->add_option("--threads", threads, "worker threads (default: SEM_THREADS or all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig config = load_config(config_path);
    const RunResult result = run_command(command, config, output_dir, threads);
    std::cout << command << ": " << result.summary << '\n';
    for (const auto& path : result.artifacts) std::cout << "  wrote " << path.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    report_error("config", e.what(), e.key());
    return 2;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return 3;
  }
}

}  // namespace sem::cli
