#include "sem/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

namespace sem::cli {

using nlohmann::json;

namespace {

std::string join_key(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(join_key(prefix, key), "unknown key");
  }
}

const json& require(const json& obj, const std::string& prefix, std::string_view key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join_key(prefix, key), "missing required key");
  return *it;
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(key, "expected a finite number");
  return d;
}

std::uint64_t as_unsigned(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto n = v.get<std::int64_t>();
    if (n < 0) throw ConfigError(key, "expected a nonnegative integer");
    return static_cast<std::uint64_t>(n);
  }
  throw ConfigError(key, "expected an integer");
}

std::size_t as_count(const json& v, const std::string& key, std::size_t minimum) {
  const std::uint64_t n = as_unsigned(v, key);
  if (n < minimum)
    throw ConfigError(key, "must be at least " + std::to_string(minimum));
  return static_cast<std::size_t>(n);
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

template <class T, class F>
std::vector<T> as_list(const json& v, const std::string& key, F&& each) {
  if (!v.is_array()) throw ConfigError(key, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(each(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

FunctionSpec parse_function(const json& v, const std::string& key) {
  if (!v.is_object()) throw ConfigError(key, "expected an object with name and params");
  reject_unknown(v, key, {"name", "params"});
  FunctionSpec spec;
  spec.name = as_string(require(v, key, "name"), key + ".name");
  if (v.contains("params"))
    spec.params = as_list<double>(v["params"], key + ".params", as_real);
  return spec;
}

const json& block(const json& doc, std::string_view key) {
  const json& b = doc[std::string(key)];
  if (!b.is_object()) throw ConfigError(std::string(key), "expected an object");
  return b;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  reject_unknown(doc, "", {"process", "hurst", "dampening", "T", "N", "seed", "n_paths",
                           "label", "converge", "holder", "acf", "moments"});

  ExperimentConfig c;
  c.process = as_string(require(doc, "", "process"), "process");
  if (c.process != "sem" && c.process != "sem_gamma")
    throw ConfigError("process", "expected \"sem\" or \"sem_gamma\"");
  c.hurst = parse_function(require(doc, "", "hurst"), "hurst");
  if (doc.contains("dampening")) c.dampening = parse_function(doc["dampening"], "dampening");
  if (c.process == "sem_gamma" && !c.dampening)
    throw ConfigError("dampening", "sem_gamma needs a dampening function");
  if (c.process == "sem" && c.dampening)
    throw ConfigError("dampening", "sem takes no dampening function");

  c.T = as_real(require(doc, "", "T"), "T");
  if (!(c.T > 0.0)) throw ConfigError("T", "must be positive");
  c.N = as_count(require(doc, "", "N"), "N", 1);
  c.seed = as_unsigned(require(doc, "", "seed"), "seed");
  c.n_paths = as_count(require(doc, "", "n_paths"), "n_paths", 1);
  if (doc.contains("label")) c.label = as_string(doc["label"], "label");

  if (doc.contains("converge")) {
    const json& b = block(doc, "converge");
    reject_unknown(b, "converge", {"levels", "refine_factor"});
    ConvergeBlock cb;
    if (b.contains("levels")) cb.levels = as_count(b["levels"], "converge.levels", 3);
    if (b.contains("refine_factor"))
      cb.refine_factor = as_count(b["refine_factor"], "converge.refine_factor", 2);
    c.converge = cb;
  }
  if (doc.contains("holder")) {
    const json& b = block(doc, "holder");
    reject_unknown(b, "holder", {"q", "lags"});
    HolderBlock hb;
    if (b.contains("q")) {
      hb.q = as_real(b["q"], "holder.q");
      if (!(hb.q > 0.0)) throw ConfigError("holder.q", "must be positive");
    }
    if (b.contains("lags")) {
      hb.lags = as_list<std::size_t>(b["lags"], "holder.lags", [](const json& v, const std::string& k) {
        return as_count(v, k, 1);
      });
      if (hb.lags.size() < 3) throw ConfigError("holder.lags", "needs at least 3 lags");
      if (std::adjacent_find(hb.lags.begin(), hb.lags.end(),
                             [](auto a, auto b) { return a >= b; }) != hb.lags.end())
        throw ConfigError("holder.lags", "lags must be strictly increasing");
      if (hb.lags.back() > c.N / 4) throw ConfigError("holder.lags", "largest lag exceeds N/4");
    }
    c.holder = hb;
  }
  if (doc.contains("acf")) {
    const json& b = block(doc, "acf");
    reject_unknown(b, "acf", {"max_lag"});
    AcfBlock ab;
    if (b.contains("max_lag")) ab.max_lag = as_count(b["max_lag"], "acf.max_lag", 0);
    if (2 * ab.max_lag >= c.N) throw ConfigError("acf.max_lag", "must be below N/2");
    c.acf = ab;
  }
  if (doc.contains("moments")) {
    const json& b = block(doc, "moments");
    reject_unknown(b, "moments", {"p", "nodes"});
    MomentsBlock mb;
    if (b.contains("p")) {
      mb.p = as_list<double>(b["p"], "moments.p", [](const json& v, const std::string& k) {
        const double p = as_real(v, k);
        if (!(p >= 0.0)) throw ConfigError(k, "moment order must be nonnegative");
        return p;
      });
    }
    if (b.contains("nodes")) {
      const std::size_t n = c.N;
      mb.nodes = as_list<std::size_t>(b["nodes"], "moments.nodes",
                                      [n](const json& v, const std::string& k) {
                                        const std::size_t node = as_count(v, k, 0);
                                        if (node > n) throw ConfigError(k, "node beyond N");
                                        return node;
                                      });
    }
    c.moments = mb;
  }

  // Instantiate the model functions now so bad parameters surface as config errors.
  build_simulation(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open configuration file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  const auto fn = [](const FunctionSpec& f) {
    return json{{"name", f.name}, {"params", f.params}};
  };
  json doc{{"process", c.process}, {"hurst", fn(c.hurst)}, {"T", c.T},
           {"N", c.N},             {"seed", c.seed},      {"n_paths", c.n_paths}};
  if (c.dampening) doc["dampening"] = fn(*c.dampening);
  if (c.label) doc["label"] = *c.label;
  if (c.converge)
    doc["converge"] = {{"levels", c.converge->levels},
                       {"refine_factor", c.converge->refine_factor}};
  if (c.holder) {
    doc["holder"] = {{"q", c.holder->q}};
    if (!c.holder->lags.empty()) doc["holder"]["lags"] = c.holder->lags;
  }
  if (c.acf) doc["acf"] = {{"max_lag", c.acf->max_lag}};
  if (c.moments) {
    doc["moments"] = {{"p", c.moments->p}};
    if (!c.moments->nodes.empty()) doc["moments"]["nodes"] = c.moments->nodes;
  }
  return doc;
}

SimulationConfig build_simulation(const ExperimentConfig& c) {
  std::optional<HurstFunction> hurst;
  try {
    hurst = builtin_hurst(c.hurst.name, c.hurst.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("hurst", e.what());
  }
  std::optional<DampeningFunction> dampening;
  if (c.dampening) {
    try {
      dampening = builtin_dampening(c.dampening->name, c.dampening->params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("dampening", e.what());
    }
  }
  return SimulationConfig(TimeGrid(c.T, c.N), KernelParams(*hurst, dampening, c.T),
                          Seed{c.seed}, c.n_paths);
}

}  // namespace sem::cli
