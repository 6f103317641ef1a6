#include "favar/cli/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

namespace favar::cli {
namespace {

using nlohmann::json;

// Every key the config file may carry. Anything else is a typo we refuse to
// guess about.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "panel_csv",     "manifest_csv", "ffill_limit",
      "method",        "var_spec",     "K",
      "L",             "activation",   "leaky_a",
      "lambda0",       "lambda1",      "hard_zero_anchors",
      "anchor_groups", "epochs",       "batch_size",
      "learning_rate", "P",            "sample_xi",
      "n_burn",        "n_draws",      "thin",
      "horizons",      "first_origin", "irf_target",
      "irf_size",      "irf_horizons", "irf_times",
      "irf_mean_lambda", "crossval",   "seed",
      "out_dir"};
  return keys;
}

const std::set<std::string>& known_cv_keys() {
  static const std::set<std::string> keys = {
      "Ks",       "Ls",    "activations",   "lambda0s", "lambda1s",
      "folds",    "epochs", "blocked_folds"};
  return keys;
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": config must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (known_keys().count(key) == 0) {
      throw ConfigError(path + ": unknown config key '" + key + "'");
    }
  }

  RunConfig cfg;
  read_field(j, "panel_csv", cfg.panel_csv);
  read_field(j, "manifest_csv", cfg.manifest_csv);
  read_field(j, "ffill_limit", cfg.ffill_limit);
  read_field(j, "method", cfg.method);
  read_field(j, "var_spec", cfg.var_spec);
  read_field(j, "K", cfg.K);
  read_field(j, "L", cfg.L);
  read_field(j, "activation", cfg.activation);
  read_field(j, "leaky_a", cfg.leaky_a);
  read_field(j, "lambda0", cfg.lambda0);
  read_field(j, "lambda1", cfg.lambda1);
  read_field(j, "hard_zero_anchors", cfg.hard_zero_anchors);
  read_field(j, "anchor_groups", cfg.anchor_groups);
  read_field(j, "epochs", cfg.epochs);
  read_field(j, "batch_size", cfg.batch_size);
  read_field(j, "learning_rate", cfg.learning_rate);
  read_field(j, "P", cfg.P);
  read_field(j, "sample_xi", cfg.sample_xi);
  read_field(j, "n_burn", cfg.n_burn);
  read_field(j, "n_draws", cfg.n_draws);
  read_field(j, "thin", cfg.thin);
  read_field(j, "horizons", cfg.horizons);
  read_field(j, "first_origin", cfg.first_origin);
  read_field(j, "irf_target", cfg.irf_target);
  read_field(j, "irf_size", cfg.irf_size);
  read_field(j, "irf_horizons", cfg.irf_horizons);
  read_field(j, "irf_times", cfg.irf_times);
  read_field(j, "irf_mean_lambda", cfg.irf_mean_lambda);
  read_field(j, "seed", cfg.seed);
  read_field(j, "out_dir", cfg.out_dir);

  if (j.contains("crossval")) {
    const json& cv = j.at("crossval");
    if (!cv.is_object()) {
      throw ConfigError(path + ": 'crossval' must be an object");
    }
    for (const auto& [key, value] : cv.items()) {
      (void)value;
      if (known_cv_keys().count(key) == 0) {
        throw ConfigError(path + ": unknown crossval key '" + key + "'");
      }
    }
    read_field(cv, "Ks", cfg.cv_Ks);
    read_field(cv, "Ls", cfg.cv_Ls);
    read_field(cv, "activations", cfg.cv_activations);
    read_field(cv, "lambda0s", cfg.cv_lambda0s);
    read_field(cv, "lambda1s", cfg.cv_lambda1s);
    read_field(cv, "folds", cfg.cv_folds);
    read_field(cv, "blocked_folds", cfg.cv_blocked_folds);
    read_field(cv, "epochs", cfg.cv_epochs);
  }

  if (!j.contains("seed")) {
    throw ConfigError(path + ": 'seed' is required; runs never self-seed");
  }
  if (cfg.seed < 0) throw ConfigError(path + ": 'seed' must be >= 0");
  return cfg;
}

factors::FactorMethod method_of(const RunConfig& cfg) {
  try {
    return factors::method_from_name(cfg.method);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

gsae::ActivationChoice parse_activation(const std::string& text) {
  gsae::ActivationChoice choice;
  std::string name = text;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    name = text.substr(0, colon);
    try {
      choice.leaky_a = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad activation parameter in '" + text + "'");
    }
  }
  if (name == "tanh") {
    choice.act = gsae::Activation::kTanh;
    choice.leaky_a = 0.0;
  } else if (name == "leaky_relu") {
    choice.act = gsae::Activation::kLeakyRelu;
  } else {
    throw ConfigError("activation must be tanh or leaky_relu, got '" + text +
                      "'");
  }
  return choice;
}

gsae::ActivationChoice activation_of(const RunConfig& cfg) {
  gsae::ActivationChoice choice = parse_activation(cfg.activation);
  if (choice.act == gsae::Activation::kLeakyRelu &&
      cfg.activation.find(':') == std::string::npos) {
    choice.leaky_a = cfg.leaky_a;
  }
  return choice;
}

void check_var_spec(const RunConfig& cfg) {
  if (cfg.var_spec != "tiv" && cfg.var_spec != "tvp") {
    throw ConfigError("var_spec must be tiv or tvp, got '" + cfg.var_spec +
                      "'");
  }
}

forecast::PipelineConfig pipeline_config(const RunConfig& cfg) {
  check_var_spec(cfg);
  forecast::PipelineConfig p;
  p.method = method_of(cfg);
  p.K = cfg.K;
  p.L = cfg.L;
  const gsae::ActivationChoice act = activation_of(cfg);
  p.activation = act.act;
  p.leaky_a = act.leaky_a;
  p.lambda0 = cfg.lambda0;
  p.lambda1 = cfg.lambda1;
  p.hard_zero_anchors = cfg.hard_zero_anchors;
  p.anchor_count = static_cast<int>(cfg.anchor_groups.size());
  p.train.epochs = cfg.epochs;
  p.train.batch_size = cfg.batch_size;
  p.train.adam.lr = cfg.learning_rate;
  p.var_spec = cfg.var_spec;
  p.P = cfg.P;
  p.sample_xi = cfg.sample_xi;
  p.n_burn = cfg.n_burn;
  p.n_draws = cfg.n_draws;
  p.thin = cfg.thin;
  p.horizons = cfg.horizons;
  p.first_origin = cfg.first_origin;
  return p;
}

gsae::CvGrids cv_grids(const RunConfig& cfg) {
  gsae::CvGrids g;
  g.Ks = cfg.cv_Ks;
  g.Ls = cfg.cv_Ls;
  for (const auto& a : cfg.cv_activations) {
    g.activations.push_back(parse_activation(a));
  }
  g.lambda0s = cfg.cv_lambda0s;
  g.lambda1s = cfg.cv_lambda1s;
  g.n_folds = cfg.cv_folds;
  g.blocked_folds = cfg.cv_blocked_folds;
  g.train.epochs = cfg.cv_epochs;
  g.train.batch_size = cfg.batch_size;
  g.train.adam.lr = cfg.learning_rate;
  return g;
}

std::string canonical_config(const RunConfig& cfg) {
  json j;
  j["panel_csv"] = cfg.panel_csv;
  j["manifest_csv"] = cfg.manifest_csv;
  j["ffill_limit"] = cfg.ffill_limit;
  j["method"] = cfg.method;
  j["var_spec"] = cfg.var_spec;
  j["K"] = cfg.K;
  j["L"] = cfg.L;
  j["activation"] = cfg.activation;
  j["leaky_a"] = cfg.leaky_a;
  j["lambda0"] = cfg.lambda0;
  j["lambda1"] = cfg.lambda1;
  j["hard_zero_anchors"] = cfg.hard_zero_anchors;
  j["anchor_groups"] = cfg.anchor_groups;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["P"] = cfg.P;
  j["sample_xi"] = cfg.sample_xi;
  j["n_burn"] = cfg.n_burn;
  j["n_draws"] = cfg.n_draws;
  j["thin"] = cfg.thin;
  j["horizons"] = cfg.horizons;
  j["first_origin"] = cfg.first_origin;
  j["irf_target"] = cfg.irf_target;
  j["irf_size"] = cfg.irf_size;
  j["irf_horizons"] = cfg.irf_horizons;
  j["irf_times"] = cfg.irf_times;
  j["irf_mean_lambda"] = cfg.irf_mean_lambda;
  j["crossval"] = {{"Ks", cfg.cv_Ks},
                   {"Ls", cfg.cv_Ls},
                   {"activations", cfg.cv_activations},
                   {"lambda0s", cfg.cv_lambda0s},
                   {"lambda1s", cfg.cv_lambda1s},
                   {"folds", cfg.cv_folds},
                   {"blocked_folds", cfg.cv_blocked_folds},
                   {"epochs", cfg.cv_epochs}};
  j["seed"] = cfg.seed;
  return j.dump();  // object keys are sorted, so the text is canonical
}

std::string config_hash(const RunConfig& cfg) {
  // FNV-1a 64 over the canonical text.
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace favar::cli
