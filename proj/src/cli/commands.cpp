#include "favar/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "favar/cli/artifacts.hpp"
#include "favar/errors.hpp"
#include "favar/forecast/expanding.hpp"
#include "favar/gsae/crossval.hpp"
#include "favar/gsae/serialize.hpp"
#include "favar/gsae/train.hpp"
#include "favar/factors/extraction.hpp"
#include "favar/factors/loadings.hpp"
#include "favar/io/csv.hpp"
#include "favar/irf/irf.hpp"
#include "favar/rng.hpp"
#include "favar/var/tiv.hpp"
#include "favar/var/tvp.hpp"

namespace favar::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fixed substream per stage, so adding draws to one stage never shifts
// another stage's randomness.
enum Stream : int {
  kStreamCrossval = 1,
  kStreamTrain = 2,
  kStreamLoadings = 3,
  kStreamVar = 4,
  kStreamForecast = 5,
};

Matrix x_block(const Panel& panel) {
  const auto idx = panel.x_indices();
  Matrix X(panel.rows(), static_cast<int>(idx.size()));
  for (int c = 0; c < X.cols(); ++c) X.col(c) = panel.values.col(idx[c]);
  return X;
}

Matrix y_block(const Panel& panel) {
  const auto idx = panel.y_indices();
  Matrix Y(panel.rows(), static_cast<int>(idx.size()));
  for (int c = 0; c < Y.cols(); ++c) Y.col(c) = panel.values.col(idx[c]);
  return Y;
}

std::vector<int> x_groups(const Panel& panel) {
  std::vector<int> g;
  for (int j : panel.x_indices()) g.push_back(panel.specs[j].group);
  return g;
}

// Group index -> manifest label, scanning panel_x columns in order.
std::vector<std::string> group_labels(const Panel& panel) {
  std::vector<std::string> labels(panel.n_groups());
  std::vector<bool> seen(labels.size(), false);
  for (int j : panel.x_indices()) {
    const auto& s = panel.specs[j];
    if (!seen[s.group]) {
      labels[s.group] = s.group_label;
      seen[s.group] = true;
    }
  }
  return labels;
}

// Every stage stamps its outputs with the config identity; a consumer can
// tell at a glance which run produced a file.
std::vector<std::string> std_preamble(const RunConfig& cfg,
                                      const std::string& hash) {
  return {"config_hash=" + hash, "seed=" + std::to_string(cfg.seed)};
}

struct StageContext {
  std::string out;
  std::string hash;
  RunManifest manifest;
};

// Opens the artifact directory for one stage. prepare owns the ledger: a
// config change resets it (downstream entries die with it). Every other
// stage only verifies its upstream dependencies and appends.
StageContext begin_stage(const RunConfig& cfg, const std::string& out,
                         const std::string& stage,
                         const std::vector<std::string>& deps) {
  fs::create_directories(out);
  StageContext ctx{out, config_hash(cfg), load_manifest(out)};
  if (stage == "prepare") {
    if (ctx.manifest.config_hash != ctx.hash) {
      ctx.manifest = RunManifest{ctx.hash, cfg.seed, {}};
    }
    ctx.manifest.seed = cfg.seed;
  } else {
    for (const auto& dep : deps) {
      require_stage(ctx.manifest, out, dep, ctx.hash);
    }
  }
  return ctx;
}

void end_stage(StageContext& ctx, const std::string& stage,
               const std::vector<std::string>& files) {
  record_stage(ctx.manifest, ctx.out, stage, files);
  save_manifest(ctx.out, ctx.manifest);
}

// JSON sidecar for binary artifacts, carrying the identity the binary
// format itself has no room for.
void write_meta(const std::string& path, const RunConfig& cfg,
                const std::string& hash,
                const std::vector<std::pair<std::string, std::string>>& extra) {
  json j;
  j["config_hash"] = hash;
  j["seed"] = cfg.seed;
  for (const auto& [k, v] : extra) j[k] = v;
  std::ofstream f(path, std::ios::trunc);
  f << j.dump(2) << "\n";
  if (!f) throw Error("cannot write " + path);
}

double pearson(const Vector& a, const Vector& b) {
  const double n = static_cast<double>(a.size());
  const double ma = a.mean(), mb = b.mean();
  const double cov = ((a.array() - ma) * (b.array() - mb)).sum() / n;
  const double va = (a.array() - ma).square().sum() / n;
  const double vb = (b.array() - mb).square().sum() / n;
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

std::vector<std::string> factor_names(const factors::FactorSet& fset,
                                      const Panel& panel) {
  std::vector<std::string> names;
  if (static_cast<int>(fset.anchor_names.size()) == fset.K()) {
    names = fset.anchor_names;
  } else {
    for (int k = 0; k < fset.K(); ++k) names.push_back("f" + std::to_string(k + 1));
  }
  for (int j : panel.y_indices()) names.push_back(panel.specs[j].name);
  return names;
}

bool is_autoencoder(const RunConfig& cfg) {
  return method_of(cfg) != factors::FactorMethod::kPca;
}

}  // namespace

RunConfig effective_config(RunConfig cfg, const CliOverrides& o) {
  if (o.seed >= 0) cfg.seed = o.seed;
  if (!o.method.empty()) cfg.method = o.method;
  if (!o.var_spec.empty()) cfg.var_spec = o.var_spec;
  if (cfg.seed < 0) throw ConfigError("'seed' is required; runs never self-seed");

  // Fail on nonsense before any data or artifact is touched.
  method_of(cfg);
  check_var_spec(cfg);
  activation_of(cfg);
  for (const auto& a : cfg.cv_activations) parse_activation(a);
  auto positive = [](int v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
  };
  positive(cfg.K, "K");
  positive(cfg.L, "L");
  positive(cfg.P, "P");
  positive(cfg.epochs, "epochs");
  positive(cfg.batch_size, "batch_size");
  positive(cfg.n_draws, "n_draws");
  positive(cfg.thin, "thin");
  positive(cfg.horizons, "horizons");
  positive(cfg.irf_horizons, "irf_horizons");
  if (cfg.n_burn < 0) throw ConfigError("n_burn must be >= 0");
  if (cfg.first_origin < 0) throw ConfigError("first_origin must be >= 0");
  if (cfg.ffill_limit < 0) throw ConfigError("ffill_limit must be >= 0");
  if (cfg.cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  return cfg;
}

std::string resolve_out_dir(const RunConfig& cfg, const CliOverrides& o) {
  const char* env = std::getenv("FAVAR_ARTIFACTS");
  if (!o.out.empty()) return o.out;
  if (!cfg.out_dir.empty()) {
    fs::path p(cfg.out_dir);
    if (p.is_relative() && env && *env) return (fs::path(env) / p).string();
    return cfg.out_dir;
  }
  if (env && *env) return (fs::path(env) / "run").string();
  throw ConfigError(
      "no artifact directory: pass --out, set out_dir in the config, or "
      "export FAVAR_ARTIFACTS");
}

void cmd_prepare(const RunConfig& cfg, const std::string& out) {
  if (cfg.panel_csv.empty() || cfg.manifest_csv.empty()) {
    throw ConfigError("prepare needs panel_csv and manifest_csv");
  }
  // Anchor labels are config, so a typo is a config error, not a data one.
  const auto specs = read_manifest(cfg.manifest_csv);
  std::set<std::string> labels;
  for (const auto& s : specs) {
    if (s.role == Role::kPanelX) labels.insert(s.group_label);
  }
  for (const auto& g : cfg.anchor_groups) {
    if (!labels.count(g)) {
      throw ConfigError("anchor group '" + g + "' is not a panel group");
    }
  }

  Panel panel = load_panel(cfg.panel_csv, cfg.manifest_csv, cfg.ffill_limit);
  if (!cfg.anchor_groups.empty()) promote_anchor_groups(panel, cfg.anchor_groups);

  auto ctx = begin_stage(cfg, out, "prepare", {});
  write_panel_artifact(out, panel, std_preamble(cfg, ctx.hash));
  end_stage(ctx, "prepare", {"panel.csv", "panel_audit.csv"});
}

void cmd_crossval(const RunConfig& cfg, const std::string& out) {
  auto ctx = begin_stage(cfg, out, "crossval", {"prepare"});
  const Panel panel = read_panel_artifact(out);
  const Matrix X = x_block(panel);

  auto grids = cv_grids(cfg);
  const bool anchored = !cfg.anchor_groups.empty();
  RngStream rng(static_cast<std::uint64_t>(cfg.seed), kStreamCrossval);
  const auto res = gsae::cross_validate(X, x_groups(panel), panel.n_groups(),
                                        anchored, cfg.hard_zero_anchors, grids,
                                        rng);

  const auto preamble = std_preamble(cfg, ctx.hash);
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : res.stage1) {
    rows.push_back({std::to_string(c.K), std::to_string(c.L),
                    grids.activations[c.activation_index].label(),
                    io::format_double(c.val_recon_mse),
                    io::format_double(c.val_total_loss)});
  }
  io::write_csv(out + "/crossval_arch.csv",
                {"K", "L", "activation", "val_recon_mse", "val_total_loss"},
                rows, preamble);

  rows.clear();
  for (const auto& c : res.stage2) {
    rows.push_back({io::format_double(c.lambda0), io::format_double(c.lambda1),
                    io::format_double(c.val_recon_mse),
                    io::format_double(c.val_total_loss)});
  }
  io::write_csv(out + "/crossval_ssl.csv",
                {"lambda0", "lambda1", "val_recon_mse", "val_total_loss"}, rows,
                preamble);

  json best;
  best["config_hash"] = ctx.hash;
  best["seed"] = cfg.seed;
  best["K"] = res.best_K;
  best["L"] = res.best_L;
  best["activation"] = res.best_activation.label();
  best["lambda0"] = res.best_lambda0;
  best["lambda1"] = res.best_lambda1;
  std::ofstream f(out + "/crossval_best.json", std::ios::trunc);
  f << best.dump(2) << "\n";
  if (!f) throw Error("cannot write " + out + "/crossval_best.json");

  end_stage(ctx, "crossval",
            {"crossval_arch.csv", "crossval_ssl.csv", "crossval_best.json"});
}

void cmd_train(const RunConfig& cfg, const std::string& out) {
  if (!is_autoencoder(cfg)) {
    throw ConfigError("train applies to autoencoder methods; pca has nothing to fit");
  }
  auto ctx = begin_stage(cfg, out, "train", {"prepare"});
  const Panel panel = read_panel_artifact(out);
  const Matrix X = x_block(panel);

  const auto pcfg = pipeline_config(cfg);
  const auto setup = forecast::window_gsae_setup(
      static_cast<int>(X.cols()), x_groups(panel), panel.n_groups(), pcfg);
  RngStream rng(static_cast<std::uint64_t>(cfg.seed), kStreamTrain);
  const auto fit = gsae::train(X, setup.arch, setup.ssl, pcfg.train, rng);

  gsae::save_params(out + "/model.bin", fit.params);
  write_meta(out + "/model.bin.meta.json", cfg, ctx.hash,
             {{"method", cfg.method}});

  std::vector<std::vector<std::string>> rows;
  for (size_t e = 0; e < fit.trace.total.size(); ++e) {
    rows.push_back({std::to_string(e + 1),
                    io::format_double(fit.trace.total[e]),
                    io::format_double(fit.trace.reconstruction[e]),
                    io::format_double(fit.trace.regularization[e])});
  }
  io::write_csv(out + "/train_trace.csv",
                {"epoch", "total", "reconstruction", "regularization"}, rows,
                std_preamble(cfg, ctx.hash));

  end_stage(ctx, "train",
            {"model.bin", "model.bin.meta.json", "train_trace.csv"});
}

void cmd_factors(const RunConfig& cfg, const std::string& out) {
  std::vector<std::string> deps = {"prepare"};
  if (is_autoencoder(cfg)) deps.push_back("train");
  auto ctx = begin_stage(cfg, out, "factors", deps);
  const Panel panel = read_panel_artifact(out);
  const Matrix X = x_block(panel);
  const Matrix Y = y_block(panel);

  factors::FactorSet fset;
  if (!is_autoencoder(cfg)) {
    fset = factors::pca_factors(panel, cfg.K);
  } else {
    const auto params = gsae::load_params(out + "/model.bin");
    fset = gsae::extract_factors(params, X, Y, method_of(cfg));
  }

  // Rotate the observables' contemporaneous imprint out of the factors.
  // The slow block is summarized by its own principal components whatever
  // the full-panel extraction method was.
  std::vector<int> slow_cols;
  {
    int c = 0;
    for (int j : panel.x_indices()) {
      if (panel.specs[j].speed == Speed::kSlow) slow_cols.push_back(c);
      ++c;
    }
  }
  bool adjusted = false;
  if (!slow_cols.empty() && fset.M() > 0 && fset.K() > 0) {
    Matrix Xslow(X.rows(), static_cast<int>(slow_cols.size()));
    for (int c = 0; c < Xslow.cols(); ++c) Xslow.col(c) = X.col(slow_cols[c]);
    const int k_slow = std::min(cfg.K, static_cast<int>(slow_cols.size()));
    Matrix fslow = pca(Xslow, k_slow).scores;
    factors::standardize_factors(fslow);
    std::vector<int> degenerate;
    fset.latent = factors::slow_moving_adjust(fset.latent, fslow, Y, &degenerate);
    for (int d : degenerate) {
      if (std::find(fset.degenerate.begin(), fset.degenerate.end(), d) ==
          fset.degenerate.end()) {
        fset.degenerate.push_back(d);
      }
    }
    std::sort(fset.degenerate.begin(), fset.degenerate.end());
    adjusted = true;
  }

  const auto names = factor_names(fset, panel);
  auto preamble = std_preamble(cfg, ctx.hash);
  preamble.push_back(std::string("slow_adjust=") + (adjusted ? "on" : "off"));
  write_factor_artifact(out, fset, names, preamble);

  RngStream rng(static_cast<std::uint64_t>(cfg.seed), kStreamLoadings);
  const auto loadings =
      factors::gibbs_lambda_sigma(fset, X, cfg.n_burn, cfg.n_draws, rng);
  factors::save_loading_draws(out + "/loadings.bin", loadings);
  write_meta(out + "/loadings.bin.meta.json", cfg, ctx.hash, {});

  // Interpretability tables: which series each factor tracks, and how much
  // weight each group carries in each factor's loadings.
  Matrix lambda_bar = Matrix::Zero(loadings.lambda[0].rows(),
                                   loadings.lambda[0].cols());
  for (const auto& l : loadings.lambda) lambda_bar += l;
  lambda_bar /= static_cast<double>(loadings.count());

  const auto xi = panel.x_indices();
  std::vector<std::vector<std::string>> rows;
  for (int k = 0; k < fset.K(); ++k) {
    std::vector<std::pair<double, int>> scored;
    for (int c = 0; c < X.cols(); ++c) {
      scored.emplace_back(pearson(fset.latent.col(k), X.col(c)), c);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) {
                       return std::abs(a.first) > std::abs(b.first);
                     });
    const int top = std::min<int>(15, static_cast<int>(scored.size()));
    for (int r = 0; r < top; ++r) {
      rows.push_back({names[k], std::to_string(r + 1),
                      panel.specs[xi[scored[r].second]].name,
                      io::format_double(scored[r].first)});
    }
  }
  io::write_csv(out + "/corr_top15.csv",
                {"factor", "rank", "variable", "correlation"}, rows,
                std_preamble(cfg, ctx.hash));

  rows.clear();
  const auto labels = group_labels(panel);
  const auto groups = x_groups(panel);
  for (int c = 0; c < panel.n_groups(); ++c) {
    for (int k = 0; k < fset.K(); ++k) {
      double acc = 0.0;
      int count = 0;
      for (int j = 0; j < X.cols(); ++j) {
        if (groups[j] == c) {
          acc += std::abs(lambda_bar(j, k));
          ++count;
        }
      }
      rows.push_back({labels[c], names[k],
                      io::format_double(count > 0 ? acc / count : 0.0)});
    }
  }
  io::write_csv(out + "/b_matrix.csv", {"group", "factor", "importance"}, rows,
                std_preamble(cfg, ctx.hash));

  end_stage(ctx, "factors",
            {"factors.csv", "corr_top15.csv", "b_matrix.csv", "loadings.bin",
             "loadings.bin.meta.json"});
}

void cmd_estimate_var(const RunConfig& cfg, const std::string& out) {
  auto ctx = begin_stage(cfg, out, "estimate-var", {"prepare", "factors"});
  const auto fset = read_factor_artifact(out);
  const Matrix Z = fset.joint();

  RngStream rng(static_cast<std::uint64_t>(cfg.seed), kStreamVar);
  if (cfg.var_spec == "tiv") {
    auto prior = var::default_tiv_prior(Z, cfg.P);
    prior.sample_xi = cfg.sample_xi;
    const auto draws = var::gibbs_tiv(fset, prior, cfg.n_burn, cfg.n_draws, rng);
    var::save_tiv_draws(out + "/var_draws.bin", draws);
  } else {
    const auto prior = var::default_tvp_prior(Z, cfg.P);
    const auto draws =
        var::tvp_mcmc(fset, prior, cfg.n_burn, cfg.n_draws, cfg.thin, rng);
    var::save_tvp_draws(out + "/var_draws.bin", draws);
  }
  write_meta(out + "/var_draws.bin.meta.json", cfg, ctx.hash,
             {{"var_spec", cfg.var_spec}});

  end_stage(ctx, "estimate-var", {"var_draws.bin", "var_draws.bin.meta.json"});
}

void cmd_forecast(const RunConfig& cfg, const std::string& out,
                  const std::string& benchmark_dir) {
  auto ctx = begin_stage(cfg, out, "forecast", {"prepare"});
  const Panel panel = read_panel_artifact(out);
  const auto pcfg = pipeline_config(cfg);

  RngStream rng(static_cast<std::uint64_t>(cfg.seed), kStreamForecast);
  const auto run = forecast::run_expanding_window(panel, pcfg, rng);

  auto preamble = std_preamble(cfg, ctx.hash);
  preamble.push_back("method=" + cfg.method);
  preamble.push_back("var_spec=" + cfg.var_spec);
  forecast::write_forecast_csv(out + "/forecasts.csv", run, preamble);

  forecast::MetricTable table;
  std::vector<std::string> files = {"forecasts.csv", "metrics.csv",
                                    "metrics.json"};
  forecast::ForecastRun bench;
  const bool have_bench = !benchmark_dir.empty();
  if (have_bench) {
    bench = forecast::read_forecast_csv(benchmark_dir + "/forecasts.csv");
    table = forecast::compute_metrics(run, bench);
  } else {
    table = forecast::compute_metrics(run);
  }
  forecast::write_metrics_csv(out + "/metrics.csv", table, preamble);

  json j;
  j["config_hash"] = ctx.hash;
  j["seed"] = cfg.seed;
  j["method"] = cfg.method;
  j["var_spec"] = cfg.var_spec;
  j["variables"] = table.variables;
  j["horizons"] = table.horizons;
  j["n_records"] = run.records.size();
  j["discarded_draws"] = run.discarded_draws;
  json fails = json::array();
  for (const auto& [origin, reason] : run.failures) {
    fails.push_back({{"origin", origin}, {"reason", reason}});
  }
  j["failures"] = fails;
  for (int v = 0; v < static_cast<int>(table.variables.size()); ++v) {
    std::vector<double> mae(table.horizons), alpl(table.horizons);
    for (int h = 0; h < table.horizons; ++h) {
      mae[h] = table.mae(v, h);
      alpl[h] = table.alpl(v, h);
    }
    j["mae"][table.variables[v]] = mae;
    j["alpl"][table.variables[v]] = alpl;
    if (have_bench) {
      std::vector<double> rm(table.horizons), ra(table.horizons);
      for (int h = 0; h < table.horizons; ++h) {
        rm[h] = table.rel_mae(v, h);
        ra[h] = table.rel_alpl(v, h);
      }
      j["rel_mae"][table.variables[v]] = rm;
      j["rel_alpl"][table.variables[v]] = ra;
    }
  }
  std::ofstream f(out + "/metrics.json", std::ios::trunc);
  f << j.dump(2) << "\n";
  if (!f) throw Error("cannot write " + out + "/metrics.json");

  if (have_bench) {
    std::vector<std::vector<std::string>> rows;
    for (int h = 1; h <= run.horizons; ++h) {
      const auto cum = forecast::cumulative_alpl(run, bench, h);
      for (int r = 0; r < static_cast<int>(cum.origins.size()); ++r) {
        for (int v = 0; v < cum.values.cols(); ++v) {
          rows.push_back({std::to_string(h), std::to_string(cum.origins[r]),
                          run.variables[v], io::format_double(cum.values(r, v))});
        }
      }
    }
    io::write_csv(out + "/cumulative_alpl.csv",
                  {"horizon", "origin", "variable", "cumulative"}, rows,
                  preamble);
    files.push_back("cumulative_alpl.csv");
  }

  end_stage(ctx, "forecast", files);
}

void cmd_irf(const RunConfig& cfg, const std::string& out) {
  auto ctx =
      begin_stage(cfg, out, "irf", {"prepare", "factors", "estimate-var"});
  const Panel panel = read_panel_artifact(out);
  const auto fset = read_factor_artifact(out);
  const auto names = factor_column_names(out);
  const auto loadings = factors::load_loading_draws(out + "/loadings.bin");

  const int target_col = panel.column_of(cfg.irf_target);
  if (target_col < 0) {
    throw ConfigError("irf_target '" + cfg.irf_target + "' is not in the panel");
  }
  const auto yi = panel.y_indices();
  if (yi.empty()) throw ConfigError("irf needs at least one observable");
  if (panel.specs[yi.back()].name != cfg.irf_target) {
    throw BadOrdering("irf_target must be the last observable; '" +
                      panel.specs[yi.back()].name + "' closes the ordering");
  }

  irf::ShockSpec shock;
  shock.target = fset.K() + fset.M() - 1;
  shock.size_original = cfg.irf_size;
  shock.target_std = panel.std(target_col);
  const int horizons = cfg.irf_horizons;

  std::vector<int> times = cfg.irf_times;
  if (times.empty()) times = {panel.rows() - 1};

  Vector sigma_x(panel.x_indices().size());
  {
    int c = 0;
    for (int j : panel.x_indices()) sigma_x(c++) = panel.std(j);
  }

  irf::IrfResult var_res, panel_res;
  var_res.horizons = horizons;
  panel_res.horizons = horizons;
  var_res.times = times;
  panel_res.times = times;

  if (cfg.var_spec == "tiv") {
    const auto draws = var::load_tiv_draws(out + "/var_draws.bin");
    const auto var_irfs = irf::irf_var_draws(draws, shock, horizons);
    const auto var_summary = irf::summarize(var_irfs);
    const auto panel_summary = irf::summarize(irf::to_original_units(
        irf::irf_panel(var_irfs, loadings, cfg.irf_mean_lambda), sigma_x));
    var_res.summaries.assign(times.size(), var_summary);
    panel_res.summaries.assign(times.size(), panel_summary);
  } else {
    const auto draws = var::load_tvp_draws(out + "/var_draws.bin");
    for (int row : times) {
      // Panel row -> state-path row: path row 0 is the pre-sample state,
      // and observation 0 of the VAR sits at panel row P.
      const int tau = row - cfg.P + 1;
      if (tau < 0) {
        throw TimeOutOfRange("irf time " + std::to_string(row) +
                             " precedes the first VAR state (needs row >= " +
                             std::to_string(cfg.P - 1) + ")");
      }
      const auto var_irfs = irf::irf_var_draws(draws, tau, shock, horizons);
      var_res.summaries.push_back(irf::summarize(var_irfs));
      panel_res.summaries.push_back(irf::summarize(irf::to_original_units(
          irf::irf_panel(var_irfs, loadings, cfg.irf_mean_lambda), sigma_x)));
    }
  }

  auto preamble = std_preamble(cfg, ctx.hash);
  preamble.push_back("target=" + cfg.irf_target);
  preamble.push_back("size=" + io::format_double(cfg.irf_size));
  preamble.push_back("var_spec=" + cfg.var_spec);
  irf::write_irf_csv(out + "/irf_var.csv", var_res, names, preamble);

  std::vector<std::string> x_names;
  for (int j : panel.x_indices()) x_names.push_back(panel.specs[j].name);
  irf::write_irf_csv(out + "/irf_panel.csv", panel_res, x_names, preamble);

  end_stage(ctx, "irf", {"irf_var.csv", "irf_panel.csv"});
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NonFiniteValue*>(&e) ||
      dynamic_cast<const NotPositiveDefinite*>(&e) ||
      dynamic_cast<const RankDeficient*>(&e) ||
      dynamic_cast<const DofTooSmall*>(&e) ||
      dynamic_cast<const FilterBlewUp*>(&e) ||
      dynamic_cast<const ChainDiverged*>(&e) ||
      dynamic_cast<const DivergedLoss*>(&e) ||
      dynamic_cast<const ExplosiveForecast*>(&e)) {
    return 4;
  }
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const ShapeMismatch*>(&e) ||
      dynamic_cast<const KOutOfRange*>(&e) ||
      dynamic_cast<const EmptyGrid*>(&e) ||
      dynamic_cast<const UnstableSpec*>(&e) ||
      dynamic_cast<const BadOrdering*>(&e) ||
      dynamic_cast<const TimeOutOfRange*>(&e) ||
      dynamic_cast<const DrawCountMismatch*>(&e) ||
      dynamic_cast<const OriginMismatch*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const Error*>(&e)) return 3;  // data and artifact problems
  return 4;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Grouped-sparse factor model and Bayesian VAR pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  CliOverrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("-o,--out", ov.out, "artifact directory");
    sub->add_option("--seed", ov.seed, "override the config seed");
    sub->add_option("--method", ov.method,
                    "pca | plain_ae | gs_ae_linear | gs_ae_nonlinear");
    sub->add_option("--var-spec", ov.var_spec, "tiv | tvp");
  };

  CLI::App* prepare = app.add_subcommand(
      "prepare", "load, transform, and standardize the panel");
  CLI::App* crossval = app.add_subcommand(
      "crossval", "two-stage cross-validation over the autoencoder grids");
  CLI::App* train =
      app.add_subcommand("train", "fit the autoencoder on the full panel");
  CLI::App* factors = app.add_subcommand(
      "factors", "extract factors, adjust for the observables, sample loadings");
  CLI::App* estimate =
      app.add_subcommand("estimate-var", "posterior sampling of the VAR");
  CLI::App* fcast = app.add_subcommand(
      "forecast", "expanding-window point and density evaluation");
  CLI::App* irf_cmd = app.add_subcommand(
      "irf", "impulse responses of factors and panel to the policy shock");
  for (CLI::App* sub :
       {prepare, crossval, train, factors, estimate, fcast, irf_cmd}) {
    add_common(sub);
  }
  fcast->add_option("--benchmark", ov.benchmark,
                    "artifact directory of the run to compare against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = effective_config(load_run_config(config_path), ov);
    const std::string out = resolve_out_dir(cfg, ov);
    if (prepare->parsed()) {
      cmd_prepare(cfg, out);
    } else if (crossval->parsed()) {
      cmd_crossval(cfg, out);
    } else if (train->parsed()) {
      cmd_train(cfg, out);
    } else if (factors->parsed()) {
      cmd_factors(cfg, out);
    } else if (estimate->parsed()) {
      cmd_estimate_var(cfg, out);
    } else if (fcast->parsed()) {
      cmd_forecast(cfg, out, ov.benchmark);
    } else if (irf_cmd->parsed()) {
      cmd_irf(cfg, out);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "favar: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("favar");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace favar::cli
