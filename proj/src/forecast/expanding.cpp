#include "favar/forecast/expanding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "favar/gsae/train.hpp"
#include "favar/factors/extraction.hpp"
#include "favar/io/csv.hpp"

namespace favar::forecast {

GsAeSetup window_gsae_setup(int N, const std::vector<int>& group_of,
                            int n_groups, const PipelineConfig& cfg) {
  using factors::FactorMethod;
  if (cfg.method == FactorMethod::kPca) {
    throw ShapeMismatch("window_gsae_setup: pca has no autoencoder setup");
  }
  GsAeSetup s;
  s.ssl.lambda0 = cfg.lambda0;
  s.ssl.lambda1 = cfg.lambda1;
  s.ssl.hard_zero_anchors = cfg.hard_zero_anchors;
  if (cfg.method == FactorMethod::kPlainAe) {
    s.ssl.enabled = false;
    s.arch = gsae::GsAeArchitecture::mirrored(N, cfg.K, cfg.L, cfg.activation,
                                              cfg.leaky_a,
                                              std::vector<int>(N, 0), 1, 0);
  } else {
    // The linear variant keeps the depth and swaps the hidden activation for
    // the identity, which the slope-1 leaky unit provides exactly.
    const bool linear = cfg.method == FactorMethod::kGsAeLinear;
    s.arch = gsae::GsAeArchitecture::mirrored(
        N, cfg.K, cfg.L,
        linear ? gsae::Activation::kLeakyRelu : cfg.activation,
        linear ? 1.0 : cfg.leaky_a, group_of, n_groups, cfg.anchor_count);
  }
  return s;
}

factors::FactorSet fit_window_factors(const Matrix& X, const Matrix& Y,
                                      const std::vector<int>& group_of,
                                      int n_groups, const PipelineConfig& cfg,
                                      RngStream& rng) {
  if (cfg.method == factors::FactorMethod::kPca) {
    return factors::pca_factors(X, Y, cfg.K);
  }
  const GsAeSetup s =
      window_gsae_setup(static_cast<int>(X.cols()), group_of, n_groups, cfg);
  const gsae::TrainResult fit = gsae::train(X, s.arch, s.ssl, cfg.train, rng);
  return gsae::extract_factors(fit.params, X, Y, cfg.method);
}

namespace {

std::vector<int> x_group_of(const Panel& panel) {
  std::vector<int> g;
  for (int j : panel.x_indices()) g.push_back(panel.specs[j].group);
  return g;
}

}  // namespace

ForecastRun run_expanding_window(const Panel& panel, const PipelineConfig& cfg,
                                 RngStream& rng) {
  const int T = panel.rows();
  const std::vector<int> xi = panel.x_indices();
  const std::vector<int> yi = panel.y_indices();
  if (yi.empty()) {
    throw ShapeMismatch("run_expanding_window: panel has no observables");
  }
  if (cfg.horizons < 1) {
    throw ShapeMismatch("run_expanding_window: need horizons >= 1");
  }
  if (cfg.first_origin < 1 || cfg.first_origin > T - 2) {
    throw WindowTooShort(
        "run_expanding_window: first origin leaves no room to fit or score");
  }
  const Matrix raw = panel.destandardized();
  const std::vector<int> group_of = x_group_of(panel);
  const int n_groups = panel.n_groups();

  ForecastRun out;
  for (int j : yi) out.variables.push_back(panel.specs[j].name);
  out.horizons = cfg.horizons;

  for (int origin = cfg.first_origin; origin <= T - 2; ++origin) {
    RngStream origin_rng = rng.derive(static_cast<std::uint64_t>(origin));
    try {
      Matrix window = raw.topRows(origin + 1);
      Vector mu, sd;
      standardize_columns(window, mu, sd);

      Matrix Xw(window.rows(), static_cast<int>(xi.size()));
      for (std::size_t c = 0; c < xi.size(); ++c) Xw.col(c) = window.col(xi[c]);
      Matrix Yw(window.rows(), static_cast<int>(yi.size()));
      for (std::size_t c = 0; c < yi.size(); ++c) Yw.col(c) = window.col(yi[c]);

      RngStream fit_rng = origin_rng.derive(1);
      const factors::FactorSet fs =
          fit_window_factors(Xw, Yw, group_of, n_groups, cfg, fit_rng);

      RngStream var_rng = origin_rng.derive(2);
      var::TivDraws tiv;
      var::TvpDraws tvp;
      const bool is_tvp = cfg.var_spec == "tvp";
      if (is_tvp) {
        const var::TvpPrior prior = var::default_tvp_prior(fs.joint(), cfg.P);
        tvp = var::tvp_mcmc(fs, prior, cfg.n_burn, cfg.n_draws, cfg.thin,
                            var_rng);
      } else if (cfg.var_spec == "tiv") {
        var::TivPrior prior = var::default_tiv_prior(fs.joint(), cfg.P);
        prior.sample_xi = cfg.sample_xi;
        tiv = var::gibbs_tiv(fs, prior, cfg.n_burn, cfg.n_draws, var_rng);
      } else {
        throw ShapeMismatch("run_expanding_window: unknown var_spec " +
                            cfg.var_spec);
      }

      const Matrix joint = fs.joint();
      const Matrix history = joint.bottomRows(cfg.P);
      const int K = fs.K();

      const int max_h = std::min(cfg.horizons, T - 1 - origin);
      for (int h = 1; h <= max_h; ++h) {
        RngStream pred_rng = origin_rng.derive(100 + h);
        const PredictiveDraws pred =
            is_tvp ? simulate_predictive(tvp, history, h, pred_rng)
                   : simulate_predictive(tiv, history, h, pred_rng);
        out.discarded_draws += pred.discarded;

        ForecastRecord rec;
        rec.origin = origin;
        rec.horizon = h;
        const int M = static_cast<int>(yi.size());
        rec.realized.resize(M);
        rec.point.resize(M);
        rec.logpdf.resize(M);
        const Vector point = pred.point();
        for (int m = 0; m < M; ++m) {
          const int col = yi[m];
          rec.realized(m) = (raw(origin + h, col) - mu(col)) / sd(col);
          rec.point(m) = point(K + m);
          rec.logpdf(m) = pred.log_density(K + m, rec.realized(m));
        }
        out.records.push_back(std::move(rec));
      }
    } catch (const Error& e) {
      out.failures.emplace_back(origin, e.what());
    }
  }
  return out;
}

namespace {

// (origin, horizon) -> record index, also the canonical comparison order.
std::map<std::pair<int, int>, int> index_records(const ForecastRun& run) {
  std::map<std::pair<int, int>, int> idx;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const auto& r = run.records[i];
    idx[{r.origin, r.horizon}] = static_cast<int>(i);
  }
  return idx;
}

}  // namespace

MetricTable compute_metrics(const ForecastRun& run) {
  const int V = static_cast<int>(run.variables.size());
  const int H = run.horizons;
  MetricTable t;
  t.variables = run.variables;
  t.horizons = H;
  t.mae = Matrix::Zero(V, H);
  t.alpl = Matrix::Zero(V, H);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(H);
  for (const auto& r : run.records) {
    const int h = r.horizon - 1;
    t.mae.col(h) += (r.point - r.realized).cwiseAbs();
    t.alpl.col(h) += r.logpdf;
    counts(h) += 1;
  }
  for (int h = 0; h < H; ++h) {
    if (counts(h) > 0) {
      t.mae.col(h) /= counts(h);
      t.alpl.col(h) /= counts(h);
    }
  }
  return t;
}

MetricTable compute_metrics(const ForecastRun& run,
                            const ForecastRun& benchmark) {
  if (run.variables != benchmark.variables ||
      run.horizons != benchmark.horizons) {
    throw OriginMismatch("compute_metrics: runs cover different layouts");
  }
  const auto a = index_records(run);
  const auto b = index_records(benchmark);
  if (a.size() != b.size()) {
    throw OriginMismatch("compute_metrics: runs cover different origins");
  }
  for (const auto& [key, idx] : a) {
    (void)idx;
    if (!b.count(key)) {
      throw OriginMismatch("compute_metrics: runs cover different origins");
    }
  }
  MetricTable t = compute_metrics(run);
  const MetricTable bench = compute_metrics(benchmark);
  t.rel_mae = t.mae.cwiseQuotient(bench.mae);
  t.rel_alpl = t.alpl - bench.alpl;
  return t;
}

CumulativeAlpl cumulative_alpl(const ForecastRun& run,
                               const ForecastRun& benchmark, int h) {
  if (run.variables != benchmark.variables) {
    throw OriginMismatch("cumulative_alpl: runs cover different variables");
  }
  const auto a = index_records(run);
  const auto b = index_records(benchmark);
  CumulativeAlpl out;
  const int V = static_cast<int>(run.variables.size());
  std::vector<Vector> rows;
  Vector acc = Vector::Zero(V);
  for (const auto& [key, idx] : a) {
    if (key.second != h) continue;
    const auto it = b.find(key);
    if (it == b.end()) {
      throw OriginMismatch("cumulative_alpl: origin missing from benchmark");
    }
    acc += run.records[idx].logpdf - benchmark.records[it->second].logpdf;
    out.origins.push_back(key.first);
    rows.push_back(acc);
  }
  for (const auto& [key, idx] : b) {
    (void)idx;
    if (key.second == h && !a.count(key)) {
      throw OriginMismatch("cumulative_alpl: origin missing from run");
    }
  }
  out.values.resize(static_cast<int>(rows.size()), V);
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.values.row(static_cast<int>(i)) = rows[i].transpose();
  return out;
}

void write_forecast_csv(const std::string& path, const ForecastRun& run,
                        const std::vector<std::string>& preamble) {
  std::vector<std::string> header = {"origin", "horizon", "variable",
                                     "realized", "point", "logpdf"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : run.records) {
    for (std::size_t m = 0; m < run.variables.size(); ++m) {
      rows.push_back({std::to_string(r.origin), std::to_string(r.horizon),
                      run.variables[m],
                      io::format_double(r.realized(static_cast<int>(m))),
                      io::format_double(r.point(static_cast<int>(m))),
                      io::format_double(r.logpdf(static_cast<int>(m)))});
    }
  }
  io::write_csv(path, header, rows, preamble);
}

ForecastRun read_forecast_csv(const std::string& path) {
  const io::CsvTable t = io::read_csv(path);
  const int c_origin = t.column("origin"), c_horizon = t.column("horizon");
  const int c_var = t.column("variable"), c_real = t.column("realized");
  const int c_point = t.column("point"), c_lp = t.column("logpdf");
  if (c_origin < 0 || c_horizon < 0 || c_var < 0 || c_real < 0 ||
      c_point < 0 || c_lp < 0) {
    throw BadArtifact(path + ": not a forecast export (missing columns)");
  }
  auto num = [&](const std::string& cell, std::size_t r) {
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw BadArtifact(path + ": non-numeric cell '" + cell + "' in row " +
                        std::to_string(r + 2));
    }
  };

  // Rows carry one variable each; successive rows of one (origin, horizon)
  // pair rebuild the record's vectors in the layout order.
  ForecastRun run;
  std::map<std::string, int> var_index;
  std::map<std::pair<int, int>, std::map<int, std::array<double, 3>>> cells;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const int origin = static_cast<int>(num(row[c_origin], r));
    const int horizon = static_cast<int>(num(row[c_horizon], r));
    const std::string& name = row[c_var];
    auto it = var_index.find(name);
    if (it == var_index.end()) {
      it = var_index.emplace(name, static_cast<int>(run.variables.size())).first;
      run.variables.push_back(name);
    }
    auto& cell = cells[{origin, horizon}];
    if (!cell.emplace(it->second,
                      std::array<double, 3>{num(row[c_real], r),
                                            num(row[c_point], r),
                                            num(row[c_lp], r)})
             .second) {
      throw BadArtifact(path + ": duplicate entry for origin " +
                        std::to_string(origin) + ", horizon " +
                        std::to_string(horizon) + ", variable " + name);
    }
    run.horizons = std::max(run.horizons, horizon);
  }
  const int M = static_cast<int>(run.variables.size());
  for (const auto& [key, cell] : cells) {
    if (static_cast<int>(cell.size()) != M) {
      throw BadArtifact(path + ": origin " + std::to_string(key.first) +
                        ", horizon " + std::to_string(key.second) +
                        " misses variables");
    }
    ForecastRecord rec;
    rec.origin = key.first;
    rec.horizon = key.second;
    rec.realized = Vector(M);
    rec.point = Vector(M);
    rec.logpdf = Vector(M);
    for (const auto& [v, vals] : cell) {
      rec.realized(v) = vals[0];
      rec.point(v) = vals[1];
      rec.logpdf(v) = vals[2];
    }
    run.records.push_back(std::move(rec));
  }
  return run;
}

void write_metrics_csv(const std::string& path, const MetricTable& table,
                       const std::vector<std::string>& preamble) {
  const bool has_rel = table.rel_mae.size() > 0;
  std::vector<std::string> header = {"variable", "horizon", "mae", "alpl"};
  if (has_rel) {
    header.push_back("rel_mae");
    header.push_back("rel_alpl");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t v = 0; v < table.variables.size(); ++v) {
    for (int h = 0; h < table.horizons; ++h) {
      std::vector<std::string> row = {
          table.variables[v], std::to_string(h + 1),
          io::format_double(table.mae(static_cast<int>(v), h)),
          io::format_double(table.alpl(static_cast<int>(v), h))};
      if (has_rel) {
        row.push_back(io::format_double(table.rel_mae(static_cast<int>(v), h)));
        row.push_back(
            io::format_double(table.rel_alpl(static_cast<int>(v), h)));
      }
      rows.push_back(std::move(row));
    }
  }
  io::write_csv(path, header, rows, preamble);
}

}  // namespace favar::forecast
