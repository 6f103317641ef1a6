#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "favar/cli/artifacts.hpp"
#include "favar/cli/commands.hpp"
#include "favar/cli/config.hpp"
#include "favar/io/csv.hpp"
#include "favar/panel.hpp"
#include "favar/rng.hpp"
#include "support.hpp"

using namespace favar;
using nlohmann::json;
using testsupport::read_file;
using testsupport::write_file;

namespace {

int run(std::vector<std::string> args) { return cli::run_cli(args); }

// Eight-variable toy economy: two latent AR processes feed three slow price
// series, three fast rate series, and two observables, with FEDFUNDS last.
std::string toy_panel_csv(int T, unsigned seed) {
  RngStream rng(seed, 77);
  std::string text = "date,CPI_A,CPI_B,CPI_C,R_A,R_B,R_C,GDP,FEDFUNDS\n";
  double g = 0.0, r = 0.0;
  for (int t = 0; t < T; ++t) {
    g = 0.7 * g + rng.normal();
    r = 0.5 * r + rng.normal();
    const double cpi_a = 1.1 * g + 0.4 * rng.normal();
    const double cpi_b = 0.9 * g + 0.4 * rng.normal();
    const double cpi_c = -0.7 * g + 0.4 * rng.normal();
    const double r_a = 1.2 * r + 0.4 * rng.normal();
    const double r_b = -0.8 * r + 0.4 * rng.normal();
    const double r_c = 0.6 * r + 0.4 * rng.normal();
    const double gdp = g + 0.3 * r + 0.5 * rng.normal();
    const double fed = 2.5 * (0.6 * r + 0.2 * g) + 0.8 * rng.normal();
    text += std::to_string(1990 + t / 4) + "Q" + std::to_string(t % 4 + 1);
    for (double v : {cpi_a, cpi_b, cpi_c, r_a, r_b, r_c, gdp, fed}) {
      text += "," + io::format_double(v);
    }
    text += "\n";
  }
  return text;
}

const char* kToyManifest =
    "name,group,tcode,speed,role\n"
    "CPI_A,PRICES,1,slow,panel_x\n"
    "CPI_B,PRICES,1,slow,panel_x\n"
    "CPI_C,PRICES,1,slow,panel_x\n"
    "R_A,RATES,1,fast,panel_x\n"
    "R_B,RATES,1,fast,panel_x\n"
    "R_C,RATES,1,fast,panel_x\n"
    "GDP,OBS,1,slow,observable_y\n"
    "FEDFUNDS,OBS,1,fast,observable_y\n";

struct CliFixture {
  testsupport::TempDir tmp{"cli"};
  std::string panel_csv, manifest_csv;
  std::string config1;  // pca + tiv, the main chain
  std::string dirA, dirB;
  bool chain_ok = false;

  json base_config() const {
    json j;
    j["panel_csv"] = panel_csv;
    j["manifest_csv"] = manifest_csv;
    j["method"] = "pca";
    j["var_spec"] = "tiv";
    j["K"] = 2;
    j["L"] = 2;
    j["P"] = 2;
    j["n_burn"] = 50;
    j["n_draws"] = 100;
    j["thin"] = 2;
    j["horizons"] = 2;
    j["first_origin"] = 52;
    j["irf_target"] = "FEDFUNDS";
    j["irf_size"] = -1.0;
    j["irf_horizons"] = 6;
    j["irf_times"] = {59};
    j["epochs"] = 20;
    j["batch_size"] = 16;
    j["crossval"] = {{"Ks", {2}},
                     {"Ls", {2}},
                     {"activations", {"leaky_relu:1e-16"}},
                     {"lambda0s", {5.0}},
                     {"lambda1s", {0.5}},
                     {"folds", 3},
                     {"epochs", 3}};
    j["seed"] = 11;
    return j;
  }

  std::string write_config(const std::string& name, const json& j) const {
    const std::string path = tmp.file(name);
    write_file(path, j.dump(2) + "\n");
    return path;
  }
};

CliFixture& fixture() {
  static CliFixture f = [] {
    CliFixture fx;
    unsetenv("FAVAR_ARTIFACTS");
    fx.panel_csv = fx.tmp.file("panel_data.csv");
    fx.manifest_csv = fx.tmp.file("manifest.csv");
    write_file(fx.panel_csv, toy_panel_csv(60, 5));
    write_file(fx.manifest_csv, kToyManifest);
    fx.config1 = fx.write_config("config1.json", fx.base_config());
    fx.dirA = fx.tmp.file("runA");
    fx.dirB = fx.tmp.file("runB");
    return fx;
  }();
  return f;
}

// (time, horizon, variable) -> (q16, q50, q84)
using IrfTable =
    std::map<std::tuple<int, int, std::string>, std::array<double, 3>>;

IrfTable read_irf_table(const std::string& path) {
  const auto csv = io::read_csv(path);
  IrfTable table;
  for (const auto& row : csv.rows) {
    table[{std::stoi(row[0]), std::stoi(row[1]), row[2]}] = {
        std::stod(row[3]), std::stod(row[4]), std::stod(row[5])};
  }
  return table;
}

}  // namespace

TEST_CASE("cli: toy pipeline runs end to end and stamps its artifacts") {
  auto& f = fixture();
  for (const char* verb :
       {"prepare", "crossval", "factors", "estimate-var", "forecast", "irf"}) {
    CAPTURE(verb);
    REQUIRE(run({verb, "--config", f.config1, "--out", f.dirA}) == 0);
  }
  f.chain_ok = true;

  for (const char* name :
       {"panel.csv", "panel_audit.csv", "crossval_arch.csv",
        "crossval_ssl.csv", "crossval_best.json", "factors.csv",
        "corr_top15.csv", "b_matrix.csv", "loadings.bin",
        "loadings.bin.meta.json", "var_draws.bin", "var_draws.bin.meta.json",
        "forecasts.csv", "metrics.csv", "metrics.json", "irf_var.csv",
        "irf_panel.csv", "run_manifest.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(f.dirA + "/" + name));
  }

  // The panel artifact round-trips the directly loaded panel exactly.
  const Panel direct = load_panel(f.panel_csv, f.manifest_csv, 0);
  const Panel loaded = cli::read_panel_artifact(f.dirA);
  REQUIRE(loaded.rows() == direct.rows());
  REQUIRE(loaded.cols() == direct.cols());
  CHECK((loaded.values - direct.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.mean - direct.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.std - direct.std).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.dates == direct.dates);
  for (int j = 0; j < loaded.cols(); ++j) {
    CHECK(loaded.specs[j].name == direct.specs[j].name);
    CHECK(loaded.specs[j].group == direct.specs[j].group);
    CHECK(loaded.specs[j].speed == direct.specs[j].speed);
    CHECK(loaded.specs[j].role == direct.specs[j].role);
  }

  // One config hash stamps the manifest and every CSV preamble.
  const auto cfg = cli::effective_config(cli::load_run_config(f.config1), {});
  const std::string hash = cli::config_hash(cfg);
  const auto manifest = cli::load_manifest(f.dirA);
  CHECK(manifest.config_hash == hash);
  CHECK(manifest.seed == 11);
  for (const char* stage :
       {"prepare", "crossval", "factors", "estimate-var", "forecast", "irf"}) {
    CAPTURE(stage);
    CHECK(manifest.stages.count(stage) == 1);
  }
  for (const char* name :
       {"panel.csv", "factors.csv", "forecasts.csv", "irf_var.csv"}) {
    CAPTURE(name);
    const auto pre = cli::read_preamble(f.dirA + "/" + name);
    CHECK(pre.at("config_hash") == hash);
    CHECK(pre.at("seed") == "11");
  }
  const json best = json::parse(read_file(f.dirA + "/crossval_best.json"));
  CHECK(best.at("config_hash") == hash);
  CHECK(best.at("K") == 2);
  const json meta = json::parse(read_file(f.dirA + "/var_draws.bin.meta.json"));
  CHECK(meta.at("var_spec") == "tiv");

  // Factor artifact: 2 factors + 2 observables, default names.
  const auto fset = cli::read_factor_artifact(f.dirA);
  CHECK(fset.K() == 2);
  CHECK(fset.M() == 2);
  CHECK(fset.T() == direct.rows());
  CHECK(cli::factor_column_names(f.dirA) ==
        std::vector<std::string>{"f1", "f2", "GDP", "FEDFUNDS"});

  // Interpretability tables have the advertised shapes.
  const auto corr = io::read_csv(f.dirA + "/corr_top15.csv");
  CHECK(corr.header == std::vector<std::string>{"factor", "rank", "variable",
                                                "correlation"});
  CHECK(corr.rows.size() == 2 * 6);  // K factors x min(15, 6 x-variables)
  const auto bmat = io::read_csv(f.dirA + "/b_matrix.csv");
  CHECK(bmat.rows.size() == 2 * 2);  // groups x factors
  std::set<std::string> groups;
  for (const auto& row : bmat.rows) groups.insert(row[0]);
  CHECK(groups == std::set<std::string>{"PRICES", "RATES"});

  // Forecast artifact: origins 52..58, horizons up to 2, both observables.
  const auto fc = forecast::read_forecast_csv(f.dirA + "/forecasts.csv");
  CHECK(fc.variables == std::vector<std::string>{"GDP", "FEDFUNDS"});
  CHECK(fc.horizons == 2);
  CHECK(fc.records.size() == 13);  // 6 origins with 2 horizons + 1 with 1
  const json metrics = json::parse(read_file(f.dirA + "/metrics.json"));
  CHECK(metrics.at("mae").at("FEDFUNDS").size() == 2);
  CHECK(metrics.at("failures").empty());
}

TEST_CASE("cli: config problems exit with code 2") {
  auto& f = fixture();
  const std::string out = f.tmp.file("err_out");

  auto bad = f.base_config();
  bad["typo_key"] = 1;
  const std::string unknown = f.write_config("bad_unknown.json", bad);
  CHECK(run({"prepare", "--config", unknown, "--out", out}) == 2);

  bad = f.base_config();
  bad.erase("seed");
  const std::string unseeded = f.write_config("bad_seed.json", bad);
  CHECK(run({"prepare", "--config", unseeded, "--out", out}) == 2);

  bad = f.base_config();
  bad["var_spec"] = "markov";
  const std::string badvar = f.write_config("bad_var.json", bad);
  CHECK(run({"prepare", "--config", badvar, "--out", out}) == 2);

  bad = f.base_config();
  bad["crossval"]["activations"] = {"softplus"};
  const std::string badact = f.write_config("bad_act.json", bad);
  CHECK(run({"prepare", "--config", badact, "--out", out}) == 2);

  bad = f.base_config();
  bad["K"] = json::array({2});  // type mismatch
  const std::string badtype = f.write_config("bad_type.json", bad);
  CHECK(run({"prepare", "--config", badtype, "--out", out}) == 2);

  // Flag-level problems: bad override, absent flag, absent subcommand.
  CHECK(run({"prepare", "--config", f.config1, "--out", out, "--method",
             "magic"}) == 2);
  CHECK(run({"prepare"}) == 2);
  CHECK(run({}) == 2);
  CHECK(run({"transmogrify", "--config", f.config1}) == 2);

  // Nothing resolves an artifact directory.
  unsetenv("FAVAR_ARTIFACTS");
  CHECK(run({"prepare", "--config", f.config1}) == 2);

  CHECK(run({"--help"}) == 0);
}

TEST_CASE("cli: artifact directory resolution") {
  auto& f = fixture();
  cli::RunConfig cfg;
  cli::CliOverrides ov;

  unsetenv("FAVAR_ARTIFACTS");
  ov.out = "/x/flag";
  cfg.out_dir = "/x/cfg";
  CHECK(cli::resolve_out_dir(cfg, ov) == "/x/flag");

  ov.out.clear();
  CHECK(cli::resolve_out_dir(cfg, ov) == "/x/cfg");

  setenv("FAVAR_ARTIFACTS", f.tmp.file("envroot").c_str(), 1);
  CHECK(cli::resolve_out_dir(cfg, ov) == "/x/cfg");  // absolute wins over env
  cfg.out_dir = "sub";
  CHECK(cli::resolve_out_dir(cfg, ov) == f.tmp.file("envroot") + "/sub");
  cfg.out_dir.clear();
  CHECK(cli::resolve_out_dir(cfg, ov) == f.tmp.file("envroot") + "/run");
  unsetenv("FAVAR_ARTIFACTS");
  CHECK_THROWS_AS(cli::resolve_out_dir(cfg, ov), ConfigError);
}

TEST_CASE("cli: data and staleness problems exit with code 3") {
  auto& f = fixture();

  // Manifest names a series the data file does not carry.
  const std::string short_csv = f.tmp.file("short_panel.csv");
  {
    std::string text = toy_panel_csv(60, 5);
    // drop the FEDFUNDS column from the header and every row
    std::string out;
    for (size_t pos = 0; pos < text.size();) {
      const size_t eol = text.find('\n', pos);
      std::string line = text.substr(pos, eol - pos);
      out += line.substr(0, line.rfind(',')) + "\n";
      pos = eol + 1;
    }
    write_file(short_csv, out);
  }
  auto cfg_missing = f.base_config();
  cfg_missing["panel_csv"] = short_csv;
  const std::string missing = f.write_config("missing_var.json", cfg_missing);
  CHECK(run({"prepare", "--config", missing, "--out",
             f.tmp.file("missing_out")}) == 3);

  // Stage ordering: nothing has run in this directory yet.
  CHECK(run({"estimate-var", "--config", f.config1, "--out",
             f.tmp.file("cold_out")}) == 3);

  // Tampered upstream artifact.
  const std::string dirD = f.tmp.file("runD");
  REQUIRE(run({"prepare", "--config", f.config1, "--out", dirD}) == 0);
  {
    std::ofstream patch(dirD + "/panel.csv", std::ios::app);
    patch << "# trailing noise\n";
  }
  CHECK(run({"factors", "--config", f.config1, "--out", dirD}) == 3);

  // Re-running prepare heals the directory (deterministic bytes).
  REQUIRE(run({"prepare", "--config", f.config1, "--out", dirD}) == 0);
  CHECK(run({"factors", "--config", f.config1, "--out", dirD}) == 0);

  // A config change orphans artifacts made under the old one.
  auto cfg2 = f.base_config();
  cfg2["n_draws"] = 120;
  const std::string config2 = f.write_config("config2.json", cfg2);
  CHECK(run({"factors", "--config", config2, "--out", dirD}) == 3);

  // prepare under the new config resets the ledger for the directory.
  REQUIRE(run({"prepare", "--config", config2, "--out", dirD}) == 0);
  const auto manifest = cli::load_manifest(dirD);
  CHECK(manifest.stages.count("prepare") == 1);
  CHECK(manifest.stages.count("factors") == 0);
}

TEST_CASE("cli: reruns are byte-identical, wherever the artifacts live") {
  auto& f = fixture();
  REQUIRE(f.chain_ok);

  // Rerunning a stage in place rewrites the same bytes.
  const std::string before_f = read_file(f.dirA + "/factors.csv");
  const std::string before_v = read_file(f.dirA + "/var_draws.bin");
  const std::string before_fc = read_file(f.dirA + "/forecasts.csv");
  const std::string before_irf = read_file(f.dirA + "/irf_panel.csv");
  REQUIRE(run({"factors", "--config", f.config1, "--out", f.dirA}) == 0);
  REQUIRE(run({"estimate-var", "--config", f.config1, "--out", f.dirA}) == 0);
  REQUIRE(run({"forecast", "--config", f.config1, "--out", f.dirA}) == 0);
  REQUIRE(run({"irf", "--config", f.config1, "--out", f.dirA}) == 0);
  CHECK(read_file(f.dirA + "/factors.csv") == before_f);
  CHECK(read_file(f.dirA + "/var_draws.bin") == before_v);
  CHECK(read_file(f.dirA + "/forecasts.csv") == before_fc);
  CHECK(read_file(f.dirA + "/irf_panel.csv") == before_irf);

  // A second chain in a different directory reproduces every artifact.
  for (const char* verb :
       {"prepare", "crossval", "factors", "estimate-var", "forecast", "irf"}) {
    CAPTURE(verb);
    REQUIRE(run({verb, "--config", f.config1, "--out", f.dirB}) == 0);
  }
  for (const char* name :
       {"panel.csv", "panel_audit.csv", "crossval_arch.csv",
        "crossval_ssl.csv", "crossval_best.json", "factors.csv",
        "corr_top15.csv", "b_matrix.csv", "loadings.bin", "var_draws.bin",
        "forecasts.csv", "metrics.csv", "metrics.json", "irf_var.csv",
        "irf_panel.csv", "run_manifest.json"}) {
    CAPTURE(name);
    CHECK(read_file(f.dirA + "/" + name) == read_file(f.dirB + "/" + name));
  }
}

TEST_CASE("cli: benchmarking a run against itself gives the unit metrics") {
  auto& f = fixture();
  REQUIRE(f.chain_ok);

  REQUIRE(run({"forecast", "--config", f.config1, "--out", f.dirB,
               "--benchmark", f.dirA}) == 0);
  const json metrics = json::parse(read_file(f.dirB + "/metrics.json"));
  for (const auto& var : {"GDP", "FEDFUNDS"}) {
    for (const auto& v : metrics.at("rel_mae").at(var)) {
      CHECK(v.get<double>() == 1.0);
    }
    for (const auto& v : metrics.at("rel_alpl").at(var)) {
      CHECK(v.get<double>() == 0.0);
    }
  }

  const auto cum = io::read_csv(f.dirB + "/cumulative_alpl.csv");
  CHECK(cum.header == std::vector<std::string>{"horizon", "origin", "variable",
                                               "cumulative"});
  REQUIRE(!cum.rows.empty());
  for (const auto& row : cum.rows) {
    CHECK(std::stod(row[3]) == 0.0);
  }
}

TEST_CASE("cli: impulse responses pin the impact and map to the panel") {
  auto& f = fixture();
  REQUIRE(f.chain_ok);

  const Panel panel = cli::read_panel_artifact(f.dirA);
  const double sigma = panel.std(panel.column_of("FEDFUNDS"));
  const auto var_irf = read_irf_table(f.dirA + "/irf_var.csv");

  // Impact row: the shocked equation moves by size/sigma in model units with
  // zero posterior spread; everything ordered before it stays at zero.
  const auto own = var_irf.at({59, 0, "FEDFUNDS"});
  CHECK(own[0] == -1.0 / sigma);
  CHECK(own[1] == -1.0 / sigma);
  CHECK(own[2] == -1.0 / sigma);
  for (const auto& name : {"f1", "f2", "GDP"}) {
    const auto cell = var_irf.at({59, 0, name});
    CHECK(cell[0] == 0.0);
    CHECK(cell[1] == 0.0);
    CHECK(cell[2] == 0.0);
  }

  // Panel surface: every x variable at every horizon, bands ordered.
  const auto panel_irf = read_irf_table(f.dirA + "/irf_panel.csv");
  CHECK(panel_irf.size() == 6u * 7u);  // x variables x (horizons + 1)
  for (const auto& [key, q] : panel_irf) {
    CAPTURE(std::get<2>(key));
    CHECK(q[0] <= q[1]);
    CHECK(q[1] <= q[2]);
    CHECK(std::isfinite(q[0]));
    CHECK(std::isfinite(q[2]));
  }
}

TEST_CASE("cli: time-varying chain reports surfaces per requested time") {
  auto& f = fixture();
  auto cfg = f.base_config();
  cfg["var_spec"] = "tvp";
  cfg["n_burn"] = 20;
  cfg["n_draws"] = 30;
  cfg["thin"] = 1;
  cfg["irf_horizons"] = 5;
  cfg["irf_times"] = {1, 59};
  const std::string config = f.write_config("config_tvp.json", cfg);
  const std::string dirE = f.tmp.file("runE");
  for (const char* verb : {"prepare", "factors", "estimate-var", "irf"}) {
    CAPTURE(verb);
    REQUIRE(run({verb, "--config", config, "--out", dirE}) == 0);
  }
  const json meta = json::parse(read_file(dirE + "/var_draws.bin.meta.json"));
  CHECK(meta.at("var_spec") == "tvp");

  const auto table = read_irf_table(dirE + "/irf_var.csv");
  CHECK(table.size() == 2u * 6u * 4u);  // times x (horizons + 1) x variables
  CHECK(table.count({1, 0, "FEDFUNDS"}) == 1);
  CHECK(table.count({59, 5, "f1"}) == 1);
  // Parameters drift, so the two evaluation times disagree somewhere.
  bool differs = false;
  for (int h = 1; h <= 5; ++h) {
    for (const auto& name : {"f1", "f2", "GDP", "FEDFUNDS"}) {
      if (table.at({1, h, name})[1] != table.at({59, h, name})[1]) {
        differs = true;
      }
    }
  }
  CHECK(differs);

  // A requested row before the first VAR state is a configuration error.
  auto early = cfg;
  early["irf_times"] = {0};
  early["n_burn"] = 5;
  early["n_draws"] = 10;
  const std::string config_early = f.write_config("config_tvp0.json", early);
  const std::string dirE2 = f.tmp.file("runE2");
  for (const char* verb : {"prepare", "factors", "estimate-var"}) {
    REQUIRE(run({verb, "--config", config_early, "--out", dirE2}) == 0);
  }
  CHECK(run({"irf", "--config", config_early, "--out", dirE2}) == 2);
}

TEST_CASE("cli: the irf target must close the ordering") {
  auto& f = fixture();
  auto cfg = f.base_config();
  cfg["n_burn"] = 5;
  cfg["n_draws"] = 10;
  cfg["irf_target"] = "GDP";  // an observable, but not the last one
  const std::string config = f.write_config("config_gdp.json", cfg);
  const std::string dirG = f.tmp.file("runG");
  for (const char* verb : {"prepare", "factors", "estimate-var"}) {
    REQUIRE(run({verb, "--config", config, "--out", dirG}) == 0);
  }
  CHECK(run({"irf", "--config", config, "--out", dirG}) == 2);

  auto absent = cfg;
  absent["irf_target"] = "NOPE";
  const std::string config2 = f.write_config("config_nope.json", absent);
  const std::string dirG2 = f.tmp.file("runG2");
  for (const char* verb : {"prepare", "factors", "estimate-var"}) {
    REQUIRE(run({verb, "--config", config2, "--out", dirG2}) == 0);
  }
  CHECK(run({"irf", "--config", config2, "--out", dirG2}) == 2);
}

TEST_CASE("cli: autoencoder chain trains once and factors reuse the model") {
  auto& f = fixture();
  auto cfg = f.base_config();
  cfg["method"] = "gs_ae_nonlinear";
  cfg["n_burn"] = 10;
  cfg["n_draws"] = 20;
  const std::string config = f.write_config("config_ae.json", cfg);
  const std::string dirF = f.tmp.file("runF");

  REQUIRE(run({"prepare", "--config", config, "--out", dirF}) == 0);
  // factors before train: the model artifact is a hard dependency.
  CHECK(run({"factors", "--config", config, "--out", dirF}) == 3);

  REQUIRE(run({"train", "--config", config, "--out", dirF}) == 0);
  CHECK(std::filesystem::exists(dirF + "/model.bin"));
  const json meta = json::parse(read_file(dirF + "/model.bin.meta.json"));
  CHECK(meta.at("method") == "gs_ae_nonlinear");
  const auto trace = io::read_csv(dirF + "/train_trace.csv");
  CHECK(trace.rows.size() == 20);  // one row per epoch
  CHECK(trace.header ==
        std::vector<std::string>{"epoch", "total", "reconstruction",
                                 "regularization"});

  REQUIRE(run({"factors", "--config", config, "--out", dirF}) == 0);
  const auto fset = cli::read_factor_artifact(dirF);
  CHECK(fset.K() == 2);
  CHECK(fset.method == factors::FactorMethod::kGsAeNonlinear);

  // train is meaningless for the pca baseline.
  CHECK(run({"train", "--config", f.config1, "--out", dirF}) == 2);
}

TEST_CASE("cli: an empty cross-validation grid is a configuration error") {
  auto& f = fixture();
  auto cfg = f.base_config();
  cfg["crossval"]["Ks"] = json::array();
  const std::string config = f.write_config("config_empty.json", cfg);
  const std::string dirH = f.tmp.file("runH");
  REQUIRE(run({"prepare", "--config", config, "--out", dirH}) == 0);
  CHECK(run({"crossval", "--config", config, "--out", dirH}) == 2);
}

TEST_CASE("cli: overrides feed the config hash") {
  auto& f = fixture();
  const auto base = cli::load_run_config(f.config1);
  cli::CliOverrides none;
  cli::CliOverrides method;
  method.method = "gs_ae_linear";
  cli::CliOverrides seed;
  seed.seed = 12;
  const std::string h0 = cli::config_hash(cli::effective_config(base, none));
  CHECK(cli::config_hash(cli::effective_config(base, method)) != h0);
  CHECK(cli::config_hash(cli::effective_config(base, seed)) != h0);
  CHECK(cli::config_hash(cli::effective_config(base, none)) == h0);
}
