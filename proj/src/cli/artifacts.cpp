#include "favar/cli/artifacts.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "favar/io/csv.hpp"

namespace favar::cli {
namespace {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string manifest_path(const std::string& dir) {
  return (std::filesystem::path(dir) / "run_manifest.json").string();
}

double parse_number(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw BadArtifact(where + ": non-numeric cell '" + cell + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

}  // namespace

std::string file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), {});
  return fnv1a_hex(bytes);
}

RunManifest load_manifest(const std::string& dir) {
  const std::string path = manifest_path(dir);
  std::ifstream f(path, std::ios::binary);
  if (!f) return RunManifest{};
  json j;
  try {
    j = json::parse(f);
    RunManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<long long>();
    if (j.contains("stages")) {
      for (const auto& [stage, files] : j.at("stages").items()) {
        for (const auto& [name, hash] : files.items()) {
          m.stages[stage][name] = hash.get<std::string>();
        }
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw BadArtifact(path + ": " + e.what());
  }
}

void save_manifest(const std::string& dir, const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["stages"] = json::object();
  for (const auto& [stage, files] : m.stages) {
    json fj = json::object();
    for (const auto& [name, hash] : files) fj[name] = hash;
    j["stages"][stage] = std::move(fj);
  }
  const std::string path = manifest_path(dir);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << '\n';
}

void require_stage(const RunManifest& m, const std::string& dir,
                   const std::string& stage, const std::string& config_hash) {
  if (m.config_hash.empty()) {
    throw StaleArtifact(dir + ": no recorded runs; run prepare first");
  }
  if (m.config_hash != config_hash) {
    throw StaleArtifact(dir + ": artifacts were produced under config " +
                        m.config_hash + ", current config is " + config_hash +
                        "; re-run the pipeline from prepare");
  }
  const auto it = m.stages.find(stage);
  if (it == m.stages.end()) {
    throw StaleArtifact(dir + ": stage '" + stage +
                        "' has not run under this config");
  }
  for (const auto& [name, hash] : it->second) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
      throw StaleArtifact(path + ": recorded output is missing");
    }
    if (file_hash(path) != hash) {
      throw StaleArtifact(path + ": content changed since stage '" + stage +
                          "' ran");
    }
  }
}

void record_stage(RunManifest& m, const std::string& dir,
                  const std::string& stage,
                  const std::vector<std::string>& files) {
  std::map<std::string, std::string> rec;
  for (const auto& name : files) {
    rec[name] = file_hash((std::filesystem::path(dir) / name).string());
  }
  m.stages[stage] = std::move(rec);
}

void write_panel_artifact(const std::string& dir, const Panel& panel,
                          const std::vector<std::string>& preamble) {
  const std::filesystem::path root(dir);
  {
    std::vector<std::string> header = {"date"};
    for (const auto& s : panel.specs) header.push_back(s.name);
    std::vector<std::vector<std::string>> rows;
    for (int t = 0; t < panel.rows(); ++t) {
      std::vector<std::string> row;
      row.push_back(panel.dates.empty() ? std::to_string(t) : panel.dates[t]);
      for (int j = 0; j < panel.cols(); ++j) {
        row.push_back(io::format_double(panel.values(t, j)));
      }
      rows.push_back(std::move(row));
    }
    io::write_csv((root / "panel.csv").string(), header, rows, preamble);
  }
  {
    const std::vector<std::string> header = {"name", "group", "group_index",
                                             "tcode",  "speed", "role",
                                             "mean",  "std"};
    std::vector<std::vector<std::string>> rows;
    for (int j = 0; j < panel.cols(); ++j) {
      const VariableSpec& s = panel.specs[j];
      rows.push_back({s.name, s.group_label, std::to_string(s.group),
                      std::to_string(s.transform_code),
                      s.speed == Speed::kSlow ? "slow" : "fast",
                      s.role == Role::kPanelX ? "panel_x" : "observable_y",
                      io::format_double(panel.mean(j)),
                      io::format_double(panel.std(j))});
    }
    io::write_csv((root / "panel_audit.csv").string(), header, rows, preamble);
  }
}

Panel read_panel_artifact(const std::string& dir) {
  const std::filesystem::path root(dir);
  const std::string audit_path = (root / "panel_audit.csv").string();
  const std::string panel_path = (root / "panel.csv").string();
  const io::CsvTable audit = io::read_csv(audit_path);
  const io::CsvTable table = io::read_csv(panel_path);

  const int c_name = audit.column("name"), c_label = audit.column("group");
  const int c_gi = audit.column("group_index"), c_t = audit.column("tcode");
  const int c_sp = audit.column("speed"), c_role = audit.column("role");
  const int c_mean = audit.column("mean"), c_std = audit.column("std");
  if (c_name < 0 || c_label < 0 || c_gi < 0 || c_t < 0 || c_sp < 0 ||
      c_role < 0 || c_mean < 0 || c_std < 0) {
    throw BadArtifact(audit_path + ": not a panel audit table");
  }

  Panel p;
  const int N = static_cast<int>(audit.rows.size());
  p.mean = Vector(N);
  p.std = Vector(N);
  for (int j = 0; j < N; ++j) {
    const auto& row = audit.rows[j];
    VariableSpec s;
    s.name = row[c_name];
    s.group_label = row[c_label];
    s.group = static_cast<int>(parse_number(row[c_gi], audit_path));
    s.transform_code = static_cast<int>(parse_number(row[c_t], audit_path));
    if (row[c_sp] == "slow") {
      s.speed = Speed::kSlow;
    } else if (row[c_sp] == "fast") {
      s.speed = Speed::kFast;
    } else {
      throw BadArtifact(audit_path + ": bad speed '" + row[c_sp] + "'");
    }
    if (row[c_role] == "panel_x") {
      s.role = Role::kPanelX;
    } else if (row[c_role] == "observable_y") {
      s.role = Role::kObservableY;
    } else {
      throw BadArtifact(audit_path + ": bad role '" + row[c_role] + "'");
    }
    p.mean(j) = parse_number(row[c_mean], audit_path);
    p.std(j) = parse_number(row[c_std], audit_path);
    p.specs.push_back(std::move(s));
  }

  if (static_cast<int>(table.header.size()) != N + 1 ||
      table.header[0] != "date") {
    throw BadArtifact(panel_path + ": header does not match the audit table");
  }
  for (int j = 0; j < N; ++j) {
    if (table.header[j + 1] != p.specs[j].name) {
      throw BadArtifact(panel_path + ": column order differs from the audit");
    }
  }
  const int T = static_cast<int>(table.rows.size());
  if (T == 0) throw BadArtifact(panel_path + ": no rows");
  p.values = Matrix(T, N);
  for (int t = 0; t < T; ++t) {
    p.dates.push_back(table.rows[t][0]);
    for (int j = 0; j < N; ++j) {
      p.values(t, j) = parse_number(table.rows[t][j + 1], panel_path);
    }
  }
  return p;
}

void write_factor_artifact(const std::string& dir,
                           const factors::FactorSet& fs,
                           const std::vector<std::string>& names,
                           const std::vector<std::string>& preamble) {
  const int K = fs.K(), M = fs.M();
  if (static_cast<int>(names.size()) != K + M) {
    throw ShapeMismatch("factor artifact needs one name per column");
  }
  std::vector<std::string> full = preamble;
  full.push_back("method=" + factors::method_name(fs.method));
  full.push_back("k=" + std::to_string(K));
  full.push_back("m=" + std::to_string(M));
  {
    std::string line = "degenerate=";
    for (std::size_t i = 0; i < fs.degenerate.size(); ++i) {
      if (i) line += ';';
      line += std::to_string(fs.degenerate[i]);
    }
    full.push_back(line);
  }
  {
    std::string line = "anchor_names=";
    for (std::size_t i = 0; i < fs.anchor_names.size(); ++i) {
      if (i) line += ';';
      line += fs.anchor_names[i];
    }
    full.push_back(line);
  }

  std::vector<std::string> header = {"t"};
  header.insert(header.end(), names.begin(), names.end());
  std::vector<std::vector<std::string>> rows;
  const Matrix joint = fs.joint();
  for (int t = 0; t < fs.T(); ++t) {
    std::vector<std::string> row = {std::to_string(t)};
    for (int j = 0; j < K + M; ++j) {
      row.push_back(io::format_double(joint(t, j)));
    }
    rows.push_back(std::move(row));
  }
  io::write_csv((std::filesystem::path(dir) / "factors.csv").string(), header,
                rows, full);
}

factors::FactorSet read_factor_artifact(const std::string& dir) {
  const std::string path =
      (std::filesystem::path(dir) / "factors.csv").string();
  const auto meta = read_preamble(path);
  const auto need = [&](const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end()) {
      throw BadArtifact(path + ": missing '" + key + "' in the preamble");
    }
    return it->second;
  };
  factors::FactorSet fs;
  fs.method = factors::method_from_name(need("method"));
  const int K = static_cast<int>(parse_number(need("k"), path));
  const int M = static_cast<int>(parse_number(need("m"), path));
  for (const auto& tok : split(need("degenerate"), ';')) {
    fs.degenerate.push_back(static_cast<int>(parse_number(tok, path)));
  }
  fs.anchor_names = split(need("anchor_names"), ';');

  const io::CsvTable t = io::read_csv(path);
  if (static_cast<int>(t.header.size()) != K + M + 1) {
    throw BadArtifact(path + ": header width does not match k + m");
  }
  const int T = static_cast<int>(t.rows.size());
  if (T == 0) throw BadArtifact(path + ": no rows");
  fs.latent = Matrix(T, K);
  fs.observable = Matrix(T, M);
  for (int r = 0; r < T; ++r) {
    for (int j = 0; j < K; ++j) {
      fs.latent(r, j) = parse_number(t.rows[r][j + 1], path);
    }
    for (int j = 0; j < M; ++j) {
      fs.observable(r, j) = parse_number(t.rows[r][K + 1 + j], path);
    }
  }
  return fs;
}

std::vector<std::string> factor_column_names(const std::string& dir) {
  const io::CsvTable t =
      io::read_csv((std::filesystem::path(dir) / "factors.csv").string());
  if (t.header.size() < 2) {
    throw BadArtifact(dir + "/factors.csv: missing factor columns");
  }
  return std::vector<std::string>(t.header.begin() + 1, t.header.end());
}

std::map<std::string, std::string> read_preamble(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# ", 0) != 0) break;
    const std::string body = line.substr(2);
    const auto eq = body.find('=');
    if (eq == std::string::npos) continue;
    out[body.substr(0, eq)] = body.substr(eq + 1);
  }
  return out;
}

}  // namespace favar::cli
