#include "favar/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "favar/io/csv.hpp"
#include "favar/transforms.hpp"

namespace favar {

int Panel::n_groups() const {
  int g = 0;
  for (const auto& s : specs) {
    if (s.role == Role::kPanelX) g = std::max(g, s.group + 1);
  }
  return g;
}

std::vector<int> Panel::x_indices() const {
  std::vector<int> out;
  for (int i = 0; i < cols(); ++i) {
    if (specs[i].role == Role::kPanelX) out.push_back(i);
  }
  return out;
}

std::vector<int> Panel::y_indices() const {
  std::vector<int> out;
  for (int i = 0; i < cols(); ++i) {
    if (specs[i].role == Role::kObservableY) out.push_back(i);
  }
  return out;
}

std::vector<int> Panel::group_members(int group) const {
  std::vector<int> out;
  for (int i = 0; i < cols(); ++i) {
    if (specs[i].role == Role::kPanelX && specs[i].group == group) {
      out.push_back(i);
    }
  }
  return out;
}

int Panel::column_of(const std::string& name) const {
  for (int i = 0; i < cols(); ++i) {
    if (specs[i].name == name) return i;
  }
  return -1;
}

Matrix Panel::destandardized() const {
  Matrix out = values;
  for (int j = 0; j < out.cols(); ++j) {
    out.col(j) = out.col(j) * std(j) + Vector::Constant(out.rows(), mean(j));
  }
  return out;
}

void standardize_columns(Matrix& m, Vector& mean, Vector& std) {
  const int T = static_cast<int>(m.rows());
  const int N = static_cast<int>(m.cols());
  mean.resize(N);
  std.resize(N);
  for (int j = 0; j < N; ++j) {
    mean(j) = m.col(j).mean();
    m.col(j).array() -= mean(j);
    const double var = m.col(j).squaredNorm() / T;  // population convention
    if (!(var > 1e-24)) {
      throw RankDeficient("standardize: column " + std::to_string(j) +
                          " has zero variance");
    }
    std(j) = std::sqrt(var);
    m.col(j) /= std(j);
  }
}

static Speed parse_speed(const std::string& s, const std::string& where) {
  if (s == "slow") return Speed::kSlow;
  if (s == "fast") return Speed::kFast;
  throw Error(where + ": speed must be slow|fast, got '" + s + "'");
}

static Role parse_role(const std::string& s, const std::string& where) {
  if (s == "observable_y") return Role::kObservableY;
  if (s == "panel_x") return Role::kPanelX;
  throw Error(where + ": role must be observable_y|panel_x, got '" + s + "'");
}

std::vector<VariableSpec> read_manifest(const std::string& path) {
  const io::CsvTable t = io::read_csv(path);
  const int c_name = t.column("name");
  const int c_group = t.column("group");
  const int c_tcode = t.column("tcode");
  const int c_speed = t.column("speed");
  const int c_role = t.column("role");
  if (c_name < 0 || c_group < 0 || c_tcode < 0 || c_speed < 0 || c_role < 0) {
    throw Error(path + ": manifest needs columns name,group,tcode,speed,role");
  }
  std::vector<VariableSpec> specs;
  std::map<std::string, int> group_ids;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = path + " row " + std::to_string(r + 2);
    VariableSpec s;
    s.name = row[c_name];
    if (s.name.empty()) throw Error(where + ": empty variable name");
    if (!seen.insert(s.name).second) {
      throw Error(where + ": duplicate variable '" + s.name + "'");
    }
    s.group_label = row[c_group];
    s.transform_code = std::stoi(row[c_tcode]);
    transform_lag(s.transform_code);  // validates the code early
    s.speed = parse_speed(row[c_speed], where);
    s.role = parse_role(row[c_role], where);
    if (s.role == Role::kPanelX) {
      if (s.group_label.empty()) {
        throw Error(where + ": panel variable '" + s.name + "' has no group");
      }
      auto [it, _] = group_ids.try_emplace(
          s.group_label, static_cast<int>(group_ids.size()));
      s.group = it->second;
    } else {
      s.group = -1;
    }
    specs.push_back(std::move(s));
  }
  if (specs.empty()) throw Error(path + ": manifest lists no variables");
  return specs;
}

static double parse_cell(const std::string& cell, const std::string& csv_path,
                         std::size_t row, const std::string& col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw NonNumericCell(csv_path + ": non-numeric cell '" + cell +
                         "' at row " + std::to_string(row + 2) + ", column " +
                         col);
  }
}

Panel load_panel(const std::string& csv_path, const std::string& manifest_path,
                 int ffill_limit) {
  std::vector<VariableSpec> specs = read_manifest(manifest_path);
  const io::CsvTable t = io::read_csv(csv_path);

  int date_col = t.column("date");
  if (date_col < 0) date_col = t.column("Date");
  if (date_col < 0) throw Error(csv_path + ": no 'date' column");
  const int T_raw = static_cast<int>(t.rows.size());
  if (T_raw == 0) throw WindowTooShort(csv_path + ": no data rows");

  const int N = static_cast<int>(specs.size());
  Matrix raw(T_raw, N);
  for (int j = 0; j < N; ++j) {
    const int col = t.column(specs[j].name);
    if (col < 0) {
      throw MissingVariable(csv_path + ": manifest variable '" + specs[j].name +
                            "' has no CSV column");
    }
    int fill_run = 0;
    for (int r = 0; r < T_raw; ++r) {
      const std::string& cell = t.rows[r][col];
      if (cell.empty() || cell == "NA" || cell == "NaN") {
        if (r > 0 && fill_run < ffill_limit) {
          raw(r, j) = raw(r - 1, j);
          ++fill_run;
          continue;
        }
        throw NonNumericCell(csv_path + ": missing cell at row " +
                             std::to_string(r + 2) + ", column " +
                             specs[j].name);
      }
      fill_run = 0;
      raw(r, j) = parse_cell(cell, csv_path, r, specs[j].name);
    }
  }

  int max_lag = 0;
  for (const auto& s : specs) max_lag = std::max(max_lag, transform_lag(s.transform_code));
  const int T = T_raw - max_lag;
  if (T < 40) {
    throw WindowTooShort(csv_path + ": only " + std::to_string(T) +
                         " usable quarters after transforms (need 40)");
  }

  Matrix transformed(T, N);
  for (int j = 0; j < N; ++j) {
    const Vector out = apply_transform(raw.col(j), specs[j].transform_code);
    // drop the extra leading rows of lower-lag series to align the window
    transformed.col(j) = out.tail(T);
  }

  std::vector<std::string> dates;
  dates.reserve(T);
  for (int r = max_lag; r < T_raw; ++r) dates.push_back(t.rows[r][date_col]);

  return make_panel(transformed, std::move(specs), std::move(dates));
}

Panel make_panel(const Matrix& transformed, std::vector<VariableSpec> specs,
                 std::vector<std::string> dates) {
  if (transformed.cols() != static_cast<int>(specs.size())) {
    throw ShapeMismatch("make_panel: " + std::to_string(transformed.cols()) +
                        " columns vs " + std::to_string(specs.size()) +
                        " specs");
  }
  if (!dates.empty() &&
      transformed.rows() != static_cast<int>(dates.size())) {
    throw ShapeMismatch("make_panel: row count does not match dates");
  }
  check_finite(transformed, "panel values");
  Panel p;
  p.values = transformed;
  p.specs = std::move(specs);
  p.dates = std::move(dates);
  standardize_columns(p.values, p.mean, p.std);
  return p;
}

void promote_anchor_groups(Panel& panel,
                           const std::vector<std::string>& anchor_labels) {
  std::map<std::string, int> old_ids;
  for (const auto& s : panel.specs) {
    if (s.role == Role::kPanelX) old_ids.emplace(s.group_label, s.group);
  }
  std::map<int, int> remap;
  int next = 0;
  for (const auto& label : anchor_labels) {
    auto it = old_ids.find(label);
    if (it == old_ids.end()) {
      throw MissingVariable("anchor group '" + label + "' not in manifest");
    }
    if (!remap.emplace(it->second, next).second) {
      throw Error("anchor group '" + label + "' listed twice");
    }
    ++next;
  }
  // remaining groups keep their original relative order
  std::vector<std::pair<int, std::string>> by_id;
  for (const auto& [label, id] : old_ids) by_id.emplace_back(id, label);
  std::sort(by_id.begin(), by_id.end());
  for (const auto& [id, label] : by_id) {
    if (remap.emplace(id, next).second) ++next;
  }
  for (auto& s : panel.specs) {
    if (s.role == Role::kPanelX) s.group = remap.at(s.group);
  }
}

}  // namespace favar
