#pragma once

#include <string>
#include <vector>

#include "favar/linalg.hpp"

namespace favar {

enum class Speed { kSlow, kFast };
enum class Role { kObservableY, kPanelX };

struct VariableSpec {
  std::string name;
  std::string group_label;  // free-form label from the manifest
  int group = 0;            // 0-based group index; anchors are re-indexed first
  int transform_code = 1;
  Speed speed = Speed::kSlow;
  Role role = Role::kPanelX;
};

// Balanced quarterly panel after transforms and standardization. Columns keep
// manifest order; the observable block is identified by role, not position.
struct Panel {
  Matrix values;  // T x N_total, each column mean 0 / variance 1
  std::vector<VariableSpec> specs;
  std::vector<std::string> dates;
  Vector mean;  // standardization stats of the transformed series
  Vector std;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  int n_groups() const;
  std::vector<int> x_indices() const;
  std::vector<int> y_indices() const;
  std::vector<int> group_members(int group) const;  // panel_x columns only
  int column_of(const std::string& name) const;     // -1 when absent

  // Transformed-but-unstandardized values (values * std + mean).
  Matrix destandardized() const;
};

// Re-centers and re-scales every column to mean 0 / population variance 1,
// recording the stats. A zero-variance column is a hard error.
void standardize_columns(Matrix& m, Vector& mean, Vector& std);

// Parses the variable manifest: CSV with columns name,group,tcode,speed,role.
std::vector<VariableSpec> read_manifest(const std::string& path);

// Loads a quarterly CSV (date column + one column per manifest variable),
// applies per-variable transforms, trims to the common usable window,
// standardizes, and returns the assembled panel. ffill_limit > 0 allows
// forward-filling up to that many consecutive missing cells per column.
Panel load_panel(const std::string& csv_path, const std::string& manifest_path,
                 int ffill_limit = 0);

// Builds a Panel directly from in-memory transformed data (used by the
// synthetic generator and window re-standardization).
Panel make_panel(const Matrix& transformed, std::vector<VariableSpec> specs,
                 std::vector<std::string> dates);

// Reorders group indices so the listed labels come first, in order; all
// specs' group fields are rewritten. Unknown labels are an error.
void promote_anchor_groups(Panel& panel,
                           const std::vector<std::string>& anchor_labels);

}  // namespace favar
