#include "favar/io/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "favar/errors.hpp"

namespace favar::io {

int CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<int>(j);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();

  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool line_start = true;
  bool skipping_comment = false;
  bool have_header = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (!have_header) {
      table.header = std::move(row);
      have_header = true;
    } else {
      if (row.size() != table.header.size()) {
        throw Error(path + ": row " + std::to_string(table.rows.size() + 2) +
                    " has " + std::to_string(row.size()) + " fields, header has " +
                    std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(row));
    }
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (skipping_comment) {
      if (c == '\n') {
        skipping_comment = false;
        line_start = true;
      }
      continue;
    }
    if (line_start && !in_quotes && c == '#') {
      skipping_comment = true;
      continue;
    }
    line_start = false;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        line_start = true;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw Error(path + ": unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();  // file without final newline
  if (!have_header) throw Error(path + ": empty file");
  return table;
}

static bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

static void write_field(std::ostream& os, const std::string& s) {
  if (!needs_quoting(s)) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << "\"\"";
    else os << c;
  }
  os << '"';
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::vector<std::string>& preamble) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  for (const auto& line : preamble) f << "# " << line << "\n";
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) f << ',';
    write_field(f, header[j]);
  }
  f << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw Error(path + ": row width does not match header");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) f << ',';
      write_field(f, row[j]);
    }
    f << "\n";
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double failed");
  return std::string(buf, ptr);
}

}  // namespace favar::io
