#pragma once

#include <string>
#include <vector>

namespace favar::io {

// Parsed rectangular CSV contents. Cells are kept as raw strings; numeric
// interpretation happens at the caller where row/column context is known.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// RFC-4180 reader: quoted fields, embedded commas/newlines, doubled quotes,
// optional trailing CR. Lines starting with '#' outside quotes are skipped so
// our own audit dumps round-trip.
CsvTable read_csv(const std::string& path);

// Writes header + rows verbatim; caller formats numbers. `preamble` lines are
// emitted first, each prefixed with "# ".
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::vector<std::string>& preamble = {});

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);

}  // namespace favar::io
