#pragma once

// Minimal numeric CSV reader: a header row, then rows of numbers.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hemo::io {

struct CsvTable {
  std::vector<std::string> names;            // requested columns
  std::vector<std::vector<double>> columns;  // same order as names
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

/// Reads the named columns (any order in the file, extra columns ignored).
inline CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& names) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  std::vector<std::size_t> pick;
  for (const auto& n : names) {
    std::size_t i = 0;
    while (i < header.size() && header[i] != n) ++i;
    if (i == header.size()) throw std::runtime_error(path.string() + ": missing column '" + n + "'");
    pick.push_back(i);
  }
  CsvTable table{names, std::vector<std::vector<double>>(names.size())};
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    for (std::size_t c = 0; c < pick.size(); ++c) {
      if (pick[c] >= cells.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": too few columns");
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[pick[c]], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[pick[c]].size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" +
                                 cells[pick[c]] + "'");
      }
      table.columns[c].push_back(v);
    }
  }
  return table;
}

}  // namespace hemo::io
