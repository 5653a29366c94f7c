#include "lc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lc {

std::string fmt_double(double v) {
  // shortest representation that parses back to the same double
  char buf[40];
  if (std::isfinite(v) && std::abs(v) < 1e15 && v == static_cast<long long>(v)) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int CsvTable::col(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

int CsvTable::require_col(const std::string& name) const {
  const int c = col(name);
  if (c < 0) throw std::invalid_argument("csv: " + path + " is missing column '" + name + "'");
  return c;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open " + path);
  CsvTable t;
  t.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (lineno == 1) {
      t.header = cells;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
      try {
        size_t pos = 0;
        row.push_back(std::stod(cells[i], &pos));
        if (pos != cells[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::invalid_argument("csv: " + path + ":" + std::to_string(lineno) +
                                    " bad numeric cell '" + cells[i] + "'");
      }
    }
    if (row.size() != t.header.size())
      throw std::invalid_argument("csv: " + path + ":" + std::to_string(lineno) +
                                  " has " + std::to_string(row.size()) + " cells, expected " +
                                  std::to_string(t.header.size()));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw std::invalid_argument("csv: " + path + " is empty");
  return t;
}

std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt_double(row[i]);
    os << '\n';
  }
  return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) throw std::invalid_argument("csv: cannot write " + path);
  out << csv_to_string(header, rows);
}

}  // namespace lc
