#pragma once

#include <string>
#include <vector>

namespace lc {

// shortest exact round-trip formatting so emitted files are byte-stable
std::string fmt_double(double v);

struct CsvTable {
  std::string path;  // where it came from, for error messages
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int col(const std::string& name) const;  // -1 when absent
  int require_col(const std::string& name) const;  // throws naming the file
};

CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows);

}  // namespace lc
