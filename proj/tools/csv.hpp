#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace tdsr::cli {

// Shortest text that still round-trips IEEE doubles exactly: 17 significant digits.
std::string csv_num(double v);

// RFC 4180 writer: CRLF rows, cells quoted only when they contain ',', '"' or newlines.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& cells);
  bool good() const { return out_.good(); }

 private:
  std::ofstream out_;
};

}  // namespace tdsr::cli
