#include "csv.hpp"

#include <cstdio>

namespace tdsr::cli {

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {}

static bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const std::string& c = cells[i];
    if (needs_quoting(c)) {
      out_ << '"';
      for (char ch : c) {
        if (ch == '"') out_ << "\"\"";
        else out_ << ch;
      }
      out_ << '"';
    } else {
      out_ << c;
    }
  }
  out_ << "\r\n";
}

}  // namespace tdsr::cli
