#include "report.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tdsr::cli {

ordered_json matrix_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_json(const Vec& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

ordered_json complex_json(const Complex& z) {
  return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

ordered_json certificate_json(const Certificate& cert) {
  ordered_json j;
  j["kind"] = cert_kind_name(cert.kind);
  j["value"] = cert.value;
  j["critical_omega"] = cert.critical_omega;
  j["margin"] = cert.margin;
  j["tail_cutoff"] = cert.tail_cutoff;
  j["degenerate"] = cert.degenerate;
  ordered_json checks = ordered_json::array();
  for (const auto& a : cert.assumptions) {
    checks.push_back(ordered_json{{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  }
  j["assumptions"] = std::move(checks);
  j["assumptions_pass"] = cert.assumptions_pass();
  return j;
}

namespace {

bool scalar_array(const ordered_json& a) {
  for (const auto& v : a) {
    if (v.is_structured()) return false;
  }
  return true;
}

void render_node(const ordered_json& node, const std::string& label, int depth, std::ostringstream& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (node.is_object()) {
    if (!label.empty()) out << pad << label << ":\n";
    for (const auto& [k, v] : node.items()) {
      render_node(v, k, label.empty() ? depth : depth + 1, out);
    }
  } else if (node.is_array() && !scalar_array(node)) {
    out << pad << label << ":\n";
    int idx = 0;
    for (const auto& v : node) {
      render_node(v, "[" + std::to_string(idx++) + "]", depth + 1, out);
    }
  } else {
    // Scalars and flat arrays: dump() so digits match report.json exactly.
    out << pad << label << ": " << node.dump() << "\n";
  }
}

}  // namespace

std::string render_text(const ordered_json& doc) {
  std::ostringstream out;
  render_node(doc, "", 0, out);
  return out.str();
}

void emit_report(const ordered_json& doc, const std::string& out_dir, const std::string& format) {
  std::filesystem::create_directories(out_dir);
  std::ofstream f(std::filesystem::path(out_dir) / "report.json", std::ios::binary);
  f << doc.dump(2) << "\n";
  if (format == "json") {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << render_text(doc);
  }
}

}  // namespace tdsr::cli
