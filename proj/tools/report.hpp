#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include <tdsrobust/freqbounds.hpp>
#include <tdsrobust/types.hpp>

namespace tdsr::cli {

using ordered_json = nlohmann::ordered_json;

ordered_json matrix_json(const Mat& m);
ordered_json vector_json(const Vec& v);
ordered_json complex_json(const Complex& z);
ordered_json certificate_json(const Certificate& cert);

// Plain-text rendering of a report document.  Every number is printed by
// serializing the JSON value itself, so the two formats carry identical digits.
std::string render_text(const ordered_json& doc);

// Writes <out_dir>/report.json and prints the requested rendering to stdout.
void emit_report(const ordered_json& doc, const std::string& out_dir, const std::string& format);

}  // namespace tdsr::cli
