#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;
using Catch::Approx;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TDSROBUST_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t nread = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, nread);
  const int status = pclose(pipe);
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = std::move(out);
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("tdsr_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_json(const fs::path& dir, const std::string& name, const json& j) {
  fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ex18_config(double gamma) {
  return json{
      {"system", {{"a0", {{0.0, 1.0}, {-1.0, -2.0}}},
                  {"a1", {{0.0, 0.0}, {-1.0, 1.0}}},
                  {"h", 1.0}}},
      {"structure", {{"b", {{1.0, 0.0}, {0.0, 1.0}}},
                     {"c1", {{1.0, 0.0}, {0.0, 1.0}}},
                     {"c0", {{1.0, 0.0}, {0.0, 1.0}}}}},
      {"sector", {{"kind", "norm_bound"}, {"params", {{"gamma", gamma}}}}},
  };
}

json scalar_delay_config() {
  return json{
      {"system", {{"a0", {{0.0}}}, {"a1", {{-1.0}}}, {"h", 1.0}}},
      {"structure", {{"b", {{1.0}}}, {"c0", {{1.0}}}}},
      {"sector", {{"kind", "norm_bound"}, {"params", {{"gamma", 0.1}}}}},
  };
}

// every data line of an RFC-4180 file ends in CRLF and splits into the header's
// column count; numeric cells survive a parse/17-digit-print round trip
void check_csv(const fs::path& p, const std::string& header) {
  const std::string text = read_file(p);
  REQUIRE_FALSE(text.empty());
  size_t cols = std::count(header.begin(), header.end(), ',') + 1;
  size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    REQUIRE(eol != std::string::npos);
    REQUIRE(eol > pos);
    REQUIRE(text[eol - 1] == '\r');
    std::string line = text.substr(pos, eol - pos - 1);
    size_t ncells = std::count(line.begin(), line.end(), ',') + 1;
    CHECK(ncells == cols);
    if (line_no == 0) {
      CHECK(line == header);
    } else {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        REQUIRE(end == cell.c_str() + cell.size());
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        CHECK(cell == buf);
      }
    }
    pos = eol + 1;
    ++line_no;
  }
  CHECK(line_no >= 2);
}

}  // namespace

TEST_CASE("bounds command", "[cli]") {
  auto dir = scratch("bounds");
  auto cfgp = write_json(dir, "cfg.json", ex18_config(0.1));
  auto out = (dir / "out").string();

  auto r = run_cli("bounds --config \"" + cfgp + "\" --out \"" + out + "\"");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);

  json rep = read_json(fs::path(out) / "report.json");
  CHECK(rep["schema_version"] == 1);
  CHECK(rep["command"] == "bounds");
  CHECK(rep["certificate"]["kind"] == "gamma_max");
  CHECK(rep["certificate"]["value"].get<double>() ==
        Approx(0.10589588900333474).epsilon(1e-6));
  CHECK(rep["certificate"]["assumptions_pass"] == true);

  SECTION("sweep diagnostics file") {
    fs::path csv = rep["files"]["sweep_csv"].get<std::string>();
    REQUIRE(fs::exists(csv));
    check_csv(csv, "omega,lambda_min_w,g_norm");
  }
  SECTION("text rendering carries the exact digits of the stored report") {
    const std::string raw = read_file(fs::path(out) / "report.json");
    std::smatch m;
    REQUIRE(std::regex_search(raw, m, std::regex("\"value\": ([-0-9.e+]+)")));
    CHECK(r.output.find("value: " + m[1].str()) != std::string::npos);
  }
  SECTION("json format prints the stored report") {
    auto rj = run_cli("bounds --config \"" + cfgp + "\" --out \"" + out + "\" --format json");
    REQUIRE(rj.exit_code == 0);
    CHECK(json::parse(rj.output) == rep);
  }
  SECTION("reruns are byte-identical") {
    const std::string first = read_file(fs::path(out) / "report.json");
    auto r2 = run_cli("bounds --config \"" + cfgp + "\" --out \"" + out + "\"");
    REQUIRE(r2.exit_code == 0);
    CHECK(read_file(fs::path(out) / "report.json") == first);
  }
}

TEST_CASE("bounds on a restricted input channel", "[cli]") {
  auto dir = scratch("bounds_b01");
  json cfg = ex18_config(0.1);
  cfg["structure"]["b"] = {{0.0}, {1.0}};
  auto cfgp = write_json(dir, "cfg.json", cfg);
  auto r = run_cli("bounds --config \"" + cfgp + "\" --out \"" + (dir / "out").string() + "\"");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);
  json rep = read_json(dir / "out" / "report.json");
  CHECK(rep["certificate"]["value"].get<double>() ==
        Approx(0.24615181652683343).epsilon(1e-6));
}

TEST_CASE("bounds with the time-domain baseline", "[cli]") {
  auto dir = scratch("bounds_ct");
  auto cfgp = write_json(dir, "cfg.json", ex18_config(0.1));
  auto r = run_cli("bounds --complete-type --config \"" + cfgp + "\" --out \"" +
                   (dir / "out").string() + "\"");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);
  json rep = read_json(dir / "out" / "report.json");
  CHECK(rep["complete_type"]["gamma"].get<double>() ==
        Approx(0.022690254188870343).epsilon(1e-6));
}

TEST_CASE("certify exit codes", "[cli]") {
  auto dir = scratch("certify");

  SECTION("inside the admissible range") {
    auto cfgp = write_json(dir, "a.json", ex18_config(0.10));
    auto r = run_cli("certify --config \"" + cfgp + "\" --out \"" + (dir / "oa").string() + "\"");
    CAPTURE(r.output);
    CHECK(r.exit_code == 0);
    CHECK(read_json(dir / "oa" / "report.json")["outcome"] == "certified");
  }
  SECTION("beyond the admissible range") {
    auto cfgp = write_json(dir, "b.json", ex18_config(0.12));
    auto r = run_cli("certify --config \"" + cfgp + "\" --out \"" + (dir / "ob").string() + "\"");
    CAPTURE(r.output);
    CHECK(r.exit_code == 1);
    CHECK(read_json(dir / "ob" / "report.json")["outcome"] == "denied");
  }
  SECTION("unstable nominal system") {
    json cfg = scalar_delay_config();
    cfg["system"]["a0"] = {{1.0}};
    cfg["system"]["a1"] = {{0.0}};
    auto cfgp = write_json(dir, "c.json", cfg);
    auto r = run_cli("certify --config \"" + cfgp + "\" --out \"" + (dir / "oc").string() + "\"");
    CAPTURE(r.output);
    CHECK(r.exit_code == 2);
    CHECK(read_json(dir / "oc" / "report.json")["outcome"] == "assumption_failure");
  }
}

TEST_CASE("configuration errors name the offending path", "[cli]") {
  auto dir = scratch("cfg_errors");

  SECTION("negative gamma") {
    json cfg = ex18_config(-0.5);
    auto cfgp = write_json(dir, "neg.json", cfg);
    auto r = run_cli("certify --config \"" + cfgp + "\"");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("sector.params.gamma") != std::string::npos);
  }
  SECTION("missing delay") {
    json cfg = ex18_config(0.1);
    cfg["system"].erase("h");
    auto cfgp = write_json(dir, "noh.json", cfg);
    auto r = run_cli("certify --config \"" + cfgp + "\"");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("system.h") != std::string::npos);
  }
  SECTION("ragged matrix") {
    json cfg = ex18_config(0.1);
    cfg["system"]["a0"] = {{0.0, 1.0}, {-1.0}};
    auto cfgp = write_json(dir, "ragged.json", cfg);
    auto r = run_cli("certify --config \"" + cfgp + "\"");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("system.a0[1]") != std::string::npos);
  }
  SECTION("unknown key") {
    json cfg = ex18_config(0.1);
    cfg["systme"] = 1;
    auto cfgp = write_json(dir, "typo.json", cfg);
    auto r = run_cli("certify --config \"" + cfgp + "\"");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("systme") != std::string::npos);
  }
  SECTION("missing config flag") {
    auto r = run_cli("certify");
    CHECK(r.exit_code == 3);
  }
  SECTION("unknown subcommand") {
    auto r = run_cli("frobnicate --config x.json");
    CHECK(r.exit_code == 3);
  }
}

TEST_CASE("construct and verify round trip", "[cli]") {
  auto dir = scratch("construct");
  json cfg = ex18_config(0.1);
  cfg["discretization"] = {{"order", 16}};
  cfg["simulation"] = {{"step", 0.01}, {"t_end", 5.0}, {"trajectories", 3},
                       {"nonlinearity", {{"kind", "none"}}}};
  auto cfgp = write_json(dir, "cfg.json", cfg);
  auto out = (dir / "out").string();

  auto rc = run_cli("construct --config \"" + cfgp + "\" --out \"" + out + "\"");
  CAPTURE(rc.output);
  REQUIRE(rc.exit_code == 0);

  json rep = read_json(fs::path(out) / "report.json");
  CHECK(rep["are"]["residual"].get<double>() <= 1e-8);
  CHECK(rep["are"]["closed_loop_stable"] == true);
  CHECK(rep["positivity"]["min_cubic_ratio"].get<double>() > 0.0);
  CHECK(rep["positivity"]["min_razumikhin_ratio"].get<double>() > 0.0);
  CHECK(rep["defining_equation"]["max_residual"].get<double>() <= 1e-6);
  CHECK(rep["kernels"]["p_xx"][0][0].get<double>() == Approx(0.119748).margin(5e-5));
  CHECK(rep["certified_triple_hash"].is_string());

  const std::string fpath = rep["files"]["functional"].get<std::string>();
  REQUIRE(fs::exists(fpath));

  SECTION("verify accepts the stored functional") {
    auto rv = run_cli("verify --config \"" + cfgp + "\" --out \"" + out + "\"");
    CAPTURE(rv.output);
    REQUIRE(rv.exit_code == 0);
    json vrep = read_json(fs::path(out) / "report.json");
    CHECK(vrep["hash"]["match"] == true);
    CHECK(vrep["verdict"] == "consistent");
    CHECK(vrep["monotonicity"]["pass"] == true);
    CHECK(vrep["derivative_identity"]["pass"] == true);
  }
  SECTION("verify with an explicit functional path") {
    auto rv = run_cli("verify --config \"" + cfgp + "\" --out \"" + (dir / "v2").string() +
                      "\" --functional \"" + fpath + "\"");
    CAPTURE(rv.output);
    CHECK(rv.exit_code == 0);
  }
  SECTION("tampered functional is rejected as input error") {
    json f = read_json(fpath);
    f["meta_hash"] = "0000000000000000";
    auto badp = write_json(dir, "tampered.json", f);
    auto rv = run_cli("verify --config \"" + cfgp + "\" --out \"" + (dir / "v3").string() +
                      "\" --functional \"" + badp + "\"");
    CHECK(rv.exit_code == 3);
  }
  SECTION("functional stored for a different sector is refused") {
    json other = cfg;
    other["sector"]["params"]["gamma"] = 0.05;
    auto otherp = write_json(dir, "other.json", other);
    auto rv = run_cli("verify --config \"" + otherp + "\" --out \"" + (dir / "v4").string() +
                      "\" --functional \"" + fpath + "\"");
    CHECK(rv.exit_code == 3);
    json vrep = read_json(dir / "v4" / "report.json");
    CHECK(vrep["hash"]["match"] == false);
  }
}

TEST_CASE("construct at the boundary and at zero", "[cli]") {
  auto dir = scratch("construct_edges");

  SECTION("beyond the existence boundary exits denied") {
    json cfg = ex18_config(0.12);
    cfg["discretization"] = {{"order", 16}};
    auto cfgp = write_json(dir, "cfg.json", cfg);
    auto r = run_cli("construct --config \"" + cfgp + "\" --out \"" + (dir / "o1").string() + "\"");
    CAPTURE(r.output);
    CHECK(r.exit_code == 1);
    json rep = read_json(dir / "o1" / "report.json");
    CHECK(rep["error"]["code"] == "AreNoStabilizingSolution");
  }
  SECTION("zero gain produces the zero functional") {
    json cfg = ex18_config(0.0);
    cfg["discretization"] = {{"order", 16}};
    auto cfgp = write_json(dir, "cfg.json", cfg);
    auto r = run_cli("construct --config \"" + cfgp + "\" --out \"" + (dir / "o2").string() + "\"");
    CAPTURE(r.output);
    REQUIRE(r.exit_code == 0);
    json rep = read_json(dir / "o2" / "report.json");
    for (const auto& row : rep["kernels"]["p_xx"])
      for (const auto& v : row) CHECK(std::abs(v.get<double>()) < 1e-12);
  }
}

TEST_CASE("ellipse command", "[cli]") {
  auto dir = scratch("ellipse");
  json cfg = ex18_config(0.1);
  cfg["ellipse"] = {{"scales", {{1.0, 1.0}, {2.0, 2.0}}}, {"points", 16}};
  auto cfgp = write_json(dir, "cfg.json", cfg);
  auto out = (dir / "out").string();
  auto r = run_cli("ellipse --config \"" + cfgp + "\" --out \"" + out + "\"");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);

  json rep = read_json(fs::path(out) / "report.json");
  REQUIRE(rep["ellipses"].size() == 2);
  const double g11 = rep["ellipses"][0]["gamma_max"].get<double>();
  const double g22 = rep["ellipses"][1]["gamma_max"].get<double>();
  CHECK(g11 == Approx(0.10589588900333474).epsilon(1e-6));
  // scaling both output taps by c scales the transfer peak by c
  CHECK(2.0 * g22 == Approx(g11).epsilon(1e-6));

  fs::path csv = rep["files"]["ellipse_csv"].get<std::string>();
  check_csv(csv, "c1,c0,gamma_max,t,delta1_norm,delta0_norm");
  const std::string text = read_file(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 16);
}

TEST_CASE("spectrum command", "[cli]") {
  auto dir = scratch("spectrum");
  json cfg = scalar_delay_config();
  cfg.erase("structure");
  cfg.erase("sector");
  cfg["spectrum"] = {{"count", 6}};
  auto cfgp = write_json(dir, "cfg.json", cfg);
  auto out = (dir / "out").string();
  auto r = run_cli("spectrum --config \"" + cfgp + "\" --out \"" + out + "\"");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);

  json rep = read_json(fs::path(out) / "report.json");
  CHECK(rep["spectrum"]["rightmost_real_part"].get<double>() ==
        Approx(-0.3181315052047642).margin(1e-6));
  CHECK(rep["spectrum"]["exponentially_stable"] == true);
  const auto& roots = rep["spectrum"]["roots"];
  REQUIRE(roots.size() >= 2);
  CHECK(std::abs(roots[0]["im"].get<double>()) == Approx(1.3372357014306893).margin(1e-6));
  CHECK(roots[0]["polished"] == true);
  check_csv(rep["files"]["spectrum_csv"].get<std::string>(), "re,im,polished");
}

TEST_CASE("simulate command", "[cli]") {
  auto dir = scratch("simulate");
  json cfg = scalar_delay_config();
  cfg["simulation"] = {{"step", 0.25},
                       {"t_end", 3.0},
                       {"nonlinearity", {{"kind", "none"}}},
                       {"phi0", {{"kind", "constant"}, {"value", {1.0}}}}};
  auto cfgp = write_json(dir, "cfg.json", cfg);
  auto out = (dir / "out").string();
  auto r = run_cli("simulate --config \"" + cfgp + "\" --out \"" + out + "\"");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);

  json rep = read_json(fs::path(out) / "report.json");
  CHECK(rep["blew_up"] == false);
  CHECK(rep["covered_end"].get<double>() == Approx(3.0));
  // method of steps by hand: x(3) = -1/6
  CHECK(rep["final_norm"].get<double>() == Approx(1.0 / 6.0).margin(1e-9));

  fs::path csv = rep["files"]["trajectory_csv"].get<std::string>();
  check_csv(csv, "t,x1");
  // the t = 1 sample sits at a step boundary: x(1) = 0 exactly
  std::stringstream ss(read_file(csv));
  std::string line;
  bool found = false;
  while (std::getline(ss, line)) {
    if (line.rfind("1,", 0) == 0) {
      found = true;
      const double x1 = std::strtod(line.c_str() + 2, nullptr);
      CHECK(std::abs(x1) < 1e-10);
    }
  }
  CHECK(found);
}
