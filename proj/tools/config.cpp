#include "config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include <tdsrobust/sysmodel.hpp>

namespace tdsr::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& need(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required key");
  return *it;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (k == a) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(path + "." + k, "unknown key");
  }
}

double as_num(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string as_str(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

// Row-major nested arrays; [] is the empty matrix.
Mat as_mat(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a matrix as nested row arrays");
  if (v.empty()) return Mat(0, 0);
  std::size_t cols = 0;
  Mat m;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& r = v[i];
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!r.is_array()) fail(rp, "expected a row array");
    if (i == 0) {
      cols = r.size();
      if (cols == 0) fail(rp, "rows must be nonempty");
      m.resize(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    } else if (r.size() != cols) {
      fail(rp, "ragged matrix: expected " + std::to_string(cols) + " entries");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!r[k].is_number()) fail(rp + "[" + std::to_string(k) + "]", "expected a number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r[k].get<double>();
    }
  }
  return m;
}

Vec as_vec(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

// k1 / k2 in the sector-bound kinds accept a scalar (meaning k I) or a matrix.
void parse_scalar_or_mat(const json& v, const std::string& path, std::optional<double>& s,
                         std::optional<Mat>& m) {
  if (v.is_number()) {
    s = v.get<double>();
  } else if (v.is_array()) {
    m = as_mat(v, path);
  } else {
    fail(path, "expected a number or a matrix");
  }
}

Mat scaled_identity(double k, int rows, int cols) {
  Mat m = Mat::Zero(rows, cols);
  m.diagonal().setConstant(k);
  return m;
}

SectorSpec parse_sector(const json& s) {
  check_keys(s, "sector", {"kind", "params"});
  SectorSpec spec;
  spec.kind = as_str(need(s, "sector", "kind"), "sector.kind");
  json params = json::object();
  if (const json* pr = find(s, "params")) {
    if (!pr->is_object()) fail("sector.params", "expected an object");
    params = *pr;
  }
  const std::string pp = "sector.params";
  if (spec.kind == "norm_bound") {
    check_keys(params, pp, {"gamma"});
    spec.gamma = as_num(need(params, pp, "gamma"), pp + ".gamma");
    if (*spec.gamma < 0) fail(pp + ".gamma", "must be >= 0");
  } else if (spec.kind == "weighted_norm_bound") {
    check_keys(params, pp, {"gamma", "l", "w"});
    spec.gamma = as_num(need(params, pp, "gamma"), pp + ".gamma");
    if (*spec.gamma < 0) fail(pp + ".gamma", "must be >= 0");
    spec.l = as_mat(need(params, pp, "l"), pp + ".l");
    spec.w = as_mat(need(params, pp, "w"), pp + ".w");
  } else if (spec.kind == "passivity") {
    check_keys(params, pp, {"rho"});
    spec.rho = as_num(need(params, pp, "rho"), pp + ".rho");
    if (*spec.rho <= 0) fail(pp + ".rho", "must be > 0");
  } else if (spec.kind == "passivity_flipped") {
    check_keys(params, pp, {"rho_hat"});
    spec.rho_hat = as_num(need(params, pp, "rho_hat"), pp + ".rho_hat");
    if (*spec.rho_hat <= 0) fail(pp + ".rho_hat", "must be > 0");
  } else if (spec.kind == "sector_bounds" || spec.kind == "sector_bounds_scaled" ||
             spec.kind == "sector_bounds_inverse") {
    if (spec.kind == "sector_bounds_inverse") {
      check_keys(params, pp, {"k1", "k2", "sign"});
      if (const json* sg = find(params, "sign")) {
        int v = as_int(*sg, pp + ".sign");
        if (v != 1 && v != -1) fail(pp + ".sign", "must be 1 or -1");
        spec.sign = v;
      }
    } else {
      check_keys(params, pp, {"k1", "k2"});
    }
    parse_scalar_or_mat(need(params, pp, "k1"), pp + ".k1", spec.k1_scalar, spec.k1_mat);
    parse_scalar_or_mat(need(params, pp, "k2"), pp + ".k2", spec.k2_scalar, spec.k2_mat);
  } else if (spec.kind == "raw") {
    check_keys(params, pp, {"pi_zz", "pi_za", "pi_aa"});
    spec.pi_zz = as_mat(need(params, pp, "pi_zz"), pp + ".pi_zz");
    spec.pi_za = as_mat(need(params, pp, "pi_za"), pp + ".pi_za");
    spec.pi_aa = as_mat(need(params, pp, "pi_aa"), pp + ".pi_aa");
  } else {
    fail("sector.kind", "unknown sector kind: " + spec.kind);
  }
  return spec;
}

NonlinearitySpec parse_nonlinearity(const json& s) {
  const std::string pp = "simulation.nonlinearity";
  NonlinearitySpec spec;
  spec.kind = as_str(need(s, pp, "kind"), pp + ".kind");
  if (spec.kind == "none") {
    check_keys(s, pp, {"kind"});
  } else if (spec.kind == "linear_gain") {
    check_keys(s, pp, {"kind", "gain"});
    spec.gain = as_mat(need(s, pp, "gain"), pp + ".gain");
  } else if (spec.kind == "saturation") {
    check_keys(s, pp, {"kind", "slope", "limit"});
    spec.slope = as_num(need(s, pp, "slope"), pp + ".slope");
    if (spec.slope < 0) fail(pp + ".slope", "must be >= 0");
    spec.limit = as_num(need(s, pp, "limit"), pp + ".limit");
    if (spec.limit <= 0) fail(pp + ".limit", "must be > 0");
  } else if (spec.kind == "cubic") {
    check_keys(s, pp, {"kind", "signs"});
    spec.signs = as_vec(need(s, pp, "signs"), pp + ".signs");
  } else {
    fail(pp + ".kind", "unknown nonlinearity kind: " + spec.kind);
  }
  return spec;
}

SimulationSpec parse_simulation(const json& s) {
  check_keys(s, "simulation",
             {"step", "t_end", "trajectories", "radius", "membership_samples", "monotonicity_tol",
              "nonlinearity", "phi0"});
  SimulationSpec spec;
  if (const json* v = find(s, "step")) {
    spec.step = as_num(*v, "simulation.step");
    if (*spec.step <= 0) fail("simulation.step", "must be > 0");
  }
  if (const json* v = find(s, "t_end")) {
    spec.t_end = as_num(*v, "simulation.t_end");
    if (*spec.t_end <= 0) fail("simulation.t_end", "must be > 0");
  }
  if (const json* v = find(s, "trajectories")) {
    spec.trajectories = as_int(*v, "simulation.trajectories");
    if (spec.trajectories < 1) fail("simulation.trajectories", "must be >= 1");
  }
  if (const json* v = find(s, "radius")) {
    spec.radius = as_num(*v, "simulation.radius");
    if (spec.radius <= 0) fail("simulation.radius", "must be > 0");
  }
  if (const json* v = find(s, "membership_samples")) {
    spec.membership_samples = as_int(*v, "simulation.membership_samples");
    if (spec.membership_samples < 1) fail("simulation.membership_samples", "must be >= 1");
  }
  if (const json* v = find(s, "monotonicity_tol")) {
    spec.monotonicity_tol = as_num(*v, "simulation.monotonicity_tol");
    if (spec.monotonicity_tol <= 0) fail("simulation.monotonicity_tol", "must be > 0");
  }
  if (const json* v = find(s, "nonlinearity")) {
    if (!v->is_object()) fail("simulation.nonlinearity", "expected an object");
    spec.nl = parse_nonlinearity(*v);
  }
  if (const json* v = find(s, "phi0")) {
    if (!v->is_object()) fail("simulation.phi0", "expected an object");
    check_keys(*v, "simulation.phi0", {"kind", "value"});
    spec.phi0_kind = as_str(need(*v, "simulation.phi0", "kind"), "simulation.phi0.kind");
    if (spec.phi0_kind == "constant") {
      spec.phi0_value = as_vec(need(*v, "simulation.phi0", "value"), "simulation.phi0.value");
    } else if (spec.phi0_kind == "random") {
      check_keys(*v, "simulation.phi0", {"kind"});
    } else {
      fail("simulation.phi0.kind", "unknown initial-function kind: " + spec.phi0_kind);
    }
  }
  return spec;
}

}  // namespace

double SimulationSpec::step_or_default(double h) const { return step ? *step : h / 100.0; }
double SimulationSpec::t_end_or_default(double h) const { return t_end ? *t_end : 10.0 * h; }

SectorRestriction SectorSpec::build(int p, int m) const {
  const bool square_only = kind == "passivity" || kind == "passivity_flipped" ||
                           kind == "sector_bounds_scaled" || kind == "sector_bounds_inverse";
  if (square_only && p != m) {
    fail("sector", kind + " requires p == m (got p = " + std::to_string(p) +
                       ", m = " + std::to_string(m) + ")");
  }
  try {
    if (kind == "norm_bound") return sector_norm_bound(*gamma, p, m);
    if (kind == "weighted_norm_bound") return sector_weighted_norm_bound(*gamma, *l, *w);
    if (kind == "passivity") return sector_passivity(*rho, m);
    if (kind == "passivity_flipped") return sector_passivity_flipped(*rho_hat, m);
    auto expand = [](const std::optional<double>& s, const std::optional<Mat>& mm, int rows,
                     int cols) { return mm ? *mm : scaled_identity(*s, rows, cols); };
    if (kind == "sector_bounds")
      return sector_bounds(expand(k1_scalar, k1_mat, m, p), expand(k2_scalar, k2_mat, m, p));
    if (kind == "sector_bounds_scaled")
      return sector_bounds_scaled(expand(k1_scalar, k1_mat, p, p), expand(k2_scalar, k2_mat, m, m));
    if (kind == "sector_bounds_inverse")
      return sector_bounds_inverse(expand(k1_scalar, k1_mat, m, m), expand(k2_scalar, k2_mat, m, m),
                                   sign);
    if (kind == "raw") {
      if (pi_zz->rows() != p || pi_zz->cols() != p)
        fail("sector.params.pi_zz", "expected " + std::to_string(p) + "x" + std::to_string(p));
      if (pi_za->rows() != p || pi_za->cols() != m)
        fail("sector.params.pi_za", "expected " + std::to_string(p) + "x" + std::to_string(m));
      if (pi_aa->rows() != m || pi_aa->cols() != m)
        fail("sector.params.pi_aa", "expected " + std::to_string(m) + "x" + std::to_string(m));
      return SectorRestriction(*pi_zz, *pi_za, *pi_aa);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail("sector", e.what());
  }
  fail("sector.kind", "unknown sector kind: " + kind);
}

Nonlinearity NonlinearitySpec::build(int m, int p) const {
  try {
    if (kind == "none") return Nonlinearity::linear_gain(Mat::Zero(m, p));
    if (kind == "linear_gain") return Nonlinearity::linear_gain(*gain);
    if (kind == "saturation") {
      if (p != m) fail("simulation.nonlinearity", "saturation requires p == m");
      return Nonlinearity::saturation(slope, limit, m);
    }
    if (kind == "cubic") {
      if (p != m) fail("simulation.nonlinearity", "cubic requires p == m");
      if (signs->size() != m)
        fail("simulation.nonlinearity.signs", "expected " + std::to_string(m) + " entries");
      return Nonlinearity::cubic_diagonal(*signs);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail("simulation.nonlinearity", e.what());
  }
  fail("simulation.nonlinearity.kind", "unknown nonlinearity kind: " + kind);
}

const TdsSystem& ProblemConfig::sys() const {
  if (!system) fail("system", "missing required section");
  return *system;
}

const PerturbationStructure& ProblemConfig::ps() const {
  if (!structure) fail("structure", "missing required section");
  return *structure;
}

const SectorSpec& ProblemConfig::sec_spec() const {
  if (!sector) fail("sector", "missing required section");
  return *sector;
}

SectorRestriction ProblemConfig::sector_built() const {
  return sec_spec().build(ps().p(), ps().m());
}

SweepConfig ProblemConfig::sweep_config(const TdsSystem& s) const {
  SweepConfig c = SweepConfig::defaults(s);
  if (sweep.omega_max) c.omega_max = *sweep.omega_max;
  if (sweep.grid_points) c.grid_points = *sweep.grid_points;
  if (sweep.refine_tol) c.refine_tol = *sweep.refine_tol;
  if (sweep.max_refine_iters) c.max_refine_iters = *sweep.max_refine_iters;
  try {
    c.validate();
  } catch (const Error& e) {
    fail("sweep", e.what());
  }
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    fail(path, std::string("JSON parse failure: ") + e.what());
  }
  if (!doc.is_object()) fail(path, "top level must be an object");
  check_keys(doc, "config", {"system", "structure", "sector", "sweep", "discretization", "are_tol",
                             "simulation", "complete_type", "ellipse", "bounds", "spectrum",
                             "output"});

  ProblemConfig cfg;
  if (const json* s = find(doc, "system")) {
    check_keys(*s, "system", {"a0", "a1", "h"});
    Mat a0 = as_mat(need(*s, "system", "a0"), "system.a0");
    Mat a1 = as_mat(need(*s, "system", "a1"), "system.a1");
    double h = as_num(need(*s, "system", "h"), "system.h");
    if (h <= 0) fail("system.h", "must be > 0");
    try {
      cfg.system.emplace(a0, a1, h);
    } catch (const Error& e) {
      fail("system", e.what());
    }
  }
  if (const json* s = find(doc, "structure")) {
    if (!cfg.system) fail("structure", "requires a system section");
    check_keys(*s, "structure", {"b", "c1", "c0"});
    Mat b = as_mat(need(*s, "structure", "b"), "structure.b");
    Mat c1(0, 0), c0(0, 0);
    if (const json* v = find(*s, "c1")) c1 = as_mat(*v, "structure.c1");
    if (const json* v = find(*s, "c0")) c0 = as_mat(*v, "structure.c0");
    try {
      cfg.structure.emplace(b, c1, c0);
    } catch (const Error& e) {
      fail("structure", e.what());
    }
    if (cfg.structure->n() != cfg.system->n())
      fail("structure.b", "row count must match the system dimension " +
                              std::to_string(cfg.system->n()));
  }
  if (const json* s = find(doc, "sector")) {
    if (!s->is_object()) fail("sector", "expected an object");
    cfg.sector = parse_sector(*s);
  }
  if (const json* s = find(doc, "sweep")) {
    check_keys(*s, "sweep", {"omega_max", "grid_points", "refine_tol", "max_refine_iters"});
    if (const json* v = find(*s, "omega_max")) {
      cfg.sweep.omega_max = as_num(*v, "sweep.omega_max");
      if (*cfg.sweep.omega_max <= 0) fail("sweep.omega_max", "must be > 0");
    }
    if (const json* v = find(*s, "grid_points")) {
      cfg.sweep.grid_points = as_int(*v, "sweep.grid_points");
      if (*cfg.sweep.grid_points < 2) fail("sweep.grid_points", "must be >= 2");
    }
    if (const json* v = find(*s, "refine_tol")) {
      cfg.sweep.refine_tol = as_num(*v, "sweep.refine_tol");
      if (*cfg.sweep.refine_tol <= 0 || *cfg.sweep.refine_tol > 1e-2)
        fail("sweep.refine_tol", "must lie in (0, 1e-2]");
    }
    if (const json* v = find(*s, "max_refine_iters")) {
      cfg.sweep.max_refine_iters = as_int(*v, "sweep.max_refine_iters");
      if (*cfg.sweep.max_refine_iters < 1) fail("sweep.max_refine_iters", "must be >= 1");
    }
  }
  if (const json* s = find(doc, "discretization")) {
    check_keys(*s, "discretization", {"order"});
    cfg.disc_order = as_int(need(*s, "discretization", "order"), "discretization.order");
    if (cfg.disc_order < 2) fail("discretization.order", "must be >= 2");
  }
  if (const json* v = find(doc, "are_tol")) {
    cfg.are_tol = as_num(*v, "are_tol");
    if (cfg.are_tol <= 0) fail("are_tol", "must be > 0");
  }
  if (const json* s = find(doc, "simulation")) {
    if (!s->is_object()) fail("simulation", "expected an object");
    cfg.sim = parse_simulation(*s);
  }
  if (const json* s = find(doc, "complete_type")) {
    check_keys(*s, "complete_type", {"w0", "w1", "w2"});
    if (const json* v = find(*s, "w0")) cfg.ct_w0 = as_mat(*v, "complete_type.w0");
    if (const json* v = find(*s, "w1")) cfg.ct_w1 = as_mat(*v, "complete_type.w1");
    if (const json* v = find(*s, "w2")) cfg.ct_w2 = as_mat(*v, "complete_type.w2");
  }
  if (const json* s = find(doc, "ellipse")) {
    check_keys(*s, "ellipse", {"scales", "points"});
    if (const json* v = find(*s, "scales")) {
      if (!v->is_array() || v->empty()) fail("ellipse.scales", "expected a nonempty array of [c1, c0] pairs");
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string sp = "ellipse.scales[" + std::to_string(i) + "]";
        const json& pr = (*v)[i];
        if (!pr.is_array() || pr.size() != 2) fail(sp, "expected a [c1, c0] pair");
        double c1 = as_num(pr[0], sp + "[0]");
        double c0 = as_num(pr[1], sp + "[1]");
        if (c1 < 0 || c0 < 0 || (c1 == 0 && c0 == 0)) fail(sp, "scales must be >= 0 and not both 0");
        cfg.ellipse_scales.push_back({c1, c0});
      }
    }
    if (const json* v = find(*s, "points")) {
      cfg.ellipse_points = as_int(*v, "ellipse.points");
      if (cfg.ellipse_points < 2) fail("ellipse.points", "must be >= 2");
    }
  }
  if (cfg.ellipse_scales.empty()) cfg.ellipse_scales.push_back({1.0, 1.0});
  if (const json* s = find(doc, "bounds")) {
    check_keys(*s, "bounds", {"k2", "complete_type"});
    if (const json* v = find(*s, "k2")) cfg.bounds_k2 = as_num(*v, "bounds.k2");
    if (const json* v = find(*s, "complete_type"))
      cfg.bounds_complete_type = as_bool(*v, "bounds.complete_type");
  }
  if (const json* s = find(doc, "spectrum")) {
    check_keys(*s, "spectrum", {"count"});
    if (const json* v = find(*s, "count")) {
      cfg.spectrum_count = as_int(*v, "spectrum.count");
      if (cfg.spectrum_count < 1) fail("spectrum.count", "must be >= 1");
    }
  }
  if (const json* s = find(doc, "output")) {
    check_keys(*s, "output", {"functional"});
    if (const json* v = find(*s, "functional")) cfg.functional_path = as_str(*v, "output.functional");
  }
  return cfg;
}

}  // namespace tdsr::cli
