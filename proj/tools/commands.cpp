#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <random>

#include <tdsrobust/freqbounds.hpp>
#include <tdsrobust/functional.hpp>
#include <tdsrobust/lyapunov_matrix.hpp>
#include <tdsrobust/spectrum.hpp>
#include <tdsrobust/sysmodel.hpp>

#include "csv.hpp"
#include "report.hpp"

namespace tdsr::cli {

namespace {

ordered_json base_report(const char* command, const CliOptions& opt) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["command"] = command;
  doc["seed"] = opt.seed;
  return doc;
}

ordered_json problem_json(const TdsSystem& sys, const PerturbationStructure* ps,
                          const std::string& sector_kind) {
  ordered_json j;
  j["n"] = sys.n();
  j["h"] = sys.h;
  if (ps) {
    j["m"] = ps->m();
    j["p1"] = ps->p1();
    j["p0"] = ps->p0();
  }
  if (!sector_kind.empty()) j["sector_kind"] = sector_kind;
  return j;
}

std::filesystem::path out_path(const CliOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return std::filesystem::path(opt.out_dir) / name;
}

std::string resolve_functional_path(const ProblemConfig& cfg, const CliOptions& opt) {
  if (!opt.functional_override.empty()) return opt.functional_override;
  std::filesystem::path p = cfg.functional_path;
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(opt.out_dir) / p).string();
}

const char* outcome_name(CertOutcome o) {
  switch (o) {
    case CertOutcome::Certified: return "certified";
    case CertOutcome::Denied: return "denied";
    case CertOutcome::Inconclusive: return "inconclusive";
    case CertOutcome::AssumptionFailure: return "assumption_failure";
  }
  return "unknown";
}

int outcome_exit(CertOutcome o) {
  switch (o) {
    case CertOutcome::Certified: return kExitOk;
    case CertOutcome::Denied: return kExitDenied;
    case CertOutcome::Inconclusive: return kExitInconclusive;
    case CertOutcome::AssumptionFailure: return kExitAssumption;
  }
  return kExitInput;
}

Mat scaled_eye(double k, int rows, int cols) {
  Mat m = Mat::Zero(rows, cols);
  m.diagonal().setConstant(k);
  return m;
}

// Smooth random history on [-h, 0]: a low-order trigonometric series with
// geometrically decaying coefficients, normalized to the requested sup norm.
std::function<Vec(double)> random_history(int n, double h, double radius, std::mt19937_64& rng) {
  constexpr int kModes = 6;
  Mat ca(n, kModes + 1), cb(n, kModes + 1);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k <= kModes; ++k) {
      double decay = std::pow(0.5, k);
      ca(i, k) = g(rng) * decay;
      cb(i, k) = g(rng) * decay;
    }
  }
  auto raw = [ca, cb, h, n](double t) {
    Vec x = Vec::Zero(n);
    for (int k = 0; k <= kModes; ++k) {
      double arg = std::numbers::pi * k * (t + h) / h;
      double c = std::cos(arg), s = std::sin(arg);
      for (int i = 0; i < n; ++i) x(i) += ca(i, k) * c + cb(i, k) * s;
    }
    return x;
  };
  double sup = 0.0;
  for (int j = 0; j <= 64; ++j) sup = std::max(sup, raw(-h + h * j / 64.0).norm());
  double scale = radius / std::max(sup, 1e-12);
  return [raw, scale](double t) { return Vec(scale * raw(t)); };
}

std::function<Vec(double)> history_from_spec(const ProblemConfig& cfg, std::mt19937_64& rng) {
  const TdsSystem& sys = cfg.sys();
  if (cfg.sim.phi0_kind == "constant") {
    if (!cfg.sim.phi0_value || cfg.sim.phi0_value->size() != sys.n())
      throw Error(ErrorCode::ConfigError, "simulation.phi0.value: expected " +
                                              std::to_string(sys.n()) + " entries");
    Vec v = *cfg.sim.phi0_value;
    return [v](double) { return v; };
  }
  return random_history(sys.n(), sys.h, cfg.sim.radius, rng);
}

}  // namespace

// ---- bounds -----------------------------------------------------------------

int cmd_bounds(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  const PerturbationStructure& ps = cfg.ps();
  const SectorSpec& spec = cfg.sec_spec();
  SweepConfig swp = cfg.sweep_config(sys);

  ordered_json doc = base_report("bounds", opt);
  doc["problem"] = problem_json(sys, &ps, spec.kind);

  Certificate cert;
  SectorRestriction sweep_sec(Mat::Identity(1, 1), Mat::Zero(1, 1), -Mat::Identity(1, 1));
  bool have_sweep_sec = false;
  if (spec.kind == "norm_bound" ||
      (spec.kind == "weighted_norm_bound" && spec.l->isIdentity(0.0) && spec.w->isIdentity(0.0))) {
    cert = gamma_max(sys, ps, swp);
    double g = std::isfinite(cert.value) ? cert.value : 1.0;
    sweep_sec = sector_norm_bound(g, ps.p(), ps.m());
    have_sweep_sec = true;
  } else if (spec.kind == "passivity") {
    if (ps.p() != ps.m())
      throw Error(ErrorCode::ConfigError, "sector: passivity bound requires p == m");
    cert = rho_min(sys, ps, swp);
    sweep_sec = sector_passivity(std::max(cert.value, 1e-8), ps.m());
    have_sweep_sec = true;
  } else if (spec.kind == "sector_bounds" || spec.kind == "sector_bounds_scaled" ||
             spec.kind == "sector_bounds_inverse") {
    double k2 = 0.0;
    if (spec.k2_scalar) {
      k2 = *spec.k2_scalar;
    } else if (spec.k2_mat && spec.k2_mat->rows() == spec.k2_mat->cols() &&
               (*spec.k2_mat - spec.k2_mat->coeff(0, 0) *
                                   Mat::Identity(spec.k2_mat->rows(), spec.k2_mat->cols()))
                       .norm() < 1e-12) {
      k2 = spec.k2_mat->coeff(0, 0);
    } else {
      throw Error(ErrorCode::ConfigError,
                  "sector.params.k2: the lower-bound sweep needs a scalar upper bound k2");
    }
    cert = k1_min(sys, ps, k2, swp);
    double k1 = cert.degenerate ? k2 - 1.0 : cert.value;
    sweep_sec = sector_bounds(scaled_eye(k1, ps.m(), ps.p()), scaled_eye(k2, ps.m(), ps.p()));
    have_sweep_sec = true;
    doc["k2"] = k2;
  } else {
    throw Error(ErrorCode::ConfigError,
                "sector.kind: no closed-form bound for kind '" + spec.kind +
                    "'; use the definiteness certificate instead");
  }

  doc["certificate"] = certificate_json(cert);

  if (have_sweep_sec) {
    auto rows = sweep_samples(sys, ps, sweep_sec, swp);
    auto csv_path = out_path(opt, "bounds_sweep.csv");
    CsvWriter csv(csv_path.string());
    csv.row({"omega", "lambda_min_w", "g_norm"});
    for (const auto& r : rows) csv.row({csv_num(r.omega), csv_num(r.lambda_min_w), csv_num(r.g_norm)});
    doc["files"]["sweep_csv"] = csv_path.string();
  }

  if (opt.complete_type_flag || cfg.bounds_complete_type) {
    int n = sys.n();
    Mat w0 = cfg.ct_w0.value_or(Mat::Identity(n, n));
    Mat w1 = cfg.ct_w1.value_or(Mat::Identity(n, n));
    Mat w2 = cfg.ct_w2.value_or(Mat::Identity(n, n));
    try {
      CompleteTypeBound ct = complete_type_gamma(sys, w0, w1, w2);
      doc["complete_type"] = ordered_json{{"gamma", ct.gamma},
                                          {"numerator", ct.numerator},
                                          {"lambda_max_psi0", ct.lambda_max_psi0}};
    } catch (const Error& e) {
      doc["complete_type"] = ordered_json{{"error", e.what()}};
    }
  }

  emit_report(doc, opt.out_dir, opt.format);
  return cert.assumptions_pass() ? kExitOk : kExitAssumption;
}

// ---- certify ----------------------------------------------------------------

int cmd_certify(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  const PerturbationStructure& ps = cfg.ps();
  SectorRestriction sec = cfg.sector_built();
  SweepConfig swp = cfg.sweep_config(sys);

  Certificate cert = certify_w(sys, ps, sec, swp);
  CertOutcome out = certificate_outcome(cert, swp.refine_tol);

  ordered_json doc = base_report("certify", opt);
  doc["problem"] = problem_json(sys, &ps, cfg.sec_spec().kind);
  doc["certificate"] = certificate_json(cert);
  doc["outcome"] = outcome_name(out);
  emit_report(doc, opt.out_dir, opt.format);
  return outcome_exit(out);
}

// ---- construct --------------------------------------------------------------

int cmd_construct(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  const PerturbationStructure& ps = cfg.ps();
  SectorRestriction sec = cfg.sector_built();
  SweepConfig swp = cfg.sweep_config(sys);

  ordered_json doc = base_report("construct", opt);
  doc["problem"] = problem_json(sys, &ps, cfg.sec_spec().kind);

  Certificate cert = certify_w(sys, ps, sec, swp);
  doc["certificate"] = certificate_json(cert);
  doc["certificate_outcome"] = outcome_name(certificate_outcome(cert, swp.refine_tol));

  Discretization disc = make_discretization(cfg.disc_order, sys.h);
  try {
    auto [lk, are] = build_functional(sys, ps, sec, disc, cfg.are_tol);

    std::string fpath = resolve_functional_path(cfg, opt);
    if (auto dir = std::filesystem::path(fpath).parent_path(); !dir.empty())
      std::filesystem::create_directories(dir);
    save_functional(lk, fpath);

    doc["are"] = ordered_json{{"residual", are.residual},
                              {"newton_iters", are.newton_iters},
                              {"closed_loop_stable", are.closed_loop_stable},
                              {"n_state", are.n_state}};
    doc["kernels"] = ordered_json{{"p_xx", matrix_json(lk.p_xx)}, {"q1", matrix_json(lk.q1_diag)}};

    PositivityProbe probe = positivity_probe(lk, 1000, cfg.sim.radius, opt.seed);
    doc["positivity"] = ordered_json{{"min_cubic_ratio", probe.min_cubic_ratio},
                                     {"min_razumikhin_ratio", probe.min_razumikhin_ratio},
                                     {"min_value", probe.min_value},
                                     {"cubic_samples", probe.cubic_samples},
                                     {"razumikhin_samples", probe.razumikhin_samples}};

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    constexpr int kResidualSamples = 100;
    for (int s = 0; s < kResidualSamples; ++s) {
      Mat phi(sys.n(), disc.order + 1);
      for (Eigen::Index i = 0; i < phi.rows(); ++i)
        for (Eigen::Index j = 0; j < phi.cols(); ++j) phi(i, j) = g(rng);
      worst = std::max(worst, defining_equation_residual(lk, phi));
    }
    doc["defining_equation"] =
        ordered_json{{"max_residual", worst}, {"samples", kResidualSamples}};
    doc["upper_bound_coefficient"] = upper_bound_coefficient(lk);
    doc["certified_triple_hash"] = certified_triple_hash(sys, ps, sec);
    doc["files"]["functional"] = fpath;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AreNoStabilizingSolution) throw;
    doc["error"] = ordered_json{{"code", error_code_name(e.code())}, {"message", e.what()}};
    emit_report(doc, opt.out_dir, opt.format);
    return kExitDenied;
  }

  emit_report(doc, opt.out_dir, opt.format);
  return kExitOk;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  const PerturbationStructure& ps = cfg.ps();
  SectorRestriction sec = cfg.sector_built();

  ordered_json doc = base_report("verify", opt);
  doc["problem"] = problem_json(sys, &ps, cfg.sec_spec().kind);

  std::string fpath = resolve_functional_path(cfg, opt);
  LkFunctional lk = load_functional(fpath);
  doc["files"]["functional"] = fpath;

  std::string expected = certified_triple_hash(sys, ps, sec);
  std::string loaded = certified_triple_hash(lk.sys, lk.ps, lk.sec);
  doc["hash"] = ordered_json{
      {"expected", expected}, {"loaded", loaded}, {"match", expected == loaded}};
  if (expected != loaded) {
    doc["error"] = "stored functional certifies a different (system, structure, sector) triple";
    emit_report(doc, opt.out_dir, opt.format);
    return kExitInput;
  }

  Nonlinearity nl = cfg.sim.nl.build(ps.m(), ps.p());
  doc["nonlinearity"] = nl.descriptor();

  SectorMembership mem = sector_membership(nl, ps, sec, cfg.sim.membership_samples,
                                           cfg.sim.radius, opt.seed);
  bool in_sector = mem.fraction_inside >= 1.0;
  doc["sector_membership"] = ordered_json{{"fraction_inside", mem.fraction_inside},
                                          {"worst_margin", mem.worst_margin},
                                          {"in_sector", in_sector}};
  if (!in_sector)
    doc["note"] = "nonlinearity escapes the sector; functional monotonicity is not asserted";

  const double step = cfg.sim.step_or_default(sys.h);
  const double t_end = cfg.sim.t_end_or_default(sys.h);
  const double identity_tol = std::max(1e-6, 100.0 * step * step);

  std::mt19937_64 rng(opt.seed);
  double worst_increase = 0.0, worst_identity = 0.0;
  bool any_blowup = false;
  ordered_json trajs = ordered_json::array();
  for (int rep = 0; rep < cfg.sim.trajectories; ++rep) {
    auto phi0 = history_from_spec(cfg, rng);
    Trajectory traj = integrate(sys, ps, nl, phi0, step, t_end);
    any_blowup = any_blowup || traj.blew_up;

    double covered = traj.covered_end();
    constexpr int kSamples = 200;
    // Sampling starts once the segment lies entirely inside the computed
    // solution: the junction with the arbitrary initial function at t = 0 is
    // generically nonsmooth, and spectral segment sampling of V across that
    // kink wobbles above any honest monotonicity tolerance.
    const double t_first = std::min(sys.h, covered);
    std::vector<double> times;
    for (int k = 0; k <= kSamples; ++k)
      times.push_back(t_first + (covered - t_first) * k / kSamples);
    auto vs = functional_along(lk, traj, times);

    double max_inc = 0.0;
    for (std::size_t k = 1; k < vs.size(); ++k) {
      double rel = (vs[k].second - vs[k - 1].second) / (1.0 + std::abs(vs[k - 1].second));
      max_inc = std::max(max_inc, rel);
    }
    worst_increase = std::max(worst_increase, max_inc);

    std::vector<double> id_times;
    for (std::size_t k = 0; k < times.size(); k += 5) id_times.push_back(times[k]);
    double mismatch = perturbation_derivative_check(lk, sys, ps, nl, traj, id_times);
    worst_identity = std::max(worst_identity, mismatch);

    trajs.push_back(ordered_json{{"blew_up", traj.blew_up},
                                 {"v_start", vs.front().second},
                                 {"v_end", vs.back().second},
                                 {"max_relative_increase", max_inc},
                                 {"derivative_mismatch", mismatch}});
  }
  doc["trajectories"] = std::move(trajs);

  bool mono_ok = worst_increase <= cfg.sim.monotonicity_tol;
  bool ident_ok = worst_identity <= identity_tol;
  doc["monotonicity"] = ordered_json{
      {"worst_relative_increase", worst_increase}, {"tol", cfg.sim.monotonicity_tol},
      {"pass", mono_ok}};
  doc["derivative_identity"] = ordered_json{
      {"worst_mismatch", worst_identity}, {"tol", identity_tol}, {"pass", ident_ok}};
  doc["blow_up_observed"] = any_blowup;

  bool violated = in_sector && (!mono_ok || !ident_ok || any_blowup);
  doc["verdict"] = violated       ? "violation"
                   : (in_sector ? "consistent" : "not_applicable");
  emit_report(doc, opt.out_dir, opt.format);
  return violated ? kExitDenied : kExitOk;
}

// ---- ellipse ----------------------------------------------------------------

int cmd_ellipse(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  const int n = sys.n();
  SweepConfig swp = cfg.sweep_config(sys);

  ordered_json doc = base_report("ellipse", opt);
  doc["problem"] = problem_json(sys, nullptr, "norm_bound");

  auto csv_path = out_path(opt, "ellipse.csv");
  CsvWriter csv(csv_path.string());
  csv.row({"c1", "c0", "gamma_max", "t", "delta1_norm", "delta0_norm"});

  bool all_assumptions = true;
  ordered_json ellipses = ordered_json::array();
  for (const auto& sc : cfg.ellipse_scales) {
    const double c1 = sc[0], c0 = sc[1];
    PerturbationStructure psc(Mat::Identity(n, n), c1 * Mat::Identity(n, n),
                              c0 * Mat::Identity(n, n));
    Certificate cert = gamma_max(sys, psc, swp);
    all_assumptions = all_assumptions && cert.assumptions_pass();
    ellipses.push_back(ordered_json{{"c1", c1},
                                    {"c0", c0},
                                    {"gamma_max", cert.value},
                                    {"critical_omega", cert.critical_omega},
                                    {"assumptions_pass", cert.assumptions_pass()}});
    const double g = cert.value;
    for (int k = 0; k < cfg.ellipse_points; ++k) {
      double t = 0.5 * std::numbers::pi * k / (cfg.ellipse_points - 1);
      csv.row({csv_num(c1), csv_num(c0), csv_num(g), csv_num(t),
               csv_num(c1 * g * std::sin(t)), csv_num(c0 * g * std::cos(t))});
    }
  }
  doc["ellipses"] = std::move(ellipses);
  doc["files"]["ellipse_csv"] = csv_path.string();
  emit_report(doc, opt.out_dir, opt.format);
  return all_assumptions ? kExitOk : kExitAssumption;
}

// ---- complete-type ----------------------------------------------------------

int cmd_complete_type(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  const int n = sys.n();
  auto check_dim = [n](const std::optional<Mat>& m, const char* key) {
    if (m && (m->rows() != n || m->cols() != n))
      throw Error(ErrorCode::ConfigError, std::string("complete_type.") + key + ": expected " +
                                              std::to_string(n) + "x" + std::to_string(n));
  };
  check_dim(cfg.ct_w0, "w0");
  check_dim(cfg.ct_w1, "w1");
  check_dim(cfg.ct_w2, "w2");
  Mat w0 = cfg.ct_w0.value_or(Mat::Identity(n, n));
  Mat w1 = cfg.ct_w1.value_or(Mat::Identity(n, n));
  Mat w2 = cfg.ct_w2.value_or(Mat::Identity(n, n));

  ordered_json doc = base_report("complete-type", opt);
  doc["problem"] = problem_json(sys, nullptr, "");
  try {
    CompleteTypeBound ct = complete_type_gamma(sys, w0, w1, w2);
    doc["complete_type"] = ordered_json{{"gamma", ct.gamma},
                                        {"numerator", ct.numerator},
                                        {"lambda_max_psi0", ct.lambda_max_psi0},
                                        {"psi0", matrix_json(ct.psi0)}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnstableNominal) throw;
    doc["error"] = ordered_json{{"code", error_code_name(e.code())}, {"message", e.what()}};
    emit_report(doc, opt.out_dir, opt.format);
    return kExitAssumption;
  }
  emit_report(doc, opt.out_dir, opt.format);
  return kExitOk;
}

// ---- spectrum ---------------------------------------------------------------

int cmd_spectrum(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  int order = std::max(cfg.disc_order, 8);
  RootReport rr = rightmost_roots(sys, order, cfg.spectrum_count);

  ordered_json doc = base_report("spectrum", opt);
  doc["problem"] = problem_json(sys, nullptr, "");
  ordered_json roots = ordered_json::array();
  for (std::size_t i = 0; i < rr.roots.size(); ++i) {
    ordered_json r = complex_json(rr.roots[i]);
    r["polished"] = static_cast<bool>(rr.polished[i]);
    roots.push_back(std::move(r));
  }
  doc["spectrum"] = ordered_json{{"rightmost_real_part", rr.rightmost_real_part},
                                 {"imag_axis_clearance", rr.imag_axis_clearance},
                                 {"discretization_order", rr.discretization_order},
                                 {"exponentially_stable", rr.rightmost_real_part < -1e-8},
                                 {"roots", std::move(roots)}};

  auto csv_path = out_path(opt, "spectrum.csv");
  CsvWriter csv(csv_path.string());
  csv.row({"re", "im", "polished"});
  for (std::size_t i = 0; i < rr.roots.size(); ++i)
    csv.row({csv_num(rr.roots[i].real()), csv_num(rr.roots[i].imag()),
             rr.polished[i] ? "1" : "0"});
  doc["files"]["spectrum_csv"] = csv_path.string();

  emit_report(doc, opt.out_dir, opt.format);
  return kExitOk;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const ProblemConfig& cfg, const CliOptions& opt) {
  const TdsSystem& sys = cfg.sys();
  const PerturbationStructure& ps = cfg.ps();
  Nonlinearity nl = cfg.sim.nl.build(ps.m(), ps.p());

  const double step = cfg.sim.step_or_default(sys.h);
  const double t_end = cfg.sim.t_end_or_default(sys.h);

  ordered_json doc = base_report("simulate", opt);
  doc["problem"] = problem_json(sys, &ps, "");
  doc["nonlinearity"] = nl.descriptor();
  doc["step"] = step;
  doc["t_end"] = t_end;

  std::optional<LkFunctional> lk;
  if (!opt.functional_override.empty()) {
    lk.emplace(load_functional(opt.functional_override));
    std::string expected = certified_triple_hash(sys, ps, cfg.sector_built());
    std::string loaded = certified_triple_hash(lk->sys, lk->ps, lk->sec);
    if (expected != loaded) {
      doc["error"] = "stored functional certifies a different (system, structure, sector) triple";
      emit_report(doc, opt.out_dir, opt.format);
      return kExitInput;
    }
    doc["files"]["functional"] = opt.functional_override;
  }

  std::mt19937_64 rng(opt.seed);
  auto phi0 = history_from_spec(cfg, rng);
  Trajectory traj = integrate(sys, ps, nl, phi0, step, t_end);

  const double covered = traj.covered_end();
  const std::size_t n_steps = traj.steps.size();
  const std::size_t stride = std::max<std::size_t>(1, n_steps / 2000);
  std::vector<double> times;
  for (std::size_t k = 0; k < n_steps; k += stride) times.push_back(traj.steps[k].t0);
  if (times.empty() || covered > times.back() + 1e-12 * (1.0 + covered)) times.push_back(covered);

  std::vector<double> v_vals;
  if (lk) {
    auto vs = functional_along(*lk, traj, times);
    v_vals.reserve(vs.size());
    for (const auto& pr : vs) v_vals.push_back(pr.second);
  }

  auto csv_path = out_path(opt, "trajectory.csv");
  CsvWriter csv(csv_path.string());
  std::vector<std::string> header{"t"};
  for (int i = 1; i <= sys.n(); ++i) header.push_back("x" + std::to_string(i));
  if (lk) {
    header.push_back("V");
    header.push_back("dV_fd");
  }
  csv.row(header);
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<std::string> cells{csv_num(times[k])};
    Vec x = traj.eval(times[k]);
    for (int i = 0; i < sys.n(); ++i) cells.push_back(csv_num(x(i)));
    if (lk) {
      cells.push_back(csv_num(v_vals[k]));
      double d = 0.0;
      if (times.size() >= 2) {
        if (k == 0)
          d = (v_vals[1] - v_vals[0]) / (times[1] - times[0]);
        else if (k + 1 == times.size())
          d = (v_vals[k] - v_vals[k - 1]) / (times[k] - times[k - 1]);
        else
          d = (v_vals[k + 1] - v_vals[k - 1]) / (times[k + 1] - times[k - 1]);
      }
      cells.push_back(csv_num(d));
    }
    csv.row(cells);
  }
  doc["files"]["trajectory_csv"] = csv_path.string();

  doc["blew_up"] = traj.blew_up;
  if (traj.blew_up) doc["t_blowup"] = traj.t_blowup;
  doc["covered_end"] = covered;
  doc["final_norm"] = traj.eval(covered).norm();
  emit_report(doc, opt.out_dir, opt.format);
  return kExitOk;
}

}  // namespace tdsr::cli
