#include "tdsrobust/freqbounds.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "tdsrobust/spectrum.hpp"
#include "tdsrobust/sysmodel.hpp"

namespace tdsr {

namespace {

double g_norm_at(const TdsSystem& sys, const PerturbationStructure& ps, double omega) {
  const CMat g = transfer_g(sys, ps, Complex(0.0, omega));
  if (g.rows() == 0 || g.cols() == 0) return 0.0;
  return Eigen::JacobiSVD<CMat>(g).singularValues()(0);
}

// logarithmic-norm style quantity: largest eigenvalue of the Hermitian part
double mu2(const CMat& m) {
  const CMat he = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(he);
  return es.eigenvalues().maxCoeff();
}

double lambda_min_w_at(const TdsSystem& sys, const PerturbationStructure& ps,
                       const SectorRestriction& sec, double omega) {
  Eigen::SelfAdjointEigenSolver<CMat> es(w_matrix(sys, ps, sec, omega));
  return es.eigenvalues().minCoeff();
}

AssumptionCheck check_nominal_stability(const TdsSystem& sys, const char* name) {
  AssumptionCheck c;
  c.name = name;
  try {
    auto [stable, report] = is_exponentially_stable(sys);
    c.pass = stable;
    std::ostringstream os;
    os << "rightmost real part " << report.rightmost_real_part;
    c.detail = os.str();
  } catch (const Error& e) {
    c.pass = false;
    c.detail = e.what();
  }
  return c;
}

AssumptionCheck check_imag_axis(const TdsSystem& sys, const SweepConfig& cfg, const char* name) {
  AssumptionCheck c;
  c.name = name;
  try {
    const double clearance = imag_axis_clearance(sys, cfg);
    c.pass = clearance > 1e-8;
    std::ostringstream os;
    os << "min sigma_min(Delta(i omega)) = " << clearance;
    c.detail = os.str();
  } catch (const Error& e) {
    c.pass = false;
    c.detail = e.what();
  }
  return c;
}

// Extend the sweep cap until the analytic tail cannot hide a larger value.
std::pair<double, double> sweep_g_norm(const TdsSystem& sys, const PerturbationStructure& ps,
                                       const SweepConfig& cfg, double* tail_cutoff) {
  const double norm_sum = spectral_norm(sys.a0) + spectral_norm(sys.a1);
  if (norm_sum >= cfg.omega_max) {
    std::ostringstream os;
    os << "||a0|| + ||a1|| = " << norm_sum << " >= omega_max = " << cfg.omega_max
       << "; the tail cannot be bounded";
    throw Error(ErrorCode::TailBoundInvalid, os.str());
  }
  const double cb = spectral_norm(ps.stacked_c()) * spectral_norm(ps.b);
  SweepConfig eff = cfg;
  SweepExtremum best{};
  for (int attempt = 0; attempt < 8; ++attempt) {
    best = sweep_maximize([&](double w) { return g_norm_at(sys, ps, w); }, eff);
    const double tail = cb / (eff.omega_max - norm_sum);
    if (tail <= best.value * (1.0 + eff.refine_tol) || cb == 0.0) break;
    eff.omega_max *= 2.0;
  }
  if (tail_cutoff) *tail_cutoff = eff.omega_max;
  return {best.value, best.omega};
}

}  // namespace

const char* cert_kind_name(CertKind kind) {
  switch (kind) {
    case CertKind::GammaMax: return "gamma_max";
    case CertKind::RhoMin: return "rho_min";
    case CertKind::K1Min: return "k1_min";
    case CertKind::WDefinite: return "w_definite";
  }
  return "unknown";
}

bool Certificate::assumptions_pass() const {
  for (const auto& a : assumptions)
    if (!a.pass) return false;
  return true;
}

CertOutcome certificate_outcome(const Certificate& cert, double refine_tol) {
  if (!cert.assumptions_pass()) return CertOutcome::AssumptionFailure;
  if (cert.margin > refine_tol) return CertOutcome::Certified;
  if (cert.margin < -refine_tol) return CertOutcome::Denied;
  return CertOutcome::Inconclusive;
}

std::pair<double, double> hinf_norm(const TdsSystem& sys, const PerturbationStructure& ps,
                                    const SweepConfig& cfg) {
  cfg.validate();
  return sweep_g_norm(sys, ps, cfg, nullptr);
}

Certificate gamma_max(const TdsSystem& sys, const PerturbationStructure& ps,
                      const SweepConfig& cfg) {
  cfg.validate();
  Certificate cert;
  cert.kind = CertKind::GammaMax;
  double cutoff = cfg.omega_max;
  const auto [norm, omega_star] = sweep_g_norm(sys, ps, cfg, &cutoff);
  cert.value = (norm > 0.0) ? 1.0 / norm : std::numeric_limits<double>::infinity();
  cert.critical_omega = omega_star;
  cert.margin = cert.value;
  cert.tail_cutoff = cutoff;
  cert.assumptions.push_back(check_nominal_stability(sys, "nominal_exponentially_stable"));
  return cert;
}

Certificate rho_min(const TdsSystem& sys, const PerturbationStructure& ps, const SweepConfig& cfg) {
  cfg.validate();
  if (ps.p() != ps.m())
    throw Error(ErrorCode::DimensionMismatch, "passivity bound needs square G (p = m)");
  Certificate cert;
  cert.kind = CertKind::RhoMin;
  cert.tail_cutoff = cfg.omega_max;
  const SweepExtremum peak = sweep_maximize(
      [&](double w) { return mu2(-transfer_g(sys, ps, Complex(0.0, w))); }, cfg);
  if (peak.value >= 0.0) {
    cert.value = peak.value;
    cert.critical_omega = peak.omega;
  } else {
    // He(-G) < 0 on the whole grid; the supremum 0 is approached as
    // omega -> infinity (G strictly proper)
    cert.value = 0.0;
    cert.critical_omega = cfg.omega_max;
  }
  cert.margin = cert.value;
  // stability of the shifted system at rho slightly above the bound
  const double rho_chk = std::max(cert.value * (1.0 + 10.0 * cfg.refine_tol), 10.0 * cfg.refine_tol);
  AssumptionCheck shift;
  shift.name = "shifted_system_stable_above_bound";
  try {
    const TransformedSystem t1 = transformation_one(sys, ps, sector_passivity(rho_chk, ps.m()));
    auto [stable, report] = is_exponentially_stable(t1.system);
    shift.pass = stable;
    std::ostringstream os;
    os << "rho = " << rho_chk << ", rightmost real part " << report.rightmost_real_part;
    shift.detail = os.str();
  } catch (const Error& e) {
    shift.pass = false;
    shift.detail = e.what();
  }
  cert.assumptions.push_back(std::move(shift));
  cert.assumptions.push_back(check_imag_axis(sys, cfg, "nominal_no_imaginary_axis_roots"));
  return cert;
}

Certificate k1_min(const TdsSystem& sys, const PerturbationStructure& ps, double k2,
                   const SweepConfig& cfg) {
  cfg.validate();
  if (ps.p() != ps.m())
    throw Error(ErrorCode::DimensionMismatch, "sector bound needs square G (p = m)");
  Certificate cert;
  cert.kind = CertKind::K1Min;
  cert.tail_cutoff = cfg.omega_max;
  const TransformedSystem t2 = transformation_two(sys, ps, k2 - 1.0, k2);
  const SweepExtremum peak = sweep_maximize(
      [&](double w) { return mu2(transfer_g(t2.system, ps, Complex(0.0, w))); }, cfg);
  if (peak.value <= 0.0) {
    // shifted system dissipates every lower bound: nothing to certify against
    cert.degenerate = true;
    cert.value = -std::numeric_limits<double>::infinity();
    cert.critical_omega = peak.omega;
    cert.margin = 0.0;
    AssumptionCheck note;
    note.name = "bound_attained";
    note.pass = false;
    std::ostringstream os;
    os << "max mu2(G_II) = " << peak.value << " <= 0; every k1 < k2 is admissible";
    note.detail = os.str();
    cert.assumptions.push_back(std::move(note));
    return cert;
  }
  cert.value = k2 - 1.0 / peak.value;
  cert.critical_omega = peak.omega;
  cert.margin = k2 - cert.value;  // width of the certified sector
  // midpoint feedback stability at k1 slightly inside the certified range
  const double bump = 10.0 * cfg.refine_tol * (1.0 + std::abs(cert.value));
  const double k1_chk = cert.value + bump;
  AssumptionCheck mid;
  mid.name = "midpoint_system_stable_above_bound";
  try {
    const int m = ps.m();
    const SectorRestriction sec =
        sector_bounds(k1_chk * Mat::Identity(m, ps.p()), k2 * Mat::Identity(m, ps.p()));
    const TransformedSystem t1 = transformation_one(sys, ps, sec);
    auto [stable, report] = is_exponentially_stable(t1.system);
    mid.pass = stable;
    std::ostringstream os;
    os << "k1 = " << k1_chk << ", rightmost real part " << report.rightmost_real_part;
    mid.detail = os.str();
  } catch (const Error& e) {
    mid.pass = false;
    mid.detail = e.what();
  }
  cert.assumptions.push_back(std::move(mid));
  cert.assumptions.push_back(check_imag_axis(t2.system, cfg, "shifted_no_imaginary_axis_roots"));
  return cert;
}

Certificate certify_w(const TdsSystem& sys, const PerturbationStructure& ps,
                      const SectorRestriction& sec, const SweepConfig& cfg) {
  cfg.validate();
  Certificate cert;
  cert.kind = CertKind::WDefinite;
  const double norm_sum = spectral_norm(sys.a0) + spectral_norm(sys.a1);
  SweepConfig eff = cfg;
  if (eff.omega_max <= norm_sum + 1.0) eff.omega_max = norm_sum + 1.0;
  const SweepExtremum low =
      sweep_minimize([&](double w) { return lambda_min_w_at(sys, ps, sec, w); }, eff);
  const double tail = tail_bound(sys, ps, sec, eff.omega_max);
  cert.tail_cutoff = eff.omega_max;
  if (tail < low.value) {
    cert.margin = tail;
    cert.critical_omega = eff.omega_max;
  } else {
    cert.margin = low.value;
    cert.critical_omega = low.omega;
  }
  cert.value = cert.margin;

  AssumptionCheck block;
  block.name = "transformed_sector_block_diagonal";
  TransformedSystem t1 = transformation_one(sys, ps, sec);
  try {
    q_pair(ps, t1.sector);
    block.pass = true;
    block.detail = "state costs split over the output blocks";
  } catch (const Error& e) {
    block.pass = false;
    block.detail = e.what();
  }
  cert.assumptions.push_back(std::move(block));
  cert.assumptions.push_back(
      check_nominal_stability(t1.system, "transformed_system_exponentially_stable"));
  cert.assumptions.push_back(check_imag_axis(sys, cfg, "nominal_no_imaginary_axis_roots"));
  return cert;
}

double tail_bound(const TdsSystem& sys, const PerturbationStructure& ps,
                  const SectorRestriction& sec, double omega) {
  const double norm_sum = spectral_norm(sys.a0) + spectral_norm(sys.a1);
  if (!(omega > norm_sum)) {
    std::ostringstream os;
    os << "tail bound needs omega > ||a0|| + ||a1|| = " << norm_sum << ", got " << omega;
    throw Error(ErrorCode::TailBoundInvalid, os.str());
  }
  const double g_bound = spectral_norm(ps.stacked_c()) * spectral_norm(ps.b) / (omega - norm_sum);
  Eigen::SelfAdjointEigenSolver<Mat> es(-sec.pi_aa);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin - 2.0 * spectral_norm(sec.pi_za) * g_bound -
         spectral_norm(sec.pi_zz) * g_bound * g_bound;
}

std::vector<SweepSample> sweep_samples(const TdsSystem& sys, const PerturbationStructure& ps,
                                       const SectorRestriction& sec, const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepSample> rows;
  rows.reserve(cfg.grid_points);
  for (int i = 0; i < cfg.grid_points; ++i) {
    SweepSample s;
    s.omega = cfg.omega_max * static_cast<double>(i) / (cfg.grid_points - 1);
    s.lambda_min_w = lambda_min_w_at(sys, ps, sec, s.omega);
    s.g_norm = g_norm_at(sys, ps, s.omega);
    rows.push_back(s);
  }
  return rows;
}

}  // namespace tdsr
