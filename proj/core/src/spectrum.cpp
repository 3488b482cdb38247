#include "tdsrobust/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "tdsrobust/collocation.hpp"
#include "tdsrobust/sysmodel.hpp"

namespace tdsr {

namespace {

struct PolishResult {
  Complex s;
  bool converged = false;
};

// Newton iteration on sigma_min(Delta(s)) = 0 through the smallest singular
// pair (u, v):  s <- s - u^H Delta v / u^H Delta' v,  Delta' = I + h e^{-sh} a1.
PolishResult newton_polish(const TdsSystem& sys, Complex s0) {
  Complex s = s0;
  const int n = sys.n();
  for (int it = 0; it < 60; ++it) {
    const CMat delta = char_matrix(sys, s);
    Eigen::JacobiSVD<CMat> svd(delta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CVec u = svd.matrixU().col(n - 1);
    const CVec v = svd.matrixV().col(n - 1);
    const CMat dprime =
        CMat::Identity(n, n) + sys.h * std::exp(-s * sys.h) * sys.a1.cast<Complex>();
    const Complex denom = u.dot(dprime * v);  // Eigen dot conjugates the left argument
    if (std::abs(denom) < 1e-300) return {s, false};
    const Complex step = u.dot(delta * v) / denom;
    s -= step;
    if (std::isnan(s.real()) || std::isnan(s.imag())) return {s0, false};
    if (std::abs(step) <= 1e-13 * (1.0 + std::abs(s))) break;
  }
  const CMat delta = char_matrix(sys, s);
  const double smin = Eigen::JacobiSVD<CMat>(delta).singularValues().minCoeff();
  return {s, smin <= 1e-8};
}

double clearance_at(const TdsSystem& sys, double omega) {
  return Eigen::JacobiSVD<CMat>(char_matrix(sys, Complex(0.0, omega))).singularValues().minCoeff();
}

}  // namespace

RootReport rightmost_roots(const TdsSystem& sys, int order, int count) {
  if (order < 8) throw Error(ErrorCode::InvalidArgument, "collocation order must be >= 8");
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  const Discretization disc = make_discretization(order, sys.h);
  const Mat a = discretize_generator(sys, disc);
  Eigen::EigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::SingularLinearSolve, "eigendecomposition of the collocation matrix failed");
  std::vector<Complex> eigs(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  std::sort(eigs.begin(), eigs.end(),
            [](Complex a_, Complex b_) { return a_.real() > b_.real(); });

  RootReport report;
  report.discretization_order = order;
  const int take = std::min<int>(count, static_cast<int>(eigs.size()));
  for (int i = 0; i < take; ++i) {
    const PolishResult pr = newton_polish(sys, eigs[i]);
    report.roots.push_back(pr.converged ? pr.s : eigs[i]);
    report.polished.push_back(pr.converged);
  }
  // keep descending real part after polishing moved things around
  std::vector<size_t> idx(report.roots.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a_, size_t b_) {
    return report.roots[a_].real() > report.roots[b_].real();
  });
  std::vector<Complex> roots;
  std::vector<bool> pol;
  for (size_t i : idx) {
    roots.push_back(report.roots[i]);
    pol.push_back(report.polished[i]);
  }
  report.roots = std::move(roots);
  report.polished = std::move(pol);
  report.rightmost_real_part = report.roots.front().real();

  SweepConfig cfg = SweepConfig::defaults(sys);
  cfg.grid_points = 1024;
  report.imag_axis_clearance = imag_axis_clearance(sys, cfg);
  return report;
}

std::pair<bool, RootReport> is_exponentially_stable(const TdsSystem& sys, int order) {
  RootReport report = rightmost_roots(sys, order, std::min(6, sys.n() * (order + 1)));
  return {report.rightmost_real_part < -1e-8, std::move(report)};
}

double imag_axis_clearance(const TdsSystem& sys, const SweepConfig& cfg) {
  const double norm_sum = spectral_norm(sys.a0) + spectral_norm(sys.a1);
  SweepConfig eff = cfg;
  // the tail bound sigma_min(Delta(i omega)) >= omega - norm_sum needs
  // omega_max beyond the norm sum
  if (eff.omega_max <= norm_sum + 1.0) eff.omega_max = norm_sum + 1.0;
  const SweepExtremum grid_min =
      sweep_minimize([&sys](double w) { return clearance_at(sys, w); }, eff);
  const double tail = eff.omega_max - norm_sum;
  return std::min(grid_min.value, tail);
}

}  // namespace tdsr
