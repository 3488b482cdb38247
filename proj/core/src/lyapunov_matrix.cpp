#include "tdsrobust/lyapunov_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "tdsrobust/spectrum.hpp"
#include "tdsrobust/sweep.hpp"

namespace tdsr {

namespace {

// K vec(M) = vec(M') for n x n M, column-major vec
Mat commutation_matrix(int n) {
  Mat k = Mat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(j + i * n, i + j * n) = 1.0;
  return k;
}

Mat unvec(const Vec& v, int n) {
  return Eigen::Map<const Mat>(v.data(), n, n);
}

}  // namespace

Mat DelayLyapunovMatrix::psi(double tau) const {
  if (tau < 0.0) return psi(-tau).transpose();
  if (tau > h * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "psi is defined on [-h, h]");
  const Mat propagator = (flow * std::min(tau, h)).exp();
  const Vec state = propagator * state0;
  return unvec(state.head(n * n), n);
}

DelayLyapunovMatrix delay_lyapunov_matrix(const TdsSystem& sys, const Mat& w) {
  const int n = sys.n();
  if (w.rows() != n || w.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "w must be n x n");
  if ((w - w.transpose()).norm() > 1e-8 * (1.0 + w.norm()))
    throw Error(ErrorCode::AsymmetricPi, "w must be symmetric");

  const Mat id = Mat::Identity(n, n);
  const int nn = n * n;
  // Y' = Y a0 + Z a1,  Z' = -a1' Y - a0' Z  on [0, h]
  Mat flow(2 * nn, 2 * nn);
  flow.topLeftCorner(nn, nn) = Eigen::kroneckerProduct(sys.a0.transpose(), id);
  flow.topRightCorner(nn, nn) = Eigen::kroneckerProduct(sys.a1.transpose(), id);
  flow.bottomLeftCorner(nn, nn) = -Eigen::kroneckerProduct(id, sys.a1.transpose());
  flow.bottomRightCorner(nn, nn) = -Eigen::kroneckerProduct(id, sys.a0.transpose());

  const Mat e = (flow * sys.h).exp();
  const Mat k = commutation_matrix(n);

  // row 1: Z(h) = Y(0)  (the shifted copy meets Psi(0) at tau = h)
  // row 2: Psi'(0+) + Psi'(0+)' = -w with Psi'(0+) = Y0 a0 + Z0 a1
  Mat system(2 * nn, 2 * nn);
  system.topLeftCorner(nn, nn) = e.bottomLeftCorner(nn, nn) - Mat::Identity(nn, nn);
  system.topRightCorner(nn, nn) = e.bottomRightCorner(nn, nn);
  system.bottomLeftCorner(nn, nn) =
      Eigen::kroneckerProduct(sys.a0.transpose(), id) + Eigen::kroneckerProduct(id, sys.a0.transpose());
  system.bottomRightCorner(nn, nn) =
      Eigen::kroneckerProduct(sys.a1.transpose(), id) + Eigen::kroneckerProduct(id, sys.a1.transpose()) * k;

  Vec rhs = Vec::Zero(2 * nn);
  rhs.tail(nn) = -Eigen::Map<const Vec>(w.data(), nn);

  Eigen::FullPivLU<Mat> lu(system);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularLinearSolve,
                "delay Lyapunov boundary system singular (Lyapunov condition violated)");
  const Vec sol = lu.solve(rhs);

  DelayLyapunovMatrix dlm;
  dlm.n = n;
  dlm.h = sys.h;
  dlm.w = sym(w);
  dlm.y0 = unvec(sol.head(nn), n);
  dlm.z0 = unvec(sol.tail(nn), n);
  dlm.flow = std::move(flow);
  dlm.state0 = sol;
  return dlm;
}

CompleteTypeBound complete_type_gamma(const TdsSystem& sys, const Mat& w0, const Mat& w1,
                                      const Mat& w2) {
  auto [stable, report] = is_exponentially_stable(sys);
  if (!stable) {
    throw Error(ErrorCode::UnstableNominal,
                "complete-type bound needs an exponentially stable nominal system "
                "(rightmost real part " +
                    std::to_string(report.rightmost_real_part) + ")");
  }
  auto lmin = [](const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(sym(m));
    return es.eigenvalues().minCoeff();
  };
  const double a1_norm = spectral_norm(sys.a1);
  const double t0 = lmin(w0) / (2.0 + sys.h * a1_norm);
  const double t1 = lmin(w1) / (1.0 + sys.h * a1_norm);
  const double t2 =
      (a1_norm > 0.0) ? lmin(w2) / a1_norm : std::numeric_limits<double>::infinity();
  CompleteTypeBound bound;
  bound.numerator = std::min(t0, std::min(t1, t2));

  const Mat w_total = w0 + w1 + sys.h * w2;
  const DelayLyapunovMatrix dlm = delay_lyapunov_matrix(sys, w_total);
  bound.psi0 = sym(dlm.y0);
  Eigen::SelfAdjointEigenSolver<Mat> es(bound.psi0);
  bound.lambda_max_psi0 = es.eigenvalues().maxCoeff();
  if (!(bound.lambda_max_psi0 > 0.0))
    throw Error(ErrorCode::SingularLinearSolve, "Psi(0) not positive; Lyapunov solve inconsistent");
  bound.gamma = bound.numerator / bound.lambda_max_psi0;
  return bound;
}

}  // namespace tdsr
