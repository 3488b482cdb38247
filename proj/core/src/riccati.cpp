#include "tdsrobust/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace tdsr {

namespace {

struct SchurForm {
  CMat t;  // upper triangular
  CMat u;  // unitary, a = u t u^H
  double max_real = 0.0;
};

SchurForm schur_of(const Mat& a) {
  Eigen::ComplexSchur<CMat> cs(a.cast<Complex>());
  if (cs.info() != Eigen::Success)
    throw Error(ErrorCode::SingularLinearSolve, "complex Schur decomposition failed");
  SchurForm f{cs.matrixT(), cs.matrixU(), 0.0};
  f.max_real = f.t(0, 0).real();
  for (int i = 1; i < f.t.rows(); ++i) f.max_real = std::max(f.max_real, f.t(i, i).real());
  return f;
}

// a'x + xa = c with a = u t u^H reduces to t^T y + y t = u^T c u,
// x = conj(u) y u^H; t^T is lower triangular so y comes out column by column.
Mat lyapunov_from_schur(const SchurForm& f, const Mat& c) {
  const int n = static_cast<int>(c.rows());
  const CMat ct = f.u.transpose() * c.cast<Complex>() * f.u;
  CMat y(n, n);
  const CMat tt = f.t.transpose();
  for (int j = 0; j < n; ++j) {
    CVec rhs = ct.col(j);
    for (int k = 0; k < j; ++k) rhs -= f.t(k, j) * y.col(k);
    // (t^T + t_jj I) z = rhs, lower triangular forward substitution
    CVec z(n);
    for (int i = 0; i < n; ++i) {
      Complex acc = rhs(i);
      for (int k = 0; k < i; ++k) acc -= tt(i, k) * z(k);
      const Complex diag = tt(i, i) + f.t(j, j);
      if (std::abs(diag) < 1e-300)
        throw Error(ErrorCode::SingularLinearSolve,
                    "Lyapunov operator singular (opposite eigenvalue pair)");
      z(i) = acc / diag;
    }
    y.col(j) = z;
  }
  const CMat x = f.u.conjugate() * y * f.u.adjoint();
  return 0.5 * (x.real() + x.real().transpose());
}

}  // namespace

Mat lyapunov_solve(const Mat& a, const Mat& q) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows())
    throw Error(ErrorCode::DimensionMismatch, "lyapunov_solve needs square a, q of equal size");
  return lyapunov_from_schur(schur_of(a), -q);
}

NewtonKleinmanResult newton_kleinman(const Mat& a, const Mat& q, const Mat& s, double tol,
                                     int max_iters) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || q.rows() != n || q.cols() != n || s.rows() != n || s.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "newton_kleinman dimension mismatch");

  NewtonKleinmanResult res;
  res.x = Mat::Zero(n, n);
  auto residual_of = [&](const Mat& x) {
    const Mat ax = a.transpose() * x;
    const Mat xsx = x * s * x;
    const Mat f = ax + ax.transpose() + q + xsx;
    const double scale = std::max(1.0, ax.norm() + q.norm() + xsx.norm());
    return f.norm() / scale;
  };

  for (int it = 0; it < max_iters; ++it) {
    const Mat a_cl = a + s * res.x;
    const SchurForm f = schur_of(a_cl);
    if (f.max_real >= 0.0) {
      std::ostringstream os;
      os << "closed loop not Hurwitz at iteration " << it << " (max real part " << f.max_real
         << "); no stabilizing solution reachable";
      throw Error(ErrorCode::AreNoStabilizingSolution, os.str());
    }
    res.x = lyapunov_from_schur(f, (res.x * s * res.x - q).eval());
    res.iters = it + 1;
    res.residual = residual_of(res.x);
    if (res.residual <= tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    std::ostringstream os;
    os << "no convergence in " << max_iters << " iterations (residual " << res.residual << ")";
    throw Error(ErrorCode::AreNoStabilizingSolution, os.str());
  }
  const SchurForm final_cl = schur_of(a + s * res.x);
  res.closed_loop_stable = final_cl.max_real < 0.0;
  return res;
}

}  // namespace tdsr
