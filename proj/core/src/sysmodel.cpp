#include "tdsrobust/sysmodel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace tdsr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AsymmetricPi: return "AsymmetricPi";
    case ErrorCode::NonNegativeDefinitePiAa: return "NonNegativeDefinitePiAa";
    case ErrorCode::SingularPiAa: return "SingularPiAa";
    case ErrorCode::InvalidSectorOrder: return "InvalidSectorOrder";
    case ErrorCode::SingularCharMatrix: return "SingularCharMatrix";
    case ErrorCode::NotBlockDiagonal: return "NotBlockDiagonal";
    case ErrorCode::TailBoundInvalid: return "TailBoundInvalid";
    case ErrorCode::DegenerateBound: return "DegenerateBound";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::AreNoStabilizingSolution: return "AreNoStabilizingSolution";
    case ErrorCode::IllConditionedQuadrature: return "IllConditionedQuadrature";
    case ErrorCode::NodeMismatch: return "NodeMismatch";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::UnstableNominal: return "UnstableNominal";
    case ErrorCode::SingularLinearSolve: return "SingularLinearSolve";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

namespace {

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// Symmetrize, refusing inputs whose asymmetry exceeds round-off noise.
Mat symmetrized(const Mat& m, const char* label) {
  const double skew = (m - m.transpose()).norm();
  if (skew > 1e-8 * (1.0 + m.norm())) {
    std::ostringstream os;
    os << label << " asymmetric: ||M - M'|| = " << skew;
    throw Error(ErrorCode::AsymmetricPi, os.str());
  }
  return sym(m);
}

double lambda_max_sym(const Mat& m) {
  if (m.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

TdsSystem::TdsSystem(Mat a0_, Mat a1_, double h_) : a0(std::move(a0_)), a1(std::move(a1_)), h(h_) {
  require(a0.rows() >= 1 && a0.rows() == a0.cols(), ErrorCode::DimensionMismatch, "a0 must be square, n >= 1");
  require(a1.rows() == a0.rows() && a1.cols() == a0.cols(), ErrorCode::DimensionMismatch,
          "a1 must match a0 dimensions");
  require(h > 0.0, ErrorCode::InvalidArgument, "delay h must be > 0");
}

PerturbationStructure::PerturbationStructure(Mat b_, Mat c1_, Mat c0_)
    : b(std::move(b_)), c1(std::move(c1_)), c0(std::move(c0_)) {
  const int nn = static_cast<int>(b.rows());
  require(nn >= 1 && b.cols() >= 1, ErrorCode::DimensionMismatch, "b must be n x m with n, m >= 1");
  if (c1.rows() == 0 && c1.cols() == 0) c1.resize(0, nn);
  if (c0.rows() == 0 && c0.cols() == 0) c0.resize(0, nn);
  require(c1.cols() == nn, ErrorCode::DimensionMismatch, "c1 column count must equal n");
  require(c0.cols() == nn, ErrorCode::DimensionMismatch, "c0 column count must equal n");
  require(c1.rows() + c0.rows() >= 1, ErrorCode::DimensionMismatch, "need p = p1 + p0 >= 1");
}

Mat PerturbationStructure::stacked_c() const {
  Mat c(p(), n());
  c.topRows(p1()) = c1;
  c.bottomRows(p0()) = c0;
  return c;
}

Vec PerturbationStructure::output(const Vec& phi_mh, const Vec& phi_0) const {
  require(phi_mh.size() == n() && phi_0.size() == n(), ErrorCode::DimensionMismatch,
          "segment endpoint dimension mismatch");
  Vec zeta(p());
  zeta.head(p1()) = c1 * phi_mh;
  zeta.tail(p0()) = c0 * phi_0;
  return zeta;
}

SectorRestriction::SectorRestriction(Mat pi_zz_, Mat pi_za_, Mat pi_aa_)
    : pi_zz(std::move(pi_zz_)), pi_za(std::move(pi_za_)), pi_aa(std::move(pi_aa_)) {
  require(pi_zz.rows() == pi_zz.cols() && pi_zz.rows() >= 1, ErrorCode::DimensionMismatch,
          "pi_zz must be square, p >= 1");
  require(pi_aa.rows() == pi_aa.cols() && pi_aa.rows() >= 1, ErrorCode::DimensionMismatch,
          "pi_aa must be square, m >= 1");
  require(pi_za.rows() == pi_zz.rows() && pi_za.cols() == pi_aa.rows(), ErrorCode::DimensionMismatch,
          "pi_za must be p x m");
  pi_zz = symmetrized(pi_zz, "pi_zz");
  pi_aa = symmetrized(pi_aa, "pi_aa");
  if (lambda_max_sym(pi_aa) >= 0.0) {
    throw Error(ErrorCode::NonNegativeDefinitePiAa,
                "pi_aa must be negative definite (largest eigenvalue >= 0)");
  }
}

double SectorRestriction::evaluate(const Vec& zeta, const Vec& a) const {
  require(zeta.size() == p() && a.size() == m(), ErrorCode::DimensionMismatch,
          "sector evaluate: argument dimensions");
  return zeta.dot(pi_zz * zeta) + 2.0 * zeta.dot(pi_za * a) + a.dot(pi_aa * a);
}

Mat SectorRestriction::full() const {
  Mat f(p() + m(), p() + m());
  f.topLeftCorner(p(), p()) = pi_zz;
  f.topRightCorner(p(), m()) = pi_za;
  f.bottomLeftCorner(m(), p()) = pi_za.transpose();
  f.bottomRightCorner(m(), m()) = pi_aa;
  return f;
}

// ---- Presets ----------------------------------------------------------------

SectorRestriction sector_norm_bound(double gamma, int p, int m) {
  require(gamma >= 0.0, ErrorCode::InvalidArgument, "gamma must be >= 0");
  require(p >= 1 && m >= 1, ErrorCode::DimensionMismatch, "p, m >= 1");
  return SectorRestriction(gamma * gamma * Mat::Identity(p, p), Mat::Zero(p, m),
                           -Mat::Identity(m, m));
}

SectorRestriction sector_weighted_norm_bound(double gamma, const Mat& l, const Mat& w) {
  require(gamma >= 0.0, ErrorCode::InvalidArgument, "gamma must be >= 0");
  require(l.cols() >= 1 && w.cols() >= 1, ErrorCode::DimensionMismatch, "l, w nonempty");
  const int p = static_cast<int>(l.cols());
  const int m = static_cast<int>(w.cols());
  return SectorRestriction(gamma * gamma * l.transpose() * l, Mat::Zero(p, m),
                           -w.transpose() * w);
}

SectorRestriction sector_passivity(double rho, int m) {
  require(m >= 1, ErrorCode::DimensionMismatch, "m >= 1");
  require(rho > 0.0, ErrorCode::NonNegativeDefinitePiAa, "passivity excess rho must be > 0");
  return SectorRestriction(Mat::Zero(m, m), 0.5 * Mat::Identity(m, m),
                           -rho * Mat::Identity(m, m));
}

SectorRestriction sector_passivity_flipped(double rho_hat, int m) {
  require(m >= 1, ErrorCode::DimensionMismatch, "m >= 1");
  require(rho_hat > 0.0, ErrorCode::NonNegativeDefinitePiAa, "rho_hat must be > 0");
  return SectorRestriction(Mat::Zero(m, m), -0.5 * Mat::Identity(m, m),
                           -rho_hat * Mat::Identity(m, m));
}

SectorRestriction sector_bounds(const Mat& k1, const Mat& k2) {
  require(k1.rows() == k2.rows() && k1.cols() == k2.cols(), ErrorCode::DimensionMismatch,
          "k1, k2 must have identical m x p shape");
  require(k1.rows() >= 1 && k1.cols() >= 1, ErrorCode::DimensionMismatch, "k1, k2 nonempty");
  const int m = static_cast<int>(k1.rows());
  return SectorRestriction(-sym(k1.transpose() * k2), 0.5 * (k1.transpose() + k2.transpose()),
                           -Mat::Identity(m, m));
}

SectorRestriction sector_bounds_scaled(const Mat& k1, const Mat& k2) {
  require(k1.rows() == k1.cols() && k2.rows() == k2.cols() && k1.rows() == k2.rows(),
          ErrorCode::DimensionMismatch, "scaled form needs square k1, k2 with p = m");
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(k2));
  require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::NonNegativeDefinitePiAa,
          "scaled form needs k2 symmetric positive definite");
  const Mat k2inv = sym(k2).inverse();
  const int m = static_cast<int>(k1.rows());
  return SectorRestriction(-sym(k1), 0.5 * (Mat::Identity(m, m) + k1.transpose() * k2inv),
                           -k2inv);
}

SectorRestriction sector_bounds_inverse(const Mat& k1, const Mat& k2, std::optional<int> sign) {
  require(k1.rows() == k1.cols() && k2.rows() == k2.cols() && k1.rows() == k2.rows(),
          ErrorCode::DimensionMismatch, "inverse form needs square k1, k2 with p = m");
  const int m = static_cast<int>(k1.rows());
  Eigen::FullPivLU<Mat> lu1(k1), lu2(k2);
  require(lu1.isInvertible() && lu2.isInvertible(), ErrorCode::InvalidArgument,
          "inverse form needs nonsingular k1, k2");
  const Mat k1inv = lu1.inverse();
  const Mat k2inv = lu2.inverse();
  const Mat core = sym(k1inv.transpose() * k2inv);
  int sigma;
  if (sign) {
    require(*sign == 1 || *sign == -1, ErrorCode::InvalidArgument, "sign must be +1 or -1");
    sigma = *sign;
  } else {
    // pi_aa = sigma * core must come out negative definite
    const double lmax = lambda_max_sym(core);
    const double lmin = -lambda_max_sym(-core);
    if (lmax < 0.0) sigma = 1;       // core < 0: zero inside the bounds
    else if (lmin > 0.0) sigma = -1; // core > 0: bounds of equal sign
    else
      throw Error(ErrorCode::NonNegativeDefinitePiAa,
                  "sym(k1^-T k2^-1) indefinite; no sign makes pi_aa negative definite");
  }
  return SectorRestriction(static_cast<double>(sigma) * Mat::Identity(m, m),
                           -0.5 * sigma * (k1inv + k2inv), static_cast<double>(sigma) * core);
}

// ---- Transformations --------------------------------------------------------

TransformedSystem transformation_one(const TdsSystem& sys, const PerturbationStructure& ps,
                                     const SectorRestriction& sec) {
  require(ps.n() == sys.n(), ErrorCode::DimensionMismatch, "structure/system dimension");
  require(sec.p() == ps.p() && sec.m() == ps.m(), ErrorCode::DimensionMismatch,
          "sector/structure dimension");
  Eigen::LLT<Mat> llt(-sec.pi_aa);
  require(llt.info() == Eigen::Success, ErrorCode::SingularPiAa, "-pi_aa not factorizable");
  // Z = (-pi_aa)^{-1} pi_za', m x p; columns split over [zeta1; zeta0]
  const Mat z = llt.solve(sec.pi_za.transpose());
  const Mat z1 = z.leftCols(ps.p1());
  const Mat z0 = z.rightCols(ps.p0());
  Mat a0t = sys.a0 - ps.b * z0 * ps.c0;
  Mat a1t = sys.a1 - ps.b * z1 * ps.c1;
  Mat pi_zz_t = sec.pi_zz + sec.pi_za * z;
  return TransformedSystem{TdsSystem(std::move(a0t), std::move(a1t), sys.h),
                           SectorRestriction(sym(pi_zz_t), Mat::Zero(sec.p(), sec.m()), sec.pi_aa),
                           TransformKind::TrafoI};
}

TransformedSystem transformation_two(const TdsSystem& sys, const PerturbationStructure& ps,
                                     double k1, double k2) {
  require(ps.n() == sys.n(), ErrorCode::DimensionMismatch, "structure/system dimension");
  if (!(k2 > k1)) throw Error(ErrorCode::InvalidSectorOrder, "need k2 > k1");
  const int m = ps.m();
  const int p = ps.p();
  Mat a0t, a1t, stack;
  if (p == m) {
    // zeta already m-dimensional: shift through the stacked output
    Mat sc0(p, ps.n());
    sc0.topRows(ps.p1()).setZero();
    sc0.bottomRows(ps.p0()) = ps.c0;
    Mat sc1(p, ps.n());
    sc1.topRows(ps.p1()) = ps.c1;
    sc1.bottomRows(ps.p0()).setZero();
    a0t = sys.a0 - k2 * ps.b * sc0;
    a1t = sys.a1 - k2 * ps.b * sc1;
    stack = Mat::Identity(p, m);
  } else if (ps.p0() == m && ps.p1() == m) {
    // one copy of the gain per output block
    a0t = sys.a0 - k2 * ps.b * ps.c0;
    a1t = sys.a1 - k2 * ps.b * ps.c1;
    stack = Mat(p, m);
    stack.topRows(m) = Mat::Identity(m, m);
    stack.bottomRows(m) = Mat::Identity(m, m);
  } else {
    throw Error(ErrorCode::DimensionMismatch,
                "gain shift needs p = m, or p0 = p1 = m for a duplicated stack");
  }
  return TransformedSystem{TdsSystem(std::move(a0t), std::move(a1t), sys.h),
                           SectorRestriction(Mat::Zero(p, p), -0.5 * (k2 - k1) * stack,
                                             -Mat::Identity(m, m)),
                           TransformKind::TrafoII};
}

// ---- Frequency-domain maps --------------------------------------------------

CMat char_matrix(const TdsSystem& sys, Complex s) {
  const int n = sys.n();
  return s * CMat::Identity(n, n) - sys.a0.cast<Complex>() -
         std::exp(-s * sys.h) * sys.a1.cast<Complex>();
}

CMat transfer_g(const TdsSystem& sys, const PerturbationStructure& ps, Complex s) {
  require(ps.n() == sys.n(), ErrorCode::DimensionMismatch, "structure/system dimension");
  const CMat delta = char_matrix(sys, s);
  Eigen::JacobiSVD<CMat> svd(delta);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smax == 0.0 || smin < 1e-12 * smax) {
    std::ostringstream os;
    os << "char matrix numerically singular at s = (" << s.real() << ", " << s.imag()
       << "): sigma_min/sigma_max = " << (smax > 0 ? smin / smax : 0.0);
    throw Error(ErrorCode::SingularCharMatrix, os.str());
  }
  const CMat x = delta.partialPivLu().solve(ps.b.cast<Complex>());
  CMat g(ps.p(), ps.m());
  g.topRows(ps.p1()) = std::exp(-s * sys.h) * (ps.c1.cast<Complex>() * x);
  g.bottomRows(ps.p0()) = ps.c0.cast<Complex>() * x;
  return g;
}

CMat w_matrix(const TdsSystem& sys, const PerturbationStructure& ps,
              const SectorRestriction& sec, double omega) {
  require(sec.p() == ps.p() && sec.m() == ps.m(), ErrorCode::DimensionMismatch,
          "sector/structure dimension");
  const CMat g = transfer_g(sys, ps, Complex(0.0, omega));
  const int p = ps.p();
  const int m = ps.m();
  CMat t(p + m, m);
  t.topRows(p) = g;
  t.bottomRows(m) = -CMat::Identity(m, m);
  const CMat w = -t.adjoint() * sec.full().cast<Complex>() * t;
  return 0.5 * (w + w.adjoint());
}

// ---- State-cost assembly ----------------------------------------------------

QPair q_pair(const PerturbationStructure& ps, const SectorRestriction& sec_trafo1) {
  require(sec_trafo1.p() == ps.p(), ErrorCode::DimensionMismatch, "sector/structure dimension");
  const double za_norm = sec_trafo1.pi_za.norm();
  require(za_norm <= 1e-12 * (1.0 + sec_trafo1.pi_zz.norm()), ErrorCode::NotBlockDiagonal,
          "pi_za must vanish (apply the mixed-block transformation first)");
  const int p1 = ps.p1();
  const int p0 = ps.p0();
  const Mat& pzz = sec_trafo1.pi_zz;
  const double off_norm = pzz.topRightCorner(p1, p0).norm();
  if (off_norm > 1e-10 * pzz.norm()) {
    std::ostringstream os;
    os << "pi_zz couples the delayed and current outputs: ||off-diagonal block|| = " << off_norm
       << " vs ||pi_zz|| = " << pzz.norm();
    throw Error(ErrorCode::NotBlockDiagonal, os.str());
  }
  const int n = ps.n();
  QPair q{Mat::Zero(n, n), Mat::Zero(n, n)};
  if (p1 > 0) q.q1 = ps.c1.transpose() * pzz.topLeftCorner(p1, p1) * ps.c1;
  if (p0 > 0) q.q0 = ps.c0.transpose() * pzz.bottomRightCorner(p0, p0) * ps.c0;
  q.q0 = sym(q.q0);
  q.q1 = sym(q.q1);
  return q;
}

}  // namespace tdsr
