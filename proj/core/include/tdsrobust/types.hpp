#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tdsr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  AsymmetricPi,             // input Pi block asymmetric beyond round-off
  NonNegativeDefinitePiAa,  // pi_aa fails to be negative definite
  SingularPiAa,
  InvalidSectorOrder,       // k2 <= k1
  SingularCharMatrix,
  NotBlockDiagonal,
  TailBoundInvalid,
  DegenerateBound,
  NewtonDivergence,
  AreNoStabilizingSolution,
  IllConditionedQuadrature,
  NodeMismatch,
  BlowUp,
  UnstableNominal,
  SingularLinearSolve,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

inline Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Retarded system  x'(t) = a0 x(t) + a1 x(t-h),  h > 0.
struct TdsSystem {
  TdsSystem(Mat a0_, Mat a1_, double h_);

  Mat a0;
  Mat a1;
  double h;

  int n() const { return static_cast<int>(a0.rows()); }
};

// Shapes the admissible perturbation g(x_t) = -b a(zeta) with
// zeta = [c1 x(t-h); c0 x(t)].  Either output block may be empty.
struct PerturbationStructure {
  PerturbationStructure(Mat b_, Mat c1_, Mat c0_);

  Mat b;   // n x m
  Mat c1;  // p1 x n, taps the delayed state
  Mat c0;  // p0 x n, taps the current state

  int n() const { return static_cast<int>(b.rows()); }
  int m() const { return static_cast<int>(b.cols()); }
  int p1() const { return static_cast<int>(c1.rows()); }
  int p0() const { return static_cast<int>(c0.rows()); }
  int p() const { return p1() + p0(); }

  Mat stacked_c() const;  // [c1; c0], p x n

  // zeta for a segment with endpoint values phi(-h), phi(0)
  Vec output(const Vec& phi_mh, const Vec& phi_0) const;
};

// Quadratic constraint  w(zeta, a) = zeta'pi_zz zeta + 2 zeta'pi_za a + a'pi_aa a
// admitted (w >= 0) for the perturbation map a.  pi_aa must be negative definite.
struct SectorRestriction {
  SectorRestriction(Mat pi_zz_, Mat pi_za_, Mat pi_aa_);

  Mat pi_zz;  // p x p, symmetric
  Mat pi_za;  // p x m
  Mat pi_aa;  // m x m, symmetric negative definite

  int p() const { return static_cast<int>(pi_zz.rows()); }
  int m() const { return static_cast<int>(pi_aa.rows()); }

  double evaluate(const Vec& zeta, const Vec& a) const;

  // [[pi_zz, pi_za], [pi_za', pi_aa]], (p+m) x (p+m)
  Mat full() const;
};

enum class TransformKind { TrafoI, TrafoII };

// System + sector after a loop-shifting transformation; the pair admits the
// same family of perturbed systems as the original.
struct TransformedSystem {
  TdsSystem system;
  SectorRestriction sector;
  TransformKind kind;
};

// State-cost weights produced from a block-diagonal transformed sector:
// q0 acts on x(t), q1 on the delayed/distributed part.
struct QPair {
  Mat q0;
  Mat q1;
};

}  // namespace tdsr
