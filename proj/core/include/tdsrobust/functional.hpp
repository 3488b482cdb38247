#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tdsrobust/collocation.hpp"
#include "tdsrobust/types.hpp"

namespace tdsr {

// Quadratic segment functional
//   V(phi) = phi(0)' p_xx phi(0) + 2 int phi(0)' P_xz(s) phi(s) ds
//          + int int phi(s)' P_zz(s, t) phi(t) dt ds + int phi(s)' q1 phi(s) ds
// held as kernel samples on the discretization nodes.  Node 0 carries the
// endpoint value; the quadrature parts run over the interior nodes, so the
// node-0 kernel samples are extrapolated values for inspection and export
// only.  The (sys, ps, sec) triple records what the functional certifies.
struct LkFunctional {
  Mat p_xx;
  std::vector<Mat> p_xz;               // per node, n x n
  std::vector<std::vector<Mat>> p_zz;  // per node pair, n x n
  Mat q1_diag;
  Discretization disc;
  TdsSystem sys;
  PerturbationStructure ps;
  SectorRestriction sec;

  LkFunctional(Mat p_xx_, std::vector<Mat> p_xz_, std::vector<std::vector<Mat>> p_zz_,
               Mat q1_diag_, Discretization disc_, TdsSystem sys_, PerturbationStructure ps_,
               SectorRestriction sec_)
      : p_xx(std::move(p_xx_)),
        p_xz(std::move(p_xz_)),
        p_zz(std::move(p_zz_)),
        q1_diag(std::move(q1_diag_)),
        disc(std::move(disc_)),
        sys(std::move(sys_)),
        ps(std::move(ps_)),
        sec(std::move(sec_)) {}
};

struct AreSolveReport {
  double residual = 0.0;
  int newton_iters = 0;
  bool closed_loop_stable = false;
  int n_state = 0;  // n (order + 1): node 0 doubles as the endpoint coordinate
};

// Solves the discretized operator Riccati equation for the loop-shifted
// system and extracts the kernels.  `tol` is the relative Riccati residual
// target.  Throws AreNoStabilizingSolution at or beyond the existence
// boundary, NotBlockDiagonal when the transformed sector does not split,
// IllConditionedQuadrature when kernel de-weighting would blow up.
std::pair<LkFunctional, AreSolveReport> build_functional(const TdsSystem& sys,
                                                         const PerturbationStructure& ps,
                                                         const SectorRestriction& sec,
                                                         const Discretization& disc,
                                                         double tol = 1e-10);

// phi: n x (order+1), column j holding phi(theta_j).
double evaluate_V(const LkFunctional& lk, const Mat& phi);

// v(phi) = p_xx phi(0) + int P_xz(s) phi(s) ds; the pure-integral part of V
// contributes nothing.
Vec evaluate_v(const LkFunctional& lk, const Mat& phi);

// Derivative of V along the flow of `flow_sys` (no perturbation), evaluated
// through the collocation generator acting on the sampled segment.
double derivative_along(const LkFunctional& lk, const TdsSystem& flow_sys, const Mat& phi);

// Both sides of the prescribed-derivative relation: the nominal derivative
// computed through the generator vs the sector-induced right-hand side built
// from v(phi) and the output map.  Returns |lhs - rhs| / (1 + |rhs|).
double defining_equation_residual(const LkFunctional& lk, const Mat& phi);

struct PositivityProbe {
  double min_cubic_ratio = 0.0;        // min of V ||phi||_C / ||phi(0)||^3
  double min_razumikhin_ratio = 0.0;   // min of V / ||phi(0)||^2 over ||phi||_C = ||phi(0)||
  double min_value = 0.0;              // min of V itself over all draws
  int cubic_samples = 0;
  int razumikhin_samples = 0;
};

// Random smooth segments with ||phi||_C <= radius; every other draw is shaped
// so its maximum norm sits at the endpoint (Razumikhin-like set).
PositivityProbe positivity_probe(const LkFunctional& lk, int samples, double radius,
                                 std::uint64_t seed = 0);

// (h+1) ||P0||_2 + h ||q1||_2 with ||P0|| the operator norm of the
// discretized quadratic form; V(phi) <= coefficient * ||phi||_C^2.
double upper_bound_coefficient(const LkFunctional& lk);

// ---- Serialization ----------------------------------------------------------

// Self-describing JSON document; numbers survive a save/load round trip
// bit-exactly.
void save_functional(const LkFunctional& lk, const std::string& path);
LkFunctional load_functional(const std::string& path);

// Stable hash of the (system, structure, sector) triple, used to match a
// stored functional against a configuration.
std::string certified_triple_hash(const TdsSystem& sys, const PerturbationStructure& ps,
                                  const SectorRestriction& sec);

}  // namespace tdsr
