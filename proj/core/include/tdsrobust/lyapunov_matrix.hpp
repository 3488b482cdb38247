#pragma once

#include "tdsrobust/types.hpp"

namespace tdsr {

// Delay Lyapunov matrix Psi on [-h, h] for  x'(t) = a0 x(t) + a1 x(t-h):
//   Psi'(tau)  = Psi(tau) a0 + Psi(tau - h) a1           (tau in [0, h])
//   Psi(-tau)  = Psi(tau)'
//   Psi'(0+) + Psi'(0+)' = -w
// computed from the coupled matrix ODE on [0, h] in (Y, Z) = (Psi, shifted
// Psi) via one matrix exponential of the 2n^2 system, with the boundary
// conditions imposed as a linear solve.
struct DelayLyapunovMatrix {
  int n = 0;
  double h = 0.0;
  Mat w;        // the prescribed derivative jump
  Mat y0;       // Psi(0)
  Mat z0;       // Psi(-h) = Psi(h)'
  Mat flow;     // 2 n^2 generator of the coupled ODE
  Vec state0;   // stacked (vec Y(0), vec Z(0))

  // Psi(tau) for tau in [-h, h]
  Mat psi(double tau) const;
};

DelayLyapunovMatrix delay_lyapunov_matrix(const TdsSystem& sys, const Mat& w);

struct CompleteTypeBound {
  double gamma = 0.0;
  double numerator = 0.0;        // min of the three quadratic-term coefficients
  double lambda_max_psi0 = 0.0;
  Mat psi0;
};

// Largest perturbation norm bound certified by the functional whose nominal
// derivative is prescribed as the three quadratic terms with weights
// (w0, w1, w2): gamma = min{ lmin(w0)/(2 + h||a1||), lmin(w1)/(1 + h||a1||),
// lmin(w2)/||a1|| } / lmax(Psi(0)), with Psi built for w0 + w1 + h w2.
// Throws UnstableNominal when the system is not exponentially stable.
CompleteTypeBound complete_type_gamma(const TdsSystem& sys, const Mat& w0, const Mat& w1,
                                      const Mat& w2);

}  // namespace tdsr
