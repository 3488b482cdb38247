#pragma once

#include "tdsrobust/types.hpp"

namespace tdsr {

// Solves a'x + x a + q = 0 for symmetric q via complex Schur reduction of a
// (Bartels-Stewart).  Requires lambda_i(a) + lambda_j(a) != 0 for all pairs;
// a Hurwitz is sufficient.
Mat lyapunov_solve(const Mat& a, const Mat& q);

struct NewtonKleinmanResult {
  Mat x;
  int iters = 0;
  double residual = 0.0;          // relative residual of a'x + xa + q + x s x = 0
  bool closed_loop_stable = false;
  bool converged = false;
};

// Stabilizing solution of  a'x + x a + q + x s x = 0  (s = b r^{-1} b' >= 0)
// by Newton-Kleinman from x = 0.  Requires a Hurwitz (zero initial feedback
// must stabilize); iterates x_{k+1} from the Lyapunov equation of the closed
// loop a + s x_k and stops at relative residual <= tol.
// Throws AreNoStabilizingSolution when a or any closed loop is not Hurwitz,
// or when the iteration fails to converge.
NewtonKleinmanResult newton_kleinman(const Mat& a, const Mat& q, const Mat& s,
                                     double tol = 1e-10, int max_iters = 50);

}  // namespace tdsr
