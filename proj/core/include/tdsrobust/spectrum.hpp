#pragma once

#include <vector>

#include "tdsrobust/sweep.hpp"
#include "tdsrobust/types.hpp"

namespace tdsr {

struct RootReport {
  std::vector<Complex> roots;      // rightmost cluster, descending real part
  std::vector<bool> polished;      // false where Newton refinement diverged
  double rightmost_real_part = 0.0;
  double imag_axis_clearance = 0.0;  // min over grid of sigma_min(Delta(i omega))
  int discretization_order = 0;
};

// Rightmost characteristic roots via Chebyshev collocation of the shift
// generator, Newton-polished on the characteristic matrix through its
// smallest singular pair.
RootReport rightmost_roots(const TdsSystem& sys, int order, int count);

// True iff the polished rightmost real part is < -1e-8 (roots closer to the
// axis do not count as stable).
std::pair<bool, RootReport> is_exponentially_stable(const TdsSystem& sys, int order = 24);

// min over omega of sigma_min(Delta(i omega)); positive value certifies the
// absence of imaginary-axis characteristic roots.  The sweep interval is
// extended automatically until the analytic tail bound
// sigma_min >= omega - ||a0|| - ||a1|| applies.
double imag_axis_clearance(const TdsSystem& sys, const SweepConfig& cfg);

}  // namespace tdsr
