#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tdsrobust/sweep.hpp"
#include "tdsrobust/types.hpp"

namespace tdsr {

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

enum class CertKind { GammaMax, RhoMin, K1Min, WDefinite };

const char* cert_kind_name(CertKind kind);

struct Certificate {
  CertKind kind = CertKind::WDefinite;
  double value = 0.0;
  double critical_omega = 0.0;
  double margin = 0.0;  // for WDefinite: min over the refined grid of lambda_min(W)
  std::vector<AssumptionCheck> assumptions;
  double tail_cutoff = 0.0;
  bool degenerate = false;  // bound vacuous (every parameter admissible); value is a -inf sentinel

  bool assumptions_pass() const;
};

enum class CertOutcome { Certified, Denied, Inconclusive, AssumptionFailure };

// Margin within +/- refine_tol of zero is inconclusive; failed assumption
// checks dominate everything else.
CertOutcome certificate_outcome(const Certificate& cert, double refine_tol);

// max over omega >= 0 of ||G(i omega)||_2 and its argmax; coarse grid +
// golden-section refinement + analytic tail bound.  The sweep interval is
// doubled (up to a cap) while the tail bound exceeds the grid maximum.
std::pair<double, double> hinf_norm(const TdsSystem& sys, const PerturbationStructure& ps,
                                    const SweepConfig& cfg);

// Largest admissible gamma for the plain norm-bound sector: 1 / hinf_norm.
Certificate gamma_max(const TdsSystem& sys, const PerturbationStructure& ps,
                      const SweepConfig& cfg);

// Required excess of output passivity: max over omega of the largest
// eigenvalue of He(-G(i omega)).  A nonpositive sweep maximum clamps to 0
// (the supremum is then approached only in the omega -> infinity limit).
Certificate rho_min(const TdsSystem& sys, const PerturbationStructure& ps, const SweepConfig& cfg);

// Smallest admissible lower sector bound k1 for fixed upper bound k2 I:
// k2 - 1 / max_omega mu2(G_II(i omega)) with G_II from the gain-shifted
// system.  A nonpositive maximum makes every k1 < k2 admissible; the
// certificate is then flagged degenerate with a -infinity value.
Certificate k1_min(const TdsSystem& sys, const PerturbationStructure& ps, double k2,
                   const SweepConfig& cfg);

// Uniform positive definiteness of W(i omega): margin = min over the refined
// grid of lambda_min(W), floored against the analytic tail bound.
Certificate certify_w(const TdsSystem& sys, const PerturbationStructure& ps,
                      const SectorRestriction& sec, const SweepConfig& cfg);

// Lower bound on lambda_min(W(i nu)) valid for all |nu| >= omega, from
// ||G(i nu)|| <= ||[c1;c0]|| ||b|| / (nu - ||a0|| - ||a1||).
double tail_bound(const TdsSystem& sys, const PerturbationStructure& ps,
                  const SectorRestriction& sec, double omega);

// One row of sweep diagnostics for CSV export.
struct SweepSample {
  double omega = 0.0;
  double lambda_min_w = 0.0;
  double g_norm = 0.0;
};

std::vector<SweepSample> sweep_samples(const TdsSystem& sys, const PerturbationStructure& ps,
                                       const SectorRestriction& sec, const SweepConfig& cfg);

}  // namespace tdsr
