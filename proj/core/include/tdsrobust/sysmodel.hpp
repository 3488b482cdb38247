#pragma once

#include <optional>

#include "tdsrobust/types.hpp"

namespace tdsr {

// ---- Sector presets ---------------------------------------------------------
//
// Each constructor realizes one standard restriction on the map a as a
// (pi_zz, pi_za, pi_aa) triple with pi_aa < 0.

// ||a(zeta)|| <= gamma ||zeta||:  pi_zz = gamma^2 I_p, pi_za = 0, pi_aa = -I_m.
SectorRestriction sector_norm_bound(double gamma, int p, int m);

// ||W a(zeta)|| <= gamma ||L zeta||:  pi_zz = gamma^2 L'L, pi_aa = -W'W.
SectorRestriction sector_weighted_norm_bound(double gamma, const Mat& l, const Mat& w);

// a(zeta)'zeta >= rho a(zeta)'a(zeta) (excess of output passivity):
// pi_zz = 0, 2 pi_za = I_m, pi_aa = -rho I_m.  Requires p = m, rho > 0.
SectorRestriction sector_passivity(double rho, int m);

// Sign-flipped variant: a(zeta)'zeta <= -rho_hat a(zeta)'a(zeta).
SectorRestriction sector_passivity_flipped(double rho_hat, int m);

// (a - K1 zeta)'(K2 zeta - a) >= 0:
// pi_zz = -sym(K1'K2), 2 pi_za = K1' + K2', pi_aa = -I_m.
SectorRestriction sector_bounds(const Mat& k1, const Mat& k2);

// Same cone scaled by K2^{-1} (requires square K1, K2 with K2 symmetric > 0):
// pi_zz = -sym(K1), 2 pi_za = I + K1' K2^{-1}, pi_aa = -K2^{-1}.
SectorRestriction sector_bounds_scaled(const Mat& k1, const Mat& k2);

// Same cone scaled by +/- (K1'K2)^{-1}; the sign sigma is chosen so that
// pi_aa = sigma sym(K1^{-T} K2^{-1}) is negative definite (sigma = +1 when
// 0 lies strictly between the bounds, -1 when both bounds have equal sign):
// pi_zz = sigma I, 2 pi_za = -sigma (K1^{-1} + K2^{-1}), pi_aa as above.
// `sign` overrides the automatic choice.
SectorRestriction sector_bounds_inverse(const Mat& k1, const Mat& k2,
                                        std::optional<int> sign = std::nullopt);

// ---- Loop transformations ---------------------------------------------------

// Zeroes the mixed block: feeds the linear center of the sector cone back
// into the system matrices.  Output satisfies sector.pi_za = 0 exactly.
// Idempotent.
TransformedSystem transformation_one(const TdsSystem& sys, const PerturbationStructure& ps,
                                     const SectorRestriction& sec);

// Zeroes the quadratic block for a scalar sector [k1 I, k2 I] (p = m, or one
// identical copy per output block): shifts the full upper gain k2 into the
// system and leaves pi_zz = 0, 2 pi_za = -(k2 - k1) S, pi_aa = -I with S the
// conformal identity stack.
TransformedSystem transformation_two(const TdsSystem& sys, const PerturbationStructure& ps,
                                     double k1, double k2);

// ---- Frequency-domain maps --------------------------------------------------

// Delta(s) = s I - a0 - e^{-s h} a1
CMat char_matrix(const TdsSystem& sys, Complex s);

// G(s) = [c1 e^{-s h}; c0] Delta(s)^{-1} b,  p x m
CMat transfer_g(const TdsSystem& sys, const PerturbationStructure& ps, Complex s);

// W(i omega) = -[G; -I]^H Pi [G; -I], Hermitian-symmetrized on return.
// Positive definiteness of W over all omega is the existence test for the
// robust functional.
CMat w_matrix(const TdsSystem& sys, const PerturbationStructure& ps,
              const SectorRestriction& sec, double omega);

// ---- State-cost assembly ----------------------------------------------------

// Splits a transformed (block-diagonal) pi_zz into the state costs
// q1 = c1' pi_zz^{11} c1 and q0 = c0' pi_zz^{00} c0.  The off-diagonal
// coupling must vanish to 1e-10 relative.
QPair q_pair(const PerturbationStructure& ps, const SectorRestriction& sec_trafo1);

}  // namespace tdsr
