#pragma once

#include <functional>

#include "tdsrobust/types.hpp"

namespace tdsr {

// Controls the frequency sweeps: coarse grid on [0, omega_max], golden-section
// refinement launched from every local extremum, analytic tail beyond.
struct SweepConfig {
  double omega_max = 0.0;
  int grid_points = 4096;
  double refine_tol = 1e-6;
  int max_refine_iters = 200;

  // omega_max = 10 (||a0|| + ||a1|| + 1 + 2 pi / h): delay systems have
  // frequency features at multiples of 2 pi / h.
  static SweepConfig defaults(const TdsSystem& sys);

  void validate() const;
};

struct SweepExtremum {
  double value = 0.0;
  double omega = 0.0;
};

// Global maximum of f on [0, omega_max]: coarse grid, then golden-section
// around every interior local maximum and both endpoints.
SweepExtremum sweep_maximize(const std::function<double(double)>& f, const SweepConfig& cfg);

SweepExtremum sweep_minimize(const std::function<double(double)>& f, const SweepConfig& cfg);

double spectral_norm(const Mat& m);

}  // namespace tdsr
