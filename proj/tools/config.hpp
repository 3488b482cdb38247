#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <tdsrobust/simulate.hpp>
#include <tdsrobust/sweep.hpp>
#include <tdsrobust/types.hpp>

namespace tdsr::cli {

// Sector restriction as named in a config file.  Scalar bound parameters are
// kept alongside the built matrices because the bounds command needs them to
// drive the loop-shifted sweep.
struct SectorSpec {
  std::string kind;  // norm_bound | weighted_norm_bound | passivity |
                     // passivity_flipped | sector_bounds | sector_bounds_scaled |
                     // sector_bounds_inverse | raw
  std::optional<double> gamma, rho, rho_hat, k1_scalar, k2_scalar;
  std::optional<Mat> l, w, k1_mat, k2_mat;
  std::optional<Mat> pi_zz, pi_za, pi_aa;
  std::optional<int> sign;

  SectorRestriction build(int p, int m) const;
};

struct NonlinearitySpec {
  std::string kind = "none";  // none | linear_gain | saturation | cubic
  std::optional<Mat> gain;
  double slope = 0.0;
  double limit = 1.0;
  std::optional<Vec> signs;

  Nonlinearity build(int m, int p) const;
};

struct SimulationSpec {
  std::optional<double> step;   // default h / 100
  std::optional<double> t_end;  // default 10 h
  int trajectories = 20;
  double radius = 1.0;
  int membership_samples = 2000;
  double monotonicity_tol = 1e-5;
  NonlinearitySpec nl;
  std::string phi0_kind = "random";  // random | constant
  std::optional<Vec> phi0_value;

  double step_or_default(double h) const;
  double t_end_or_default(double h) const;
};

struct SweepOverrides {
  std::optional<double> omega_max;
  std::optional<int> grid_points;
  std::optional<double> refine_tol;
  std::optional<int> max_refine_iters;
};

struct ProblemConfig {
  std::optional<TdsSystem> system;
  std::optional<PerturbationStructure> structure;
  std::optional<SectorSpec> sector;
  SweepOverrides sweep;
  int disc_order = 24;
  double are_tol = 1e-10;
  SimulationSpec sim;
  std::optional<Mat> ct_w0, ct_w1, ct_w2;              // complete-type weights, default I
  std::vector<std::array<double, 2>> ellipse_scales;   // {c1, c0} pairs
  int ellipse_points = 65;
  bool bounds_complete_type = false;
  double bounds_k2 = 1.0;  // upper bound fixed when the sector carries no scalar k2
  int spectrum_count = 8;
  std::string functional_path = "functional.json";

  const TdsSystem& sys() const;                  // throws ConfigError when absent
  const PerturbationStructure& ps() const;
  const SectorSpec& sec_spec() const;
  SectorRestriction sector_built() const;        // sec_spec().build at structure dims
  SweepConfig sweep_config(const TdsSystem& s) const;
};

ProblemConfig load_config(const std::string& path);

}  // namespace tdsr::cli
