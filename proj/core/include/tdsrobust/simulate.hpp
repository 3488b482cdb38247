#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tdsrobust/functional.hpp"
#include "tdsrobust/types.hpp"

namespace tdsr {

// The perturbation map a(t, zeta); a(., 0) = 0 is checked at construction.
class Nonlinearity {
public:
  enum class Kind { LinearGain, Saturation, CubicDiagonal, TimeVaryingGain, Custom };

  static Nonlinearity linear_gain(Mat gain);
  // a(zeta) = slope * clamp(zeta, +/- limit), componentwise; sector [0, slope]
  static Nonlinearity saturation(double slope, double limit, int m);
  // a_i(zeta) = signs_i * zeta_i^3
  static Nonlinearity cubic_diagonal(Vec signs);
  static Nonlinearity time_varying_gain(std::function<Mat(double)> gain_of_t, int m, int p,
                                        std::string descriptor);
  static Nonlinearity custom(std::function<Vec(double, const Vec&)> fn, int m, int p,
                             std::string descriptor);

  Vec operator()(double t, const Vec& zeta) const { return fn_(t, zeta); }
  Kind kind() const { return kind_; }
  int m() const { return m_; }
  int p() const { return p_; }
  const std::string& descriptor() const { return descriptor_; }

private:
  Nonlinearity(Kind kind, std::function<Vec(double, const Vec&)> fn, int m, int p,
               std::string descriptor);

  Kind kind_;
  std::function<Vec(double, const Vec&)> fn_;
  int m_;
  int p_;
  std::string descriptor_;
};

// One integration step with endpoint derivatives for cubic Hermite dense
// output.
struct StepRecord {
  double t0 = 0.0;
  double dt = 0.0;
  Vec x0, f0, x1, f1;
};

struct Trajectory {
  double step = 0.0;
  double t_end = 0.0;
  int n = 0;
  std::function<Vec(double)> phi0;  // history on [-h, 0]
  std::vector<StepRecord> steps;
  bool blew_up = false;   // norm passed 1e12; history truncated at t_blowup
  double t_blowup = 0.0;

  // x(t) for t in [-h, covered_end()]; t <= 0 evaluates the initial function
  Vec eval(double t) const;
  double covered_end() const { return steps.empty() ? 0.0 : steps.back().t0 + steps.back().dt; }
};

// Fixed-step classical Runge-Kutta over the perturbed system
//   x' = a0 x + a1 x(t-h) - b a(t, zeta(x_t)),
// with the delayed argument read from the previous steps' Hermite
// interpolants (step <= h/4 keeps every stage argument in known history).
// Divergence (norm > 1e12) truncates the trajectory and sets blew_up.
Trajectory integrate(const TdsSystem& sys, const PerturbationStructure& ps, const Nonlinearity& nl,
                     std::function<Vec(double)> phi0, double step, double t_end);

// Segment x_t resampled on the functional's nodes.
Mat segment_samples(const LkFunctional& lk, const Trajectory& traj, double t);

std::vector<std::pair<double, double>> functional_along(const LkFunctional& lk,
                                                        const Trajectory& traj,
                                                        const std::vector<double>& times);

// Compares the finite-difference derivative of V along the trajectory
// (central differences + one Richardson step) with the flow derivative plus
// the perturbation correction 2 v(x_t)' g(x_t).  Returns the largest
// normalized mismatch over `times`.
double perturbation_derivative_check(const LkFunctional& lk, const TdsSystem& sys,
                                     const PerturbationStructure& ps, const Nonlinearity& nl,
                                     const Trajectory& traj, const std::vector<double>& times);

struct SectorMembership {
  double fraction_inside = 0.0;
  double worst_margin = 0.0;
  Vec worst_zeta;
};

// Samples zeta in the radius ball and evaluates the sector form on
// (zeta, a(zeta)); with offset k3 the requirement is w >= k3 ||zeta||^2.
SectorMembership sector_membership(const Nonlinearity& nl, const PerturbationStructure& ps,
                                   const SectorRestriction& sec, int samples, double radius,
                                   std::uint64_t seed = 0, double offset_k3 = 0.0);

}  // namespace tdsr
