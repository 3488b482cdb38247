#pragma once

#include <cmath>
#include <random>

#include <tdsrobust/collocation.hpp>
#include <tdsrobust/sysmodel.hpp>
#include <tdsrobust/types.hpp>

namespace fx {

using tdsr::Mat;
using tdsr::Vec;

// x'(t) = a0 x(t) + a1 x(t-1) with a damped oscillator coupled to its delayed
// state; exponentially stable for every delay.
inline tdsr::TdsSystem ex18() {
  Mat a0(2, 2), a1(2, 2);
  a0 << 0, 1, -1, -2;
  a1 << 0, 0, -1, 1;
  return {a0, a1, 1.0};
}

// Full perturbation channel: b = I, both the delayed and the current state
// are tapped (p = 4, m = 2).
inline tdsr::PerturbationStructure ex18_unstructured() {
  return {Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2)};
}

// Perturbation enters the second equation only (b = [0;1], m = 1).
inline tdsr::PerturbationStructure ex18_b01() {
  Mat b(2, 1);
  b << 0, 1;
  return {b, Mat::Identity(2, 2), Mat::Identity(2, 2)};
}

// Square channel: b = I, only the current state tapped (p = m = 2).
inline tdsr::PerturbationStructure ex18_square() {
  return {Mat::Identity(2, 2), Mat::Zero(0, 2), Mat::Identity(2, 2)};
}

inline tdsr::TdsSystem scalar_sys(double a0, double a1, double h = 1.0) {
  Mat m0(1, 1), m1(1, 1);
  m0 << a0;
  m1 << a1;
  return {m0, m1, h};
}

// Scalar channel tapping the current state: b = c0 = 1, c1 empty.
inline tdsr::PerturbationStructure scalar_ps() {
  return {Mat::Ones(1, 1), Mat::Zero(0, 1), Mat::Ones(1, 1)};
}

// Scalar channel tapping the delayed state: b = c1 = 1, c0 empty.
inline tdsr::PerturbationStructure scalar_ps_delayed() {
  return {Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Zero(0, 1)};
}

// Segment samples of a random polynomial of degree `deg` with decaying
// coefficients, one column per node.
inline Mat random_poly_segment(const tdsr::Discretization& disc, int n, int deg,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const int np = disc.order + 1;
  Mat coef(n, deg + 1);
  for (int k = 0; k <= deg; ++k)
    for (int i = 0; i < n; ++i) coef(i, k) = gauss(rng) / (1.0 + k * k);
  Mat phi(n, np);
  for (int j = 0; j < np; ++j) {
    const double s = 2.0 * disc.nodes(j) / disc.h + 1.0;  // [-h,0] -> [-1,1]
    Vec acc = Vec::Zero(n);
    double pw = 1.0;
    for (int k = 0; k <= deg; ++k, pw *= s) acc += pw * coef.col(k);
    phi.col(j) = acc;
  }
  return phi;
}

// Smooth random history for the integrator: a short trigonometric series,
// rescaled so sup_theta ||phi(theta)|| = radius.
inline std::function<Vec(double)> random_history(int n, double h, double radius,
                                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const int modes = 4;
  Mat ca(n, modes), cb(n, modes);
  for (int k = 0; k < modes; ++k)
    for (int i = 0; i < n; ++i) {
      ca(i, k) = gauss(rng) / (1 << k);
      cb(i, k) = gauss(rng) / (1 << k);
    }
  auto raw = [=](double th) {
    Vec v = Vec::Zero(n);
    for (int k = 0; k < modes; ++k) {
      const double w = 3.141592653589793 * k * th / h;
      v += ca.col(k) * std::cos(w) + cb.col(k) * std::sin(w);
    }
    return v;
  };
  double sup = 0.0;
  for (int j = 0; j <= 64; ++j) sup = std::max(sup, raw(-h + j * h / 64.0).norm());
  const double scale = sup > 0 ? radius / sup : 0.0;
  return [=](double th) -> Vec { return scale * raw(th); };
}

}  // namespace fx
