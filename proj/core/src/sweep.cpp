#include "tdsrobust/sweep.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <vector>

namespace tdsr {

double spectral_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

SweepConfig SweepConfig::defaults(const TdsSystem& sys) {
  SweepConfig cfg;
  cfg.omega_max =
      10.0 * (spectral_norm(sys.a0) + spectral_norm(sys.a1) + 1.0 + 2.0 * std::numbers::pi / sys.h);
  return cfg;
}

void SweepConfig::validate() const {
  if (!(omega_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega_max must be > 0");
  if (grid_points < 64) throw Error(ErrorCode::InvalidArgument, "grid_points must be >= 64");
  if (!(refine_tol > 0.0 && refine_tol <= 1e-2))
    throw Error(ErrorCode::InvalidArgument, "refine_tol must lie in (0, 1e-2]");
  if (max_refine_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_refine_iters must be >= 1");
}

namespace {

// Golden-section search for a maximum of f on [lo, hi].
SweepExtremum golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol, int max_iters) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iters && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return (f1 > f2) ? SweepExtremum{f1, x1} : SweepExtremum{f2, x2};
}

}  // namespace

SweepExtremum sweep_maximize(const std::function<double(double)>& f, const SweepConfig& cfg) {
  cfg.validate();
  const int n = cfg.grid_points;
  std::vector<double> omega(n), val(n);
  for (int i = 0; i < n; ++i) {
    omega[i] = cfg.omega_max * static_cast<double>(i) / (n - 1);
    val[i] = f(omega[i]);
  }
  SweepExtremum best{val[0], omega[0]};
  for (int i = 1; i < n; ++i)
    if (val[i] > best.value) best = {val[i], omega[i]};
  // refine around every local maximum (endpoints included via one-sided brackets)
  const double interval_tol = 1e-9;
  for (int i = 0; i < n; ++i) {
    const bool left_ok = (i == 0) || (val[i] >= val[i - 1]);
    const bool right_ok = (i == n - 1) || (val[i] >= val[i + 1]);
    if (!(left_ok && right_ok)) continue;
    const double lo = omega[std::max(0, i - 1)];
    const double hi = omega[std::min(n - 1, i + 1)];
    if (hi <= lo) continue;
    const SweepExtremum r = golden_max(f, lo, hi, interval_tol, cfg.max_refine_iters);
    if (r.value > best.value) best = r;
  }
  return best;
}

SweepExtremum sweep_minimize(const std::function<double(double)>& f, const SweepConfig& cfg) {
  SweepExtremum r = sweep_maximize([&f](double w) { return -f(w); }, cfg);
  return {-r.value, r.omega};
}

}  // namespace tdsr
