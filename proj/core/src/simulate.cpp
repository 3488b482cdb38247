#include "tdsrobust/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tdsr {

namespace {

void check_map_zero(const std::function<Vec(double, const Vec&)>& fn, int m, int p) {
  const Vec at_zero = fn(0.0, Vec::Zero(p));
  if (at_zero.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "nonlinearity output dimension != m");
  if (at_zero.norm() > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "nonlinearity must vanish at zeta = 0");
}

}  // namespace

Nonlinearity::Nonlinearity(Kind kind, std::function<Vec(double, const Vec&)> fn, int m, int p,
                           std::string descriptor)
    : kind_(kind), fn_(std::move(fn)), m_(m), p_(p), descriptor_(std::move(descriptor)) {
  if (m_ < 1 || p_ < 1) throw Error(ErrorCode::DimensionMismatch, "nonlinearity needs m, p >= 1");
  check_map_zero(fn_, m_, p_);
}

Nonlinearity Nonlinearity::linear_gain(Mat gain) {
  const int m = static_cast<int>(gain.rows());
  const int p = static_cast<int>(gain.cols());
  std::ostringstream os;
  os << "linear gain, " << m << " x " << p;
  return Nonlinearity(Kind::LinearGain,
                      [g = std::move(gain)](double, const Vec& zeta) -> Vec { return g * zeta; },
                      m, p, os.str());
}

Nonlinearity Nonlinearity::saturation(double slope, double limit, int m) {
  if (!(slope >= 0.0) || !(limit > 0.0))
    throw Error(ErrorCode::InvalidArgument, "saturation needs slope >= 0, limit > 0");
  std::ostringstream os;
  os << "saturation, slope " << slope << ", limit " << limit;
  return Nonlinearity(
      Kind::Saturation,
      [slope, limit](double, const Vec& zeta) -> Vec {
        return slope * zeta.cwiseMax(-limit).cwiseMin(limit);
      },
      m, m, os.str());
}

Nonlinearity Nonlinearity::cubic_diagonal(Vec signs) {
  const int m = static_cast<int>(signs.size());
  return Nonlinearity(
      Kind::CubicDiagonal,
      [s = std::move(signs)](double, const Vec& zeta) -> Vec {
        return s.array() * zeta.array().cube();
      },
      m, m, "componentwise signed cube");
}

Nonlinearity Nonlinearity::time_varying_gain(std::function<Mat(double)> gain_of_t, int m, int p,
                                             std::string descriptor) {
  return Nonlinearity(
      Kind::TimeVaryingGain,
      [g = std::move(gain_of_t)](double t, const Vec& zeta) -> Vec { return g(t) * zeta; }, m, p,
      std::move(descriptor));
}

Nonlinearity Nonlinearity::custom(std::function<Vec(double, const Vec&)> fn, int m, int p,
                                  std::string descriptor) {
  return Nonlinearity(Kind::Custom, std::move(fn), m, p, std::move(descriptor));
}

Vec Trajectory::eval(double t) const {
  if (t <= 0.0) return phi0(t);
  if (steps.empty()) return phi0(0.0);
  const double end = covered_end();
  if (t >= end) t = end;
  // fixed step: direct index, then clamp against the truncated tail
  std::size_t k = static_cast<std::size_t>(t / step);
  if (k >= steps.size()) k = steps.size() - 1;
  while (k > 0 && t < steps[k].t0) --k;
  while (k + 1 < steps.size() && t > steps[k].t0 + steps[k].dt) ++k;
  const StepRecord& r = steps[k];
  const double s = std::clamp((t - r.t0) / r.dt, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * r.x0 + (h10 * r.dt) * r.f0 + h01 * r.x1 + (h11 * r.dt) * r.f1;
}

Trajectory integrate(const TdsSystem& sys, const PerturbationStructure& ps, const Nonlinearity& nl,
                     std::function<Vec(double)> phi0, double step, double t_end) {
  if (ps.n() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "structure/system dimension");
  if (nl.m() != ps.m() || nl.p() != ps.p())
    throw Error(ErrorCode::DimensionMismatch, "nonlinearity dimensions must match the structure");
  if (!(step > 0.0) || step > sys.h / 4.0)
    throw Error(ErrorCode::InvalidArgument, "need 0 < step <= h/4");
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be > 0");

  Trajectory traj;
  traj.step = step;
  traj.t_end = t_end;
  traj.n = sys.n();
  traj.phi0 = std::move(phi0);

  auto rhs = [&](double t, const Vec& x) -> Vec {
    const Vec xh = traj.eval(t - sys.h);
    Vec zeta(ps.p());
    zeta.head(ps.p1()) = ps.c1 * xh;
    zeta.tail(ps.p0()) = ps.c0 * x;
    return sys.a0 * x + sys.a1 * xh - ps.b * nl(t, zeta);
  };

  const auto total = static_cast<std::size_t>(std::ceil(t_end / step - 1e-12));
  traj.steps.reserve(total);
  Vec x = traj.phi0(0.0);
  Vec f_left = rhs(0.0, x);
  double t = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    const double dt = std::min(step, t_end - t);
    const Vec k1 = f_left;
    const Vec k2 = rhs(t + 0.5 * dt, x + (0.5 * dt) * k1);
    const Vec k3 = rhs(t + 0.5 * dt, x + (0.5 * dt) * k2);
    const Vec k4 = rhs(t + dt, x + dt * k3);
    const Vec x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    StepRecord rec;
    rec.t0 = t;
    rec.dt = dt;
    rec.x0 = x;
    rec.f0 = k1;
    rec.x1 = x_next;
    // provisional endpoint slope so eval() inside rhs() below sees this step
    rec.f1 = k4;
    traj.steps.push_back(rec);
    const Vec f_right = rhs(t + dt, x_next);
    traj.steps.back().f1 = f_right;

    x = x_next;
    f_left = f_right;
    t += dt;
    if (x.norm() > 1e12) {
      traj.blew_up = true;
      traj.t_blowup = t;
      break;
    }
  }
  return traj;
}

Mat segment_samples(const LkFunctional& lk, const Trajectory& traj, double t) {
  const int np = lk.disc.order + 1;
  Mat phi(traj.n, np);
  for (int j = 0; j < np; ++j) phi.col(j) = traj.eval(t + lk.disc.nodes(j));
  return phi;
}

std::vector<std::pair<double, double>> functional_along(const LkFunctional& lk,
                                                        const Trajectory& traj,
                                                        const std::vector<double>& times) {
  std::vector<std::pair<double, double>> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0.0 || t > traj.covered_end() + 1e-9 * (1.0 + std::abs(t)))
      throw Error(ErrorCode::InvalidArgument, "sample time outside the trajectory");
    out.emplace_back(t, evaluate_V(lk, segment_samples(lk, traj, t)));
  }
  return out;
}

double perturbation_derivative_check(const LkFunctional& lk, const TdsSystem& sys,
                                     const PerturbationStructure& ps, const Nonlinearity& nl,
                                     const Trajectory& traj, const std::vector<double>& times) {
  const double delta = traj.step;
  double worst = 0.0;
  for (double t : times) {
    if (t - delta - sys.h < -sys.h || t + delta > traj.covered_end()) continue;
    auto v_at = [&](double tt) { return evaluate_V(lk, segment_samples(lk, traj, tt)); };
    const double d1 = (v_at(t + delta) - v_at(t - delta)) / (2.0 * delta);
    const double d2 = (v_at(t + 0.5 * delta) - v_at(t - 0.5 * delta)) / delta;
    const double fd = (4.0 * d2 - d1) / 3.0;

    const Mat phi = segment_samples(lk, traj, t);
    const Vec zeta = ps.output(phi.col(lk.disc.order), phi.col(0));
    const Vec g = -ps.b * nl(t, zeta);
    const double flow = derivative_along(lk, sys, phi);
    const double theory = flow + 2.0 * evaluate_v(lk, phi).dot(g);
    const double mismatch = std::abs(fd - theory) / (1.0 + std::abs(theory));
    worst = std::max(worst, mismatch);
  }
  return worst;
}

SectorMembership sector_membership(const Nonlinearity& nl, const PerturbationStructure& ps,
                                   const SectorRestriction& sec, int samples, double radius,
                                   std::uint64_t seed, double offset_k3) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be > 0");
  if (nl.p() != sec.p() || nl.m() != sec.m())
    throw Error(ErrorCode::DimensionMismatch, "nonlinearity/sector dimensions");
  if (ps.p() != sec.p() || ps.m() != sec.m())
    throw Error(ErrorCode::DimensionMismatch, "structure/sector dimensions");
  const int p = sec.p();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SectorMembership result;
  result.worst_zeta = Vec::Zero(p);
  int inside = 0;
  bool first = true;
  for (int i = 0; i < samples; ++i) {
    Vec zeta(p);
    for (int k = 0; k < p; ++k) zeta(k) = gauss(rng);
    const double norm = zeta.norm();
    if (norm > 0.0) zeta *= radius * std::pow(unif(rng), 1.0 / p) / norm;
    const Vec a = nl(0.0, zeta);
    const double w = sec.evaluate(zeta, a) - offset_k3 * zeta.squaredNorm();
    if (w >= -1e-12 * (1.0 + zeta.squaredNorm())) ++inside;
    if (first || w < result.worst_margin) {
      result.worst_margin = w;
      result.worst_zeta = zeta;
      first = false;
    }
  }
  result.fraction_inside = static_cast<double>(inside) / samples;
  return result;
}

}  // namespace tdsr
