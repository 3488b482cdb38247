#include "tdsrobust/collocation.hpp"

#include <cmath>
#include <numbers>

namespace tdsr {

namespace {

constexpr double kPi = std::numbers::pi;

// Chebyshev differentiation matrix on x_j = cos(j pi / N), j = 0..N,
// with the negative-sum trick for the diagonal.
Mat cheb_diff(int n_order) {
  const int np = n_order + 1;
  Vec x(np), c(np);
  for (int j = 0; j < np; ++j) {
    x(j) = std::cos(kPi * j / n_order);
    c(j) = (j == 0 || j == n_order) ? 2.0 : 1.0;
    if (j % 2 == 1) c(j) = -c(j);
  }
  Mat d(np, np);
  for (int i = 0; i < np; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < np; ++j) {
      if (i == j) continue;
      d(i, j) = (c(i) / c(j)) / (x(i) - x(j));
      rowsum += d(i, j);
    }
    d(i, i) = -rowsum;
  }
  return d;
}

// Clenshaw-Curtis weights on [-1, 1] for the x_j above (exact for degree N).
Vec cc_weights(int n_order) {
  const int np = n_order + 1;
  Vec w = Vec::Zero(np);
  for (int j = 0; j < np; ++j) {
    double s = 1.0;
    for (int k = 1; k <= n_order / 2; ++k) {
      const double bk = (2 * k == n_order) ? 1.0 : 2.0;
      s -= bk * std::cos(2.0 * k * kPi * j / n_order) / (4.0 * k * k - 1.0);
    }
    w(j) = 2.0 * s / n_order;
    if (j == 0 || j == n_order) w(j) *= 0.5;
  }
  return w;
}

}  // namespace

Discretization make_discretization(int order, double h) {
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "discretization order must be >= 2");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "delay h must be > 0");
  Discretization d;
  d.order = order;
  d.h = h;
  const int np = order + 1;
  d.nodes.resize(np);
  for (int j = 0; j < np; ++j) {
    // map x in [-1,1] to theta in [-h,0]; theta_0 = 0, theta_N = -h exactly
    d.nodes(j) = 0.5 * h * (std::cos(kPi * j / order) - 1.0);
  }
  d.nodes(0) = 0.0;
  d.nodes(order) = -h;
  d.diff = cheb_diff(order) * (2.0 / h);
  d.quad_weights = cc_weights(order) * (0.5 * h);
  // Extrapolation of the interior-node interpolant to theta = 0; closed form
  // of the Lagrange basis values l_j(1) on the Chebyshev subgrid.
  d.edge_extrap.resize(order);
  for (int j = 1; j <= order; ++j) {
    const double dj = (j == order) ? 0.5 : 1.0;
    d.edge_extrap(j - 1) = -2.0 * ((j % 2 == 1) ? -1.0 : 1.0) * dj;
  }
  return d;
}

Mat discretize_generator(const TdsSystem& sys, const Discretization& disc) {
  if (!(std::abs(disc.h - sys.h) <= 1e-12 * sys.h))
    throw Error(ErrorCode::NodeMismatch, "discretization delay differs from system delay");
  const int n = sys.n();
  const int np = disc.order + 1;
  Mat a = Mat::Zero(n * np, n * np);
  for (int i = 1; i < np; ++i)
    for (int j = 0; j < np; ++j)
      a.block(i * n, j * n, n, n) = disc.diff(i, j) * Mat::Identity(n, n);
  a.block(0, 0, n, n) = sys.a0;
  a.block(0, n * (np - 1), n, n) += sys.a1;
  return a;
}

}  // namespace tdsr
