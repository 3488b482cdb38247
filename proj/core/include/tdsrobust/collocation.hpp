#pragma once

#include "tdsrobust/types.hpp"

namespace tdsr {

// Chebyshev collocation of the segment space on [-h, 0].
//
// nodes(0) = 0 and nodes(order) = -h; the 0-endpoint sample doubles as the
// finite-dimensional head of the product state space.  Integral terms over
// the segment use the Clenshaw-Curtis weights, whose interior entries are
// strictly positive for every order — kernel extraction divides by them.
struct Discretization {
  int order = 0;     // polynomial degree N; order+1 nodes
  double h = 0.0;
  Vec nodes;         // length N+1, descending from 0 to -h
  Mat diff;          // (N+1)x(N+1) differentiation matrix, d/d theta
  Vec quad_weights;  // Clenshaw-Curtis weights on all N+1 nodes; sums to h
  Vec edge_extrap;   // length N, value at theta=0 of the interpolant on nodes 1..N
};

Discretization make_discretization(int order, double h);

// Finite section of the shift generator with boundary condition
// phi'(0) = a0 phi(0) + a1 phi(-h): the differentiation matrix on every
// node row except row 0, which is replaced by the system coupling.
// Acts on stacked node values (phi(0), phi(theta_1), ..., phi(-h)).
Mat discretize_generator(const TdsSystem& sys, const Discretization& disc);

}  // namespace tdsr
