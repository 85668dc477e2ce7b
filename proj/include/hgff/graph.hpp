#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hgff/errors.hpp"

namespace hgff {

// The Hamming graph H(d,n): vertex set {0,...,n-1}^d, d,n >= 2, with the
// Hamming metric rho(x,y) = #{k : x_k != y_k}. Vertices are identified with
// integer ranks in [0, n^d) through the base-n expansion, least significant
// digit first, so rank = sum_k digits[k] * n^k.
struct GraphSpec {
  int d = 0;
  int n = 0;
  // n^d when it fits in a signed 64-bit integer, otherwise -1. Formula-level
  // consumers that work at any scale should use log_vertex_count.
  std::int64_t vertex_count = 0;
  double log_vertex_count = 0.0;  // d * log(n)

  bool count_exact() const { return vertex_count > 0; }
};

using Rank = std::int64_t;

GraphSpec make_graph(int d, int n);

std::vector<int> rank_digits(const GraphSpec& g, Rank x);
Rank digits_rank(const GraphSpec& g, const std::vector<int>& digits);

int hamming_distance(const GraphSpec& g, Rank x, Rank y);

// Distance from the all-zeros vertex; the weight of the base-n expansion.
int distance_from_origin(const GraphSpec& g, Rank x);

// kappa_i = C(d,i)(n-1)^i, the number of vertices at distance i from any
// fixed vertex. Exact integer; CapacityError once the value leaves int64.
std::int64_t sphere_size(const GraphSpec& g, int i);

// log kappa_i via lgamma; valid far beyond the exact-integer range.
double log_sphere_size(int d, int n, int i);

// Boundary specification: either no boundary, or the complement of the
// radius-r ball around the origin, partial_r = {x : r+1 <= rho(x) <= d}
// with 1 <= r <= d-1. Y_r denotes the retained set {x : rho(x) <= r}.
struct BoundarySpec {
  bool is_ball = false;
  int r = 0;
};

BoundarySpec boundary_none();
BoundarySpec boundary_ball(const GraphSpec& g, int r);

// |partial_r| = sum_{i=r+1}^d kappa_i.
std::int64_t boundary_size(const GraphSpec& g, int r);

// |Y| = n^d minus the boundary size (n^d when no boundary).
std::int64_t retained_count(const GraphSpec& g, const BoundarySpec& b);

// zeta^{x.y} with zeta = exp(2 pi i / n). The dot product is reduced mod n
// in integer arithmetic before any trigonometry, so the phase cannot drift
// for large ranks. Quarter-turn phases are returned exactly.
std::complex<double> character_phase(const GraphSpec& g, Rank x, Rank y);

// Every vertex at Hamming distance i from center, in ascending rank order.
// The walk over coordinate subsets is independent of the closed form for
// kappa_i, which makes the result usable as an enumeration oracle.
std::vector<Rank> enumerate_sphere(const GraphSpec& g, Rank center, int i);

}  // namespace hgff
