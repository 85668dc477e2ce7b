#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hgff/graph.hpp"

namespace hgff {

// Radial random walks on H(d,n): the next vertex is chosen at Hamming
// distance i from the current one with probability w_i, uniformly among the
// kappa_i candidates, so (P)_{x,x'} = w_{rho(x,x')} / kappa_{rho(x,x')}.
// The spin couplings of the matching quadratic Hamiltonian are
// J_i = w_i / kappa_i.

enum class Model { Uniform, NearestNeighbour, Binomial, Custom };

struct WalkWeights {
  GraphSpec g;
  std::vector<double> w;  // d+1 entries, nonnegative, summing to 1
  Model model = Model::Custom;
  double gamma = 0.0;  // Binomial jump intensity, meaningful for that model
};

// w_i = kappa_i / n^d: the state-independent walk that jumps to a uniformly
// random vertex (self-loops included).
WalkWeights weights_uniform(const GraphSpec& g);

// w_i = delta_{i,1}: the simple nearest-neighbour walk.
WalkWeights weights_nn(const GraphSpec& g);

// w_i = C(d,i) gamma^i (1-gamma)^{d-i}, 0 < gamma < 1. gamma = 1 - 1/n
// reproduces the uniform walk exactly.
WalkWeights weights_binomial(const GraphSpec& g, double gamma);

// User-supplied radial weights; entries must be nonnegative and sum to 1
// within 1e-9 (the copy is renormalized to machine precision).
WalkWeights weights_custom(const GraphSpec& g, const std::vector<double>& w);

struct Spectrum {
  std::vector<double> lambdas;  // lambda_0..lambda_d, lambda_0 = 1
  // kappa_i when representable in int64, else -1; logs always valid.
  std::vector<std::int64_t> degeneracies;
  std::vector<double> log_degeneracies;
};

// Eigenvalues lambda_i = sum_j (w_j/kappa_j) K_j(i) with multiplicity
// kappa_i. Closed forms are used for the three named models; Custom goes
// through the Krawtchouk sum.
Spectrum eigenvalues(const WalkWeights& ww);

// Krawtchouk-sum path regardless of model tag, for cross-checking the
// closed forms.
std::vector<double> eigenvalues_generic(const WalkWeights& ww);

// (P^t)_{x,x'} for rho(x,x') = j, from the spectral representation
// (1/n^d) sum_i lambda_i^t K_i(j). A matrix entry, not a class probability.
double step_distribution(const WalkWeights& ww, std::int64_t t, int j);

// Vertex cap for dense matrices; default 4096, overridable through the
// HGFF_CAP environment variable.
std::int64_t dense_cap();

// Retained vertices in ascending rank order: all of X when b is empty,
// else the ball {x : rho(origin,x) <= r}.
std::vector<Rank> retained_vertices(const GraphSpec& g, const BoundarySpec& b);

// Full transition matrix over X (b empty), or its restriction to rows and
// columns of Y_r. Symmetric; CapacityError when n^d exceeds dense_cap().
Eigen::MatrixXd dense_transition(const WalkWeights& ww, const BoundarySpec& b);

// Transition matrix of the walk watched only through its distance from the
// origin. Radial walks are lumpable: the row does not depend on which
// representative of the distance class is used.
struct LumpedChain {
  Eigen::MatrixXd tilde_p;  // (d+1) x (d+1)
  int r = 0;                // truncation radius carried by boundary solves, 0 if none
};

LumpedChain lumped_transition(const WalkWeights& ww);

// Row i of the lumped chain recomputed from an arbitrary representative
// vertex x with rho(origin,x) = i; test hook for the lumpability identity.
std::vector<double> lumped_row_from(const WalkWeights& ww, Rank x);

}  // namespace hgff
