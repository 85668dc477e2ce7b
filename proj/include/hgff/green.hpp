#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "hgff/walk.hpp"

namespace hgff {

// Mass and temperature bundle. alpha = 1/(1+m^2) is the per-step survival
// probability of the killed walk; the field covariance is (alpha/beta) G.
struct MassSpec {
  double m = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
};

MassSpec mass_spec(double m, double beta);

enum class GreenMethod { Spectral, DenseInverse, MonteCarlo };

// Dense Green function (I - alpha P_hat)^{-1} over the retained vertices,
// in ascending rank order matching `vertices`.
struct GreenResult {
  Eigen::MatrixXd values;
  std::vector<Rank> vertices;
  GreenMethod method = GreenMethod::DenseInverse;
};

// G_{alpha,empty}(rho) = (1/n^d) sum_j K_j(rho) / (1 - alpha lambda_j).
// Massive only: at m = 0 the resolvent has a pole at j = 0.
double green_massive_radial(const WalkWeights& ww, const MassSpec& ms,
                            int rho);

// (alpha/beta) G through the cheapest valid route: the spectral radial sum
// when there is no boundary, the dense solve otherwise.
double covariance(const WalkWeights& ww, const MassSpec& ms, Rank x, Rank y,
                  const BoundarySpec& b);

// Direct SPD solve of (I - alpha P_hat) G = I. The anchor oracle for every
// other Green path.
GreenResult green_dense_oracle(const WalkWeights& ww, const MassSpec& ms,
                               const BoundarySpec& b);

// Killed-walk simulation: kill with probability 1-alpha before each move,
// absorb on the boundary, count visits to y. Returns (mean, standard error)
// over n_walks walks. Walks from origin to origin ride the lumped chain.
std::pair<double, double> green_mc_estimate(const WalkWeights& ww,
                                            const MassSpec& ms,
                                            const BoundarySpec& b, Rank x,
                                            Rank y, std::int64_t n_walks,
                                            std::uint64_t seed);

// Massless boundary case, origin entry: G_{1,partial_r}(0,0), through the
// lumped hitting-probability system. The uniform model takes an exact
// integer-ratio path, (1+|partial_r|)/|partial_r|.
double green_massless_origin(const WalkWeights& ww, int r);

// The hitting probabilities p_i = P_i(reach partial_r before returning to
// the origin class), i = 1..r, from the lumped linear system.
struct HitProbabilities {
  std::vector<double> p;  // index 0 holds p_1
  int r = 0;
};

HitProbabilities massless_hit_probabilities(const WalkWeights& ww, int r);

// The (origin,origin) entry of (I - alpha P_hat)^{-1} by direct linear
// solve. Below the dense cap this is a column of the dense factorization;
// above it, a matrix-free conjugate-gradient solve (nearest-neighbour
// walks) or the state-independent closed form (uniform walks).
double green_origin_solve(const WalkWeights& ww, const MassSpec& ms,
                          const BoundarySpec& b);

// beta Var(g_0) for the massless nearest-neighbour field with boundary
// partial_r: sum_{i=0}^r C(d-1,i)^{-1} (n-1)^{-i}.
double hit_prob_nn_series(const GraphSpec& g, int r);

// Limit coefficient of the nearest-neighbour covariance as n grows:
// C_{m,d}(rho) = d Beta(d(1+m^2)-rho, rho+1), via log-gamma.
double asym_coeff_nn(int d, double m, int rho);

// Limit coefficient of the binomial-model covariance as n grows:
// alpha sum_k {alpha(1-gamma)^{d-rho}}^k {1-(1-gamma)^k}^rho, summed until
// the geometric tail bound alpha^{k+1}/(1-alpha) drops below 1e-14.
double asym_coeff_binomial(int d, double m, double gamma, int rho);

// a_i(gamma) = (1-1/n)(1 - n gamma/(n-1))^i + 1/n: the per-coordinate
// factor whose d-th power drives the binomial model's finite-d covariance
// gap. The gap itself is sum_{i>=1} alpha^{i+1} a_i^d.
double binomial_gap_rate(const GraphSpec& g, double gamma);
double binomial_cov_gap(const GraphSpec& g, double m, double gamma);

struct MassToZeroRow {
  double m = 0.0;
  double scaled_cov = 0.0;  // m^2 n^d beta Cov(x,x'), -> 1 as m -> 0
  double corr = 0.0;        // Cov(x,x')/Var, -> 1 as m -> 0
};

// Requires an irreducible walk (second eigenvalue strictly below 1).
std::vector<MassToZeroRow> limit_diagnostic_m_to_zero(
    const WalkWeights& ww, double beta, Rank x, Rank y,
    const std::vector<double>& m_grid);

struct LargeDRow {
  int d = 0;
  double scaled_cov = 0.0;  // -> 1 as d grows
};

// Sharp large-d form of the nearest-neighbour covariance:
// beta Cov ((n-1)d)^rho (1+m^2)^{rho+1} / rho! -> 1. Only the
// nearest-neighbour model carries this normalization.
std::vector<LargeDRow> limit_diagnostic_large_d(Model model, int n, double m,
                                                int rho,
                                                const std::vector<int>& d_grid);

}  // namespace hgff
