#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hgff/green.hpp"
#include "hgff/walk.hpp"

namespace hgff {

// One exact draw of the free-boundary Gaussian field, synthesized in the
// character basis: independent Gaussian coefficients with amplitude
// 1/sqrt(beta n^d (1/alpha - lambda_{rho(y)})) on frequency y, folded into
// a real field by conjugate pairing of y and -y.
struct FieldSample {
  std::vector<double> values;  // xi_x by vertex rank
  WalkWeights params_walk;
  MassSpec params_mass;
  std::uint64_t seed = 0;
  double imag_residue = 0.0;  // max |Im| discarded by the pairing, <= 1e-12
};

FieldSample sample_field(const WalkWeights& ww, const MassSpec& ms,
                         std::uint64_t seed);

// Energy of a configuration, in the pairwise-difference form
//   H = (1/4) sum_{x,x'} J_{rho(x,x')} (xi_x - xi_x')^2 + (m^2/2) sum_x xi_x^2
// with couplings J_i = w_i / kappa_i. With a ball boundary the field must
// vanish on partial_r.
double hamiltonian(const WalkWeights& ww, const MassSpec& ms,
                   const FieldSample& field, const BoundarySpec& b);

// The same energy as the walk quadratic form
//   H = ((1+m^2)/2) sum_x xi_x^2 - (1/2) sum_{x,x'} (w_rho/kappa_rho) xi_x xi_x'
// with the x = x' term kept inside the double sum. Agrees with
// `hamiltonian` to rounding; kept separate so tests can pit the two
// expansions against each other.
double hamiltonian_quadratic(const WalkWeights& ww, const MassSpec& ms,
                             const FieldSample& field, const BoundarySpec& b);

struct PairStat {
  Rank a = 0;
  Rank b = 0;
  double mean_product = 0.0;
  double se = 0.0;
};

// Streaming moments over repeated field draws. All members are plain sums,
// so two disjoint accumulations merge exactly.
struct SampleStats {
  std::int64_t count = 0;
  std::vector<double> mean;  // per-vertex sample mean
  std::vector<PairStat> pairs;

  // spatial mean S = (1/n^d) sum_x xi_x, raw moment sums over samples
  double s_sum = 0.0;
  double s2_sum = 0.0;
  double s4_sum = 0.0;

  // energy h = beta H per sample
  double h_sum = 0.0;
  double h2_sum = 0.0;
};

// Draws n_samples fields with per-sample derived seeds (sample k is
// reproducible in isolation, so batches can run in any order) and
// accumulates the probe products, the spatial mean moments, and the
// energies. n_samples = 0 yields an empty stats object.
SampleStats accumulate_stats(const WalkWeights& ww, const MassSpec& ms,
                             std::int64_t n_samples, std::uint64_t seed,
                             const std::vector<std::pair<Rank, Rank>>& probes);

// Exact merge of two disjoint accumulations over the same probe list.
SampleStats merge_stats(const SampleStats& a, const SampleStats& b);

// Empirical variance of the spatial mean, and its standard error. The
// analytic value is 1/(n^d beta m^2): no spontaneous magnetisation.
double field_mean_variance(const SampleStats& stats);
double field_mean_variance_se(const SampleStats& stats);

// Mean and standard error of beta H over the accumulated samples; the
// equipartition value is n^d/2.
double energy_mean(const SampleStats& stats);
double energy_se(const SampleStats& stats);

}  // namespace hgff
