#pragma once

#include <string>

#include "hgff/green.hpp"
#include "hgff/walk.hpp"

namespace hgff {

// Everything here lives in log space: the vertex count sits in the exponent
// of Z, so the linear-scale number overflows at desk scale already.

// log Z over the full graph, from the walk spectrum:
//   (n^d/2) log(2pi/beta) - log m - sum_{i>=1} (kappa_i/2) log(1+m^2-lambda_i)
// Massive only; the j = 0 mode is the isolated -log m term.
double log_partition_spectral(const WalkWeights& ww, const MassSpec& ms);

// log Z by direct Gaussian integration over the retained vertices:
//   (|Y|/2) log(2pi alpha/beta) - (1/2) log det(I - alpha P_hat),
// through an SPD factorization. The anchor oracle for the closed forms.
double log_partition_dense_oracle(const WalkWeights& ww, const MassSpec& ms,
                                  const BoundarySpec& b);

// Uniform-model ball closed form, valid for m >= 0:
//   (|Y|/2) log(2pi alpha/beta) + (1/2){log(1+m^2) - log(|partial_r|/n^d + m^2)}
// At m = 0 this is (|Y|/2) log(2pi/beta) + (1/2) log(n^d/|partial_r|).
double log_partition_uniform_ball(const WalkWeights& ww, const MassSpec& ms,
                                  int r);

// n^d/(2 beta): each Gaussian mode carries 1/(2 beta) regardless of the
// model, the mass, or the boundary radius.
double internal_energy(const GraphSpec& g, double beta);

// lim (log m + log Z) as m -> 0, for irreducible walks:
//   (n^d/2) log(2pi/beta) - sum_{i>=1} (kappa_i/2) log(1-lambda_i).
double log_mz_zero_mass_limit(const WalkWeights& ww, double beta);

enum class LimitDirection { DToInf, NToInf };

// Limit of the free energy per site, -log Z/(beta n^d):
//   (1/(2 beta)) (log(1+m^2-lambda_limit) - log(2pi/beta)).
// lambda_limit is 0 for the uniform and nearest-neighbour models in both
// directions and for the binomial model as d grows; the binomial model as
// n grows keeps lambda_limit = (1-gamma)^d with d = fixed_param. Custom
// weights carry no constructive limit.
double free_energy_limit(Model model, int fixed_param, double m, double beta,
                         LimitDirection which, double gamma = 0.5);

struct CharDetCheck {
  double modulus = 0.0;   // |det| of the n^d x n^d character table
  double expected = 0.0;  // (n^d)^{n^d/2}
};

// Numeric determinant of the character table [zeta^{x.y}]. Hard-capped at
// n^d <= 16; the point is the identity, not scale.
CharDetCheck char_table_det_check(const GraphSpec& g);

// Same check without a GraphSpec, so the d = 1 cyclic case is reachable.
double char_table_det_modulus(int d, int n);

struct PartitionReport {
  double log_z = 0.0;
  double free_energy_per_site = 0.0;  // -log Z/(beta n^d)
  double internal_energy = 0.0;
  std::string method;
  WalkWeights params_walk;
  MassSpec params_mass;
  BoundarySpec params_boundary;
};

enum class PartitionMethod { Spectral, Dense };

PartitionReport partition_report(const WalkWeights& ww, const MassSpec& ms,
                                 const BoundarySpec& b,
                                 PartitionMethod method);

}  // namespace hgff
