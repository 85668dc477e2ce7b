#include "hgff/partition.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "hgff/errors.hpp"

namespace hgff {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double log_2pi_over_beta(double beta) { return std::log(kTwoPi / beta); }

}  // namespace

double log_partition_spectral(const WalkWeights& ww, const MassSpec& ms) {
  const GraphSpec& g = ww.g;
  if (ms.m <= 0.0) {
    throw MasslessWithoutBoundary(
        "the full-graph partition function does not exist at zero mass");
  }
  Spectrum sp = eigenvalues(ww);
  double nv = std::exp(g.log_vertex_count);
  double acc = 0.0;
  for (int i = 1; i <= g.d; ++i) {
    // 1 + m^2 - lambda_i = log1p argument m^2 - lambda_i > -1
    acc += 0.5 * std::exp(sp.log_degeneracies[static_cast<std::size_t>(i)]) *
           std::log1p(ms.m * ms.m -
                      sp.lambdas[static_cast<std::size_t>(i)]);
  }
  return 0.5 * nv * log_2pi_over_beta(ms.beta) - std::log(ms.m) - acc;
}

double log_partition_dense_oracle(const WalkWeights& ww, const MassSpec& ms,
                                  const BoundarySpec& b) {
  if (!b.is_ball && ms.m <= 0.0) {
    throw MasslessWithoutBoundary(
        "I - P is singular; the Gaussian integral diverges");
  }
  Eigen::MatrixXd p = dense_transition(ww, b);
  const auto nn = p.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(nn, nn) - ms.alpha * p;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularSystem("I - alpha P is not positive definite");
  }
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < nn; ++i) {
    logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
  }
  return 0.5 * static_cast<double>(nn) *
             (log_2pi_over_beta(ms.beta) + std::log(ms.alpha)) -
         0.5 * logdet;
}

double log_partition_uniform_ball(const WalkWeights& ww, const MassSpec& ms,
                                  int r) {
  const GraphSpec& g = ww.g;
  if (ww.model != Model::Uniform) {
    throw DomainError("this closed form belongs to the uniform model");
  }
  if (r < 1 || r > g.d - 1) {
    throw DomainError("boundary radius must satisfy 1 <= r <= d-1");
  }
  double bfrac = 0.0;
  for (int i = r + 1; i <= g.d; ++i) {
    bfrac += std::exp(log_sphere_size(g.d, g.n, i) - g.log_vertex_count);
  }
  double kept = std::exp(g.log_vertex_count) * (1.0 - bfrac);
  return 0.5 * kept * (log_2pi_over_beta(ms.beta) + std::log(ms.alpha)) +
         0.5 * (std::log1p(ms.m * ms.m) - std::log(bfrac + ms.m * ms.m));
}

double internal_energy(const GraphSpec& g, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("beta must be finite and positive");
  }
  double nv = g.count_exact() ? static_cast<double>(g.vertex_count)
                              : std::exp(g.log_vertex_count);
  return nv / (2.0 * beta);
}

double log_mz_zero_mass_limit(const WalkWeights& ww, double beta) {
  const GraphSpec& g = ww.g;
  if (!(beta > 0.0)) {
    throw DomainError("beta must be positive");
  }
  Spectrum sp = eigenvalues(ww);
  double acc = 0.0;
  for (int i = 1; i <= g.d; ++i) {
    double lam = sp.lambdas[static_cast<std::size_t>(i)];
    if (lam >= 1.0 - 1e-12) {
      throw ReducibleChain("the zero-mass limit needs an irreducible walk");
    }
    acc += 0.5 * std::exp(sp.log_degeneracies[static_cast<std::size_t>(i)]) *
           std::log1p(-lam);
  }
  return 0.5 * std::exp(g.log_vertex_count) * log_2pi_over_beta(beta) - acc;
}

double free_energy_limit(Model model, int fixed_param, double m, double beta,
                         LimitDirection which, double gamma) {
  if (!(m > 0.0)) {
    throw DomainError("the free energy limit needs a positive mass");
  }
  if (!(beta > 0.0)) {
    throw DomainError("beta must be positive");
  }
  double lambda_limit = 0.0;
  switch (model) {
    case Model::Uniform:
    case Model::NearestNeighbour:
      lambda_limit = 0.0;
      break;
    case Model::Binomial:
      if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw DomainError("gamma must lie in (0,1)");
      }
      if (which == LimitDirection::NToInf) {
        if (fixed_param < 1) {
          throw DomainError("need the fixed dimension d >= 1");
        }
        lambda_limit = std::pow(1.0 - gamma, fixed_param);
      }
      break;
    case Model::Custom:
      throw DomainError("custom weights carry no constructive limit");
  }
  return (std::log1p(m * m - lambda_limit) - log_2pi_over_beta(beta)) /
         (2.0 * beta);
}

double char_table_det_modulus(int d, int n) {
  if (d < 1 || n < 2) {
    throw DomainError("need d >= 1 and n >= 2");
  }
  std::int64_t nv = 1;
  for (int k = 0; k < d; ++k) {
    nv *= n;
    if (nv > 16) {
      throw CapacityError("character table determinant is capped at 16 vertices");
    }
  }
  std::vector<std::vector<int>> dg(static_cast<std::size_t>(nv));
  for (std::int64_t x = 0; x < nv; ++x) {
    std::int64_t t = x;
    for (int k = 0; k < d; ++k) {
      dg[static_cast<std::size_t>(x)].push_back(static_cast<int>(t % n));
      t /= n;
    }
  }
  Eigen::MatrixXcd mat(nv, nv);
  for (std::int64_t x = 0; x < nv; ++x) {
    for (std::int64_t y = 0; y < nv; ++y) {
      int e = 0;
      for (int k = 0; k < d; ++k) {
        e = (e + dg[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)] *
                     dg[static_cast<std::size_t>(y)]
                       [static_cast<std::size_t>(k)]) %
            n;
      }
      mat(x, y) = std::polar(1.0, kTwoPi * static_cast<double>(e) /
                                      static_cast<double>(n));
    }
  }
  return std::abs(mat.determinant());
}

CharDetCheck char_table_det_check(const GraphSpec& g) {
  CharDetCheck out;
  out.modulus = char_table_det_modulus(g.d, g.n);
  double nv = static_cast<double>(g.vertex_count);
  out.expected = std::pow(nv, nv / 2.0);
  return out;
}

PartitionReport partition_report(const WalkWeights& ww, const MassSpec& ms,
                                 const BoundarySpec& b,
                                 PartitionMethod method) {
  PartitionReport rep;
  rep.params_walk = ww;
  rep.params_mass = ms;
  rep.params_boundary = b;
  if (method == PartitionMethod::Spectral) {
    if (b.is_ball) {
      throw DomainError(
          "the spectral partition form covers the empty boundary only");
    }
    rep.log_z = log_partition_spectral(ww, ms);
    rep.method = "spectral";
  } else {
    rep.log_z = log_partition_dense_oracle(ww, ms, b);
    rep.method = "dense";
  }
  rep.free_energy_per_site =
      -rep.log_z / (ms.beta * std::exp(ww.g.log_vertex_count));
  rep.internal_energy = internal_energy(ww.g, ms.beta);
  return rep;
}

}  // namespace hgff
