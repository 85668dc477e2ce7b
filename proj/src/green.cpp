#include "hgff/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "hgff/errors.hpp"
#include "hgff/krawtchouk.hpp"
#include "hgff/rng.hpp"

namespace hgff {

namespace {

std::size_t index_of(const std::vector<Rank>& ranks, Rank x) {
  auto it = std::lower_bound(ranks.begin(), ranks.end(), x);
  if (it == ranks.end() || *it != x) {
    throw DomainError("vertex lies outside the retained set");
  }
  return static_cast<std::size_t>(it - ranks.begin());
}

void check_vertex(const GraphSpec& g, Rank x) {
  if (x < 0 || (g.count_exact() && x >= g.vertex_count)) {
    throw DomainError("vertex rank out of range");
  }
}

// Fraction of vertices on spheres r+1..d, safe for graphs past the exact
// integer range.
double boundary_fraction(const GraphSpec& g, int r) {
  double f = 0.0;
  for (int i = r + 1; i <= g.d; ++i) {
    f += std::exp(log_sphere_size(g.d, g.n, i) - g.log_vertex_count);
  }
  return f;
}

}  // namespace

MassSpec mass_spec(double m, double beta) {
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw DomainError("mass must be finite and nonnegative");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("beta must be finite and positive");
  }
  MassSpec ms;
  ms.m = m;
  ms.beta = beta;
  ms.alpha = 1.0 / (1.0 + m * m);
  return ms;
}

double green_massive_radial(const WalkWeights& ww, const MassSpec& ms,
                            int rho) {
  const GraphSpec& g = ww.g;
  if (rho < 0 || rho > g.d) {
    throw DomainError("distance out of range");
  }
  if (ms.m <= 0.0) {
    throw MasslessWithoutBoundary(
        "the resolvent has a pole at mass zero; add a boundary");
  }
  Spectrum sp = eigenvalues(ww);
  long double acc = 0.0L;
  for (int j = 0; j <= g.d; ++j) {
    auto [sgn, lk] = kraw_signlog(g, j, rho);
    if (sgn == 0) continue;
    double denom = 1.0 - ms.alpha * sp.lambdas[j];
    acc += static_cast<long double>(sgn) *
           std::exp(lk - g.log_vertex_count) / denom;
  }
  return static_cast<double>(acc);
}

GreenResult green_dense_oracle(const WalkWeights& ww, const MassSpec& ms,
                               const BoundarySpec& b) {
  if (!b.is_ball && ms.m <= 0.0) {
    throw MasslessWithoutBoundary(
        "dense solve of I - P is singular without a boundary");
  }
  Eigen::MatrixXd p = dense_transition(ww, b);
  const auto nn = p.rows();
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(nn, nn) - ms.alpha * p;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularSystem("I - alpha P is not positive definite");
  }
  GreenResult res;
  res.values = llt.solve(Eigen::MatrixXd::Identity(nn, nn));
  res.vertices = retained_vertices(ww.g, b);
  res.method = GreenMethod::DenseInverse;
  return res;
}

double covariance(const WalkWeights& ww, const MassSpec& ms, Rank x, Rank y,
                  const BoundarySpec& b) {
  const GraphSpec& g = ww.g;
  check_vertex(g, x);
  check_vertex(g, y);
  if (!b.is_ball) {
    double gr = green_massive_radial(ww, ms, hamming_distance(g, x, y));
    return ms.alpha / ms.beta * gr;
  }
  if (distance_from_origin(g, x) > b.r || distance_from_origin(g, y) > b.r) {
    throw DomainError("covariance is defined on retained vertices only");
  }
  GreenResult res = green_dense_oracle(ww, ms, b);
  std::size_t i = index_of(res.vertices, x);
  std::size_t j = index_of(res.vertices, y);
  return ms.alpha / ms.beta * res.values(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(j));
}

namespace {

// One killed walk on the full vertex set, counting visits to `target`.
// Digit-level state, so no vertex enumeration is needed.
std::int64_t run_full_walk(const WalkWeights& ww, const MassSpec& ms,
                           const BoundarySpec& b,
                           const std::vector<int>& start,
                           const std::vector<int>& target, Rng& rng) {
  const GraphSpec& g = ww.g;
  const int d = g.d;
  const int n = g.n;
  std::vector<int> digits = start;
  int dist0 = 0;
  int match = 0;
  for (int k = 0; k < d; ++k) {
    if (digits[k] != 0) ++dist0;
    if (digits[k] == target[k]) ++match;
  }
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::int64_t visits = 0;
  for (;;) {
    if (match == d) ++visits;
    if (ms.alpha < 1.0 && rng.next_double() >= ms.alpha) break;
    // sphere index of the jump
    double u = rng.next_double();
    int jump = d;
    double cum = 0.0;
    for (int i = 0; i <= d; ++i) {
      cum += ww.w[static_cast<std::size_t>(i)];
      if (u < cum) {
        jump = i;
        break;
      }
    }
    for (int t = 0; t < jump; ++t) {
      std::uint64_t pick =
          static_cast<std::uint64_t>(t) +
          rng.next_below(static_cast<std::uint64_t>(d - t));
      std::swap(idx[static_cast<std::size_t>(t)],
                idx[static_cast<std::size_t>(pick)]);
      int k = idx[static_cast<std::size_t>(t)];
      int old = digits[static_cast<std::size_t>(k)];
      int off = 1 + static_cast<int>(
                        rng.next_below(static_cast<std::uint64_t>(n - 1)));
      int neu = (old + off) % n;
      digits[static_cast<std::size_t>(k)] = neu;
      dist0 += (neu != 0 ? 1 : 0) - (old != 0 ? 1 : 0);
      match += (neu == target[static_cast<std::size_t>(k)] ? 1 : 0) -
               (old == target[static_cast<std::size_t>(k)] ? 1 : 0);
    }
    if (b.is_ball && dist0 > b.r) break;
  }
  return visits;
}

// Origin-to-origin walks only need the distance process.
std::int64_t run_lumped_walk(const std::vector<std::vector<double>>& cum,
                             const MassSpec& ms, const BoundarySpec& b,
                             Rng& rng) {
  int cls = 0;
  std::int64_t visits = 0;
  const int top = static_cast<int>(cum.size()) - 1;
  for (;;) {
    if (cls == 0) ++visits;
    if (ms.alpha < 1.0 && rng.next_double() >= ms.alpha) break;
    double u = rng.next_double();
    const auto& row = cum[static_cast<std::size_t>(cls)];
    int nxt = top;
    for (int j = 0; j <= top; ++j) {
      if (u < row[static_cast<std::size_t>(j)]) {
        nxt = j;
        break;
      }
    }
    cls = nxt;
    if (b.is_ball && cls > b.r) break;
  }
  return visits;
}

}  // namespace

std::pair<double, double> green_mc_estimate(const WalkWeights& ww,
                                            const MassSpec& ms,
                                            const BoundarySpec& b, Rank x,
                                            Rank y, std::int64_t n_walks,
                                            std::uint64_t seed) {
  const GraphSpec& g = ww.g;
  if (n_walks < 2) {
    throw DomainError("need at least two walks for a standard error");
  }
  check_vertex(g, x);
  check_vertex(g, y);
  if (!b.is_ball && ms.m <= 0.0) {
    throw MasslessWithoutBoundary(
        "killed-walk estimate needs a mass or a boundary");
  }
  if (b.is_ball && (distance_from_origin(g, x) > b.r ||
                    distance_from_origin(g, y) > b.r)) {
    throw DomainError("walk endpoints must lie in the retained set");
  }

  // Class walks lump the d(n-1)-fold neighbour choice away, which cuts both
  // the step cost and the RNG draw count.
  bool lumped = (x == 0 && y == 0);
  std::vector<std::vector<double>> cum;
  if (lumped) {
    try {
      LumpedChain lc = lumped_transition(ww);
      cum.resize(static_cast<std::size_t>(g.d) + 1);
      for (int i = 0; i <= g.d; ++i) {
        double c = 0.0;
        for (int j = 0; j <= g.d; ++j) {
          c += lc.tilde_p(i, j);
          cum[static_cast<std::size_t>(i)].push_back(c);
        }
      }
    } catch (const CapacityError&) {
      lumped = false;
    }
  }

  std::vector<int> xd, yd;
  if (!lumped) {
    xd = rank_digits(g, x);
    yd = rank_digits(g, y);
  }

  Rng rng = Rng::split(seed, 0x6d63);  // dedicated stream for the MC path
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::int64_t k = 0; k < n_walks; ++k) {
    double v = lumped
                   ? static_cast<double>(run_lumped_walk(cum, ms, b, rng))
                   : static_cast<double>(
                         run_full_walk(ww, ms, b, xd, yd, rng));
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / static_cast<double>(n_walks);
  double var = (sumsq - static_cast<double>(n_walks) * mean * mean) /
               static_cast<double>(n_walks - 1);
  if (var < 0.0) var = 0.0;
  double se = std::sqrt(var / static_cast<double>(n_walks));
  return {mean, se};
}

HitProbabilities massless_hit_probabilities(const WalkWeights& ww, int r) {
  const GraphSpec& g = ww.g;
  if (r < 1 || r > g.d - 1) {
    throw DomainError("boundary radius must satisfy 1 <= r <= d-1");
  }
  LumpedChain lc = lumped_transition(ww);
  Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(r, r);
  Eigen::VectorXd rhs(r);
  for (int i = 1; i <= r; ++i) {
    for (int j = 1; j <= r; ++j) {
      mat(i - 1, j - 1) -= lc.tilde_p(i, j);
    }
    double out = 0.0;
    for (int j = r + 1; j <= g.d; ++j) out += lc.tilde_p(i, j);
    rhs(i - 1) = out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
  if (!lu.isInvertible()) {
    throw SingularSystem("lumped hitting system is singular");
  }
  Eigen::VectorXd p = lu.solve(rhs);
  HitProbabilities hp;
  hp.r = r;
  hp.p.assign(p.data(), p.data() + r);
  return hp;
}

double green_massless_origin(const WalkWeights& ww, int r) {
  const GraphSpec& g = ww.g;
  if (r < 1 || r > g.d - 1) {
    throw DomainError("boundary radius must satisfy 1 <= r <= d-1");
  }
  if (ww.model == Model::Uniform) {
    // escape probability B/(1+B) with B = |partial_r|
    if (g.count_exact()) {
      double bsz = static_cast<double>(boundary_size(g, r));
      return (1.0 + bsz) / bsz;
    }
    return 1.0 + 1.0 / (boundary_fraction(g, r) *
                        std::exp(g.log_vertex_count));
  }
  HitProbabilities hp = massless_hit_probabilities(ww, r);
  double escape = 0.0;
  for (int i = 1; i <= r; ++i) {
    escape += ww.w[static_cast<std::size_t>(i)] *
              hp.p[static_cast<std::size_t>(i - 1)];
  }
  for (int i = r + 1; i <= g.d; ++i) {
    escape += ww.w[static_cast<std::size_t>(i)];
  }
  if (!(escape > 0.0)) {
    throw ReducibleChain("walk never reaches the boundary");
  }
  return 1.0 / escape;
}

namespace {

// Matrix-free conjugate gradient for (I - alpha P) u = e_origin on the
// retained set of a nearest-neighbour walk. The Krylov space generated
// from a radial vector stays radial, so convergence takes at most d+1
// steps up to rounding.
double nn_origin_cg(const WalkWeights& ww, const MassSpec& ms,
                    const BoundarySpec& b) {
  const GraphSpec& g = ww.g;
  std::vector<Rank> ranks = retained_vertices(g, b);
  const std::size_t nn = ranks.size();
  std::vector<std::int64_t> pw(static_cast<std::size_t>(g.d));
  std::int64_t p = 1;
  for (int k = 0; k < g.d; ++k) {
    pw[static_cast<std::size_t>(k)] = p;
    p *= g.n;
  }
  const double scale =
      ms.alpha / (static_cast<double>(g.d) * static_cast<double>(g.n - 1));
  auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    for (std::size_t i = 0; i < nn; ++i) {
      Rank xr = ranks[i];
      std::vector<int> dg = rank_digits(g, xr);
      double acc = 0.0;
      for (int k = 0; k < g.d; ++k) {
        int a = dg[static_cast<std::size_t>(k)];
        for (int off = 1; off < g.n; ++off) {
          int neu = (a + off) % g.n;
          Rank yr = xr + static_cast<Rank>(neu - a) *
                             pw[static_cast<std::size_t>(k)];
          auto it = std::lower_bound(ranks.begin(), ranks.end(), yr);
          if (it != ranks.end() && *it == yr) {
            acc += u[static_cast<std::size_t>(it - ranks.begin())];
          }
        }
      }
      out[i] = u[i] - scale * acc;
    }
  };
  std::vector<double> u(nn, 0.0), rvec(nn, 0.0), dir(nn, 0.0), tmp(nn, 0.0);
  rvec[0] = 1.0;  // origin is rank 0, first in ascending order
  dir = rvec;
  double rs = 1.0;
  const double tol2 = 1e-26;
  const int maxit = 10 * (g.d + 2) + 100;
  for (int it = 0; it < maxit && rs > tol2; ++it) {
    apply(dir, tmp);
    double dad = 0.0;
    for (std::size_t i = 0; i < nn; ++i) dad += dir[i] * tmp[i];
    if (!(dad > 0.0)) {
      throw SingularSystem("conjugate gradient lost positive definiteness");
    }
    double step = rs / dad;
    double rs2 = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
      u[i] += step * dir[i];
      rvec[i] -= step * tmp[i];
      rs2 += rvec[i] * rvec[i];
    }
    for (std::size_t i = 0; i < nn; ++i) {
      dir[i] = rvec[i] + (rs2 / rs) * dir[i];
    }
    rs = rs2;
  }
  if (rs > tol2) {
    throw SingularSystem("conjugate gradient did not converge");
  }
  return u[0];
}

}  // namespace

double green_origin_solve(const WalkWeights& ww, const MassSpec& ms,
                          const BoundarySpec& b) {
  const GraphSpec& g = ww.g;
  if (!b.is_ball) {
    // spectral radial sum covers every model at any size
    return green_massive_radial(ww, ms, 0);
  }
  std::int64_t kept = retained_count(g, b);
  if (kept >= 0 && kept <= dense_cap()) {
    GreenResult res = green_dense_oracle(ww, ms, b);
    return res.values(0, 0);
  }
  if (ww.model == Model::Uniform) {
    double bf = boundary_fraction(g, b.r);
    return 1.0 + std::exp(-g.log_vertex_count) /
                     (1.0 / ms.alpha - 1.0 + bf);
  }
  if (ww.model == Model::NearestNeighbour) {
    if (!g.count_exact() ||
        g.vertex_count > (std::int64_t{1} << 22)) {
      throw CapacityError("retained set too large to index");
    }
    return nn_origin_cg(ww, ms, b);
  }
  throw CapacityError(
      "ball solve past the dense cap needs the uniform or "
      "nearest-neighbour model");
}

double hit_prob_nn_series(const GraphSpec& g, int r) {
  if (r < 1 || r > g.d - 1) {
    throw DomainError("boundary radius must satisfy 1 <= r <= d-1");
  }
  double acc = 0.0;
  for (int i = 0; i <= r; ++i) {
    double lb = std::lgamma(static_cast<double>(g.d)) -
                std::lgamma(static_cast<double>(i) + 1.0) -
                std::lgamma(static_cast<double>(g.d - i));
    acc += std::exp(-lb - static_cast<double>(i) *
                              std::log(static_cast<double>(g.n - 1)));
  }
  return acc;
}

double asym_coeff_nn(int d, double m, int rho) {
  if (d < 2 || rho < 0 || rho > d) {
    throw DomainError("need d >= 2 and 0 <= rho <= d");
  }
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw DomainError("mass must be finite and nonnegative");
  }
  double a = static_cast<double>(d) * (1.0 + m * m) -
             static_cast<double>(rho);
  if (!(a > 0.0)) {
    throw DomainError("beta-function argument must be positive");
  }
  double lb = std::lgamma(a) + std::lgamma(static_cast<double>(rho) + 1.0) -
              std::lgamma(a + static_cast<double>(rho) + 1.0);
  return static_cast<double>(d) * std::exp(lb);
}

double asym_coeff_binomial(int d, double m, double gamma, int rho) {
  if (d < 2 || rho < 0 || rho > d) {
    throw DomainError("need d >= 2 and 0 <= rho <= d");
  }
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw DomainError("binomial limit coefficient needs a positive mass");
  }
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw DomainError("gamma must lie in (0,1)");
  }
  double alpha = 1.0 / (1.0 + m * m);
  double q = 1.0 - gamma;
  double acc = 0.0;
  double apow = alpha;  // alpha^{k+1}
  for (int k = 0;; ++k) {
    double qk = std::pow(q, k);
    acc += apow * std::pow(q, static_cast<double>(k) * (d - rho)) *
           std::pow(1.0 - qk, rho);
    apow *= alpha;
    if (apow / (1.0 - alpha) < 1e-14) break;
  }
  return acc;
}

double binomial_gap_rate(const GraphSpec& g, double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw DomainError("gamma must lie in (0,1)");
  }
  double c = 1.0 - static_cast<double>(g.n) * gamma /
                       static_cast<double>(g.n - 1);
  double inv_n = 1.0 / static_cast<double>(g.n);
  double best = inv_n;  // i -> infinity limit of a_i
  double ci = 1.0;
  for (int i = 1; i <= 64; ++i) {
    ci *= c;
    best = std::max(best, std::abs((1.0 - inv_n) * ci + inv_n));
  }
  return best;
}

double binomial_cov_gap(const GraphSpec& g, double m, double gamma) {
  if (!(m > 0.0)) {
    throw DomainError("covariance gap needs a positive mass");
  }
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw DomainError("gamma must lie in (0,1)");
  }
  double alpha = 1.0 / (1.0 + m * m);
  double c = 1.0 - static_cast<double>(g.n) * gamma /
                       static_cast<double>(g.n - 1);
  double inv_n = 1.0 / static_cast<double>(g.n);
  double acc = 0.0;
  double apow = alpha * alpha;  // alpha^{k+1} from k = 1
  double ck = 1.0;
  for (int k = 1;; ++k) {
    ck *= c;
    double ak = (1.0 - inv_n) * ck + inv_n;
    acc += apow * std::pow(ak, g.d);
    apow *= alpha;
    if (apow / (1.0 - alpha) < 1e-18) break;
  }
  return acc;
}

std::vector<MassToZeroRow> limit_diagnostic_m_to_zero(
    const WalkWeights& ww, double beta, Rank x, Rank y,
    const std::vector<double>& m_grid) {
  const GraphSpec& g = ww.g;
  Spectrum sp = eigenvalues(ww);
  double second = -1.0;
  for (int j = 1; j <= g.d; ++j) {
    second = std::max(second, sp.lambdas[static_cast<std::size_t>(j)]);
  }
  if (second >= 1.0 - 1e-12) {
    throw ReducibleChain(
        "the zero-mass limit needs an irreducible walk");
  }
  std::vector<MassToZeroRow> rows;
  rows.reserve(m_grid.size());
  for (double m : m_grid) {
    MassSpec ms = mass_spec(m, beta);
    if (!(m > 0.0)) {
      throw DomainError("the mass grid must stay strictly positive");
    }
    double cxy = covariance(ww, ms, x, y, boundary_none());
    double cxx = covariance(ww, ms, x, x, boundary_none());
    MassToZeroRow row;
    row.m = m;
    row.scaled_cov =
        m * m * beta * cxy * std::exp(g.log_vertex_count);
    row.corr = cxy / cxx;
    rows.push_back(row);
  }
  return rows;
}

std::vector<LargeDRow> limit_diagnostic_large_d(Model model, int n, double m,
                                                int rho,
                                                const std::vector<int>& d_grid) {
  if (model != Model::NearestNeighbour) {
    throw DomainError(
        "the sharp large-d normalization is a nearest-neighbour law");
  }
  if (!(m > 0.0)) {
    throw DomainError("the large-d diagnostic needs a positive mass");
  }
  std::vector<LargeDRow> rows;
  rows.reserve(d_grid.size());
  for (int d : d_grid) {
    if (rho < 0 || rho > d) {
      throw DomainError("need 0 <= rho <= d at every grid point");
    }
    GraphSpec g = make_graph(d, n);
    WalkWeights ww = weights_nn(g);
    MassSpec ms = mass_spec(m, 1.0);
    double ag = ms.alpha * green_massive_radial(ww, ms, rho);
    double lognorm =
        static_cast<double>(rho) *
            std::log(static_cast<double>(n - 1) * static_cast<double>(d)) +
        static_cast<double>(rho + 1) * std::log1p(m * m) -
        std::lgamma(static_cast<double>(rho) + 1.0);
    LargeDRow row;
    row.d = d;
    row.scaled_cov = ag * std::exp(lognorm);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hgff
