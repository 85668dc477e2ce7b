#include "hgff/sampler.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "hgff/errors.hpp"
#include "hgff/rng.hpp"

namespace hgff {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_sampler_size(const GraphSpec& g) {
  if (!g.count_exact() || g.vertex_count > dense_cap()) {
    throw CapacityError("field synthesis is a dense transform; raise the cap");
  }
}

std::vector<std::vector<int>> all_digits(const GraphSpec& g) {
  std::vector<std::vector<int>> dg(
      static_cast<std::size_t>(g.vertex_count));
  for (Rank x = 0; x < g.vertex_count; ++x) {
    dg[static_cast<std::size_t>(x)] = rank_digits(g, x);
  }
  return dg;
}

int dot_mod_n(const std::vector<int>& a, const std::vector<int>& b, int n) {
  int acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc = (acc + a[k] * b[k]) % n;
  }
  return acc;
}

}  // namespace

FieldSample sample_field(const WalkWeights& ww, const MassSpec& ms,
                         std::uint64_t seed) {
  const GraphSpec& g = ww.g;
  if (ms.m <= 0.0) {
    throw MasslessWithoutBoundary(
        "the free-boundary sampler needs a positive mass");
  }
  check_sampler_size(g);
  const std::int64_t nv = g.vertex_count;
  const int n = g.n;

  Spectrum sp = eigenvalues(ww);
  std::vector<std::vector<int>> dg = all_digits(g);

  // amplitude attached to frequency sphere i
  std::vector<double> amp(static_cast<std::size_t>(g.d) + 1);
  for (int i = 0; i <= g.d; ++i) {
    double gap = 1.0 / ms.alpha - sp.lambdas[static_cast<std::size_t>(i)];
    amp[static_cast<std::size_t>(i)] =
        1.0 / std::sqrt(ms.beta * static_cast<double>(nv) * gap);
  }

  // Draw coefficients frequency by frequency in rank order: a frequency
  // equal to its own negation gets a real unit Gaussian; otherwise the
  // lower-ranked member of {y, -y} draws (A + iB)/sqrt(2) and its partner
  // takes the conjugate. Either way E|c_y|^2 = 1 and c_{-y} = conj(c_y),
  // which is exactly what makes the synthesized field real.
  std::vector<std::complex<double>> coef(static_cast<std::size_t>(nv));
  Rng rng(seed);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Rank y = 0; y < nv; ++y) {
    const auto& yd = dg[static_cast<std::size_t>(y)];
    bool self = true;
    Rank neg = 0;
    Rank pw = 1;
    for (int k = 0; k < g.d; ++k) {
      int v = yd[static_cast<std::size_t>(k)];
      if ((2 * v) % n != 0) self = false;
      neg += static_cast<Rank>((n - v) % n) * pw;
      pw *= n;
    }
    if (self) {
      coef[static_cast<std::size_t>(y)] = rng.next_normal();
    } else if (y < neg) {
      double a = rng.next_normal();
      double b = rng.next_normal();
      coef[static_cast<std::size_t>(y)] =
          std::complex<double>(a * inv_sqrt2, b * inv_sqrt2);
      coef[static_cast<std::size_t>(neg)] =
          std::complex<double>(a * inv_sqrt2, -b * inv_sqrt2);
    }
  }

  std::vector<std::complex<double>> zeta(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    zeta[static_cast<std::size_t>(k)] =
        std::polar(1.0, kTwoPi * static_cast<double>(k) /
                            static_cast<double>(n));
  }
  for (Rank y = 0; y < nv; ++y) {
    coef[static_cast<std::size_t>(y)] *=
        amp[static_cast<std::size_t>(distance_from_origin(g, y))];
  }

  FieldSample fs;
  fs.params_walk = ww;
  fs.params_mass = ms;
  fs.seed = seed;
  fs.values.resize(static_cast<std::size_t>(nv));
  double worst_imag = 0.0;
  for (Rank x = 0; x < nv; ++x) {
    std::complex<double> acc(0.0, 0.0);
    const auto& xd = dg[static_cast<std::size_t>(x)];
    for (Rank y = 0; y < nv; ++y) {
      int e = dot_mod_n(xd, dg[static_cast<std::size_t>(y)], n);
      acc += coef[static_cast<std::size_t>(y)] *
             zeta[static_cast<std::size_t>(e)];
    }
    worst_imag = std::max(worst_imag, std::abs(acc.imag()));
    fs.values[static_cast<std::size_t>(x)] = acc.real();
  }
  fs.imag_residue = worst_imag;
  return fs;
}

namespace {

void check_field_shape(const GraphSpec& g, const FieldSample& field,
                       const BoundarySpec& b) {
  if (!g.count_exact() ||
      field.values.size() != static_cast<std::size_t>(g.vertex_count)) {
    throw DomainError("field length does not match the vertex count");
  }
  if (b.is_ball) {
    for (Rank x = 0; x < g.vertex_count; ++x) {
      if (distance_from_origin(g, x) > b.r &&
          field.values[static_cast<std::size_t>(x)] != 0.0) {
        throw DomainError("field must vanish on the boundary ball");
      }
    }
  }
}

std::vector<double> couplings(const WalkWeights& ww) {
  std::vector<double> j(ww.w.size());
  for (int i = 0; i <= ww.g.d; ++i) {
    j[static_cast<std::size_t>(i)] =
        ww.w[static_cast<std::size_t>(i)] /
        std::exp(log_sphere_size(ww.g.d, ww.g.n, i));
  }
  return j;
}

}  // namespace

double hamiltonian(const WalkWeights& ww, const MassSpec& ms,
                   const FieldSample& field, const BoundarySpec& b) {
  const GraphSpec& g = ww.g;
  check_field_shape(g, field, b);
  std::vector<std::vector<int>> dg = all_digits(g);
  std::vector<double> j = couplings(ww);
  const std::int64_t nv = g.vertex_count;
  double pairs = 0.0;
  for (Rank x = 0; x < nv; ++x) {
    for (Rank y = x + 1; y < nv; ++y) {
      int rho = 0;
      for (int k = 0; k < g.d; ++k) {
        if (dg[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)] !=
            dg[static_cast<std::size_t>(y)][static_cast<std::size_t>(k)]) {
          ++rho;
        }
      }
      double diff = field.values[static_cast<std::size_t>(x)] -
                    field.values[static_cast<std::size_t>(y)];
      pairs += j[static_cast<std::size_t>(rho)] * diff * diff;
    }
  }
  double sq = 0.0;
  for (Rank x = 0; x < nv; ++x) {
    double v = field.values[static_cast<std::size_t>(x)];
    sq += v * v;
  }
  double m2 = (1.0 - ms.alpha) / ms.alpha;
  // unordered pairs above, so 1/2 instead of 1/4
  return 0.5 * pairs + 0.5 * m2 * sq;
}

double hamiltonian_quadratic(const WalkWeights& ww, const MassSpec& ms,
                             const FieldSample& field, const BoundarySpec& b) {
  const GraphSpec& g = ww.g;
  check_field_shape(g, field, b);
  std::vector<std::vector<int>> dg = all_digits(g);
  std::vector<double> j = couplings(ww);
  const std::int64_t nv = g.vertex_count;
  double cross = 0.0;
  double sq = 0.0;
  for (Rank x = 0; x < nv; ++x) {
    double vx = field.values[static_cast<std::size_t>(x)];
    sq += vx * vx;
    for (Rank y = 0; y < nv; ++y) {
      int rho = 0;
      for (int k = 0; k < g.d; ++k) {
        if (dg[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)] !=
            dg[static_cast<std::size_t>(y)][static_cast<std::size_t>(k)]) {
          ++rho;
        }
      }
      cross += j[static_cast<std::size_t>(rho)] * vx *
               field.values[static_cast<std::size_t>(y)];
    }
  }
  double m2 = (1.0 - ms.alpha) / ms.alpha;
  return 0.5 * (1.0 + m2) * sq - 0.5 * cross;
}

SampleStats accumulate_stats(const WalkWeights& ww, const MassSpec& ms,
                             std::int64_t n_samples, std::uint64_t seed,
                             const std::vector<std::pair<Rank, Rank>>& probes) {
  const GraphSpec& g = ww.g;
  if (ms.m <= 0.0) {
    throw MasslessWithoutBoundary(
        "the free-boundary sampler needs a positive mass");
  }
  if (n_samples < 0) {
    throw DomainError("sample count must be nonnegative");
  }
  check_sampler_size(g);
  SampleStats st;
  st.mean.assign(static_cast<std::size_t>(g.vertex_count), 0.0);
  st.pairs.reserve(probes.size());
  for (const auto& pr : probes) {
    if (pr.first < 0 || pr.first >= g.vertex_count || pr.second < 0 ||
        pr.second >= g.vertex_count) {
      throw DomainError("probe vertex rank out of range");
    }
    PairStat ps;
    ps.a = pr.first;
    ps.b = pr.second;
    st.pairs.push_back(ps);
  }
  if (n_samples == 0) return st;

  std::vector<double> prod_sum(probes.size(), 0.0);
  std::vector<double> prod_sq(probes.size(), 0.0);
  const double inv_nv = 1.0 / static_cast<double>(g.vertex_count);
  for (std::int64_t k = 0; k < n_samples; ++k) {
    std::uint64_t sub =
        seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(k) + 1);
    FieldSample fs = sample_field(ww, ms, sub);
    double s = 0.0;
    for (std::size_t x = 0; x < fs.values.size(); ++x) {
      st.mean[x] += fs.values[x];
      s += fs.values[x];
    }
    s *= inv_nv;
    st.s_sum += s;
    st.s2_sum += s * s;
    st.s4_sum += s * s * s * s;
    double h = ms.beta * hamiltonian_quadratic(ww, ms, fs, boundary_none());
    st.h_sum += h;
    st.h2_sum += h * h;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      double v = fs.values[static_cast<std::size_t>(probes[p].first)] *
                 fs.values[static_cast<std::size_t>(probes[p].second)];
      prod_sum[p] += v;
      prod_sq[p] += v * v;
    }
  }
  st.count = n_samples;
  for (auto& m : st.mean) m /= static_cast<double>(n_samples);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    double mean = prod_sum[p] / static_cast<double>(n_samples);
    st.pairs[p].mean_product = mean;
    if (n_samples > 1) {
      double var =
          (prod_sq[p] - static_cast<double>(n_samples) * mean * mean) /
          static_cast<double>(n_samples - 1);
      if (var < 0.0) var = 0.0;
      st.pairs[p].se = std::sqrt(var / static_cast<double>(n_samples));
    }
  }
  return st;
}

SampleStats merge_stats(const SampleStats& a, const SampleStats& b) {
  if (a.mean.size() != b.mean.size() || a.pairs.size() != b.pairs.size()) {
    throw DomainError("stats shapes do not match");
  }
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  SampleStats out = a;
  double na = static_cast<double>(a.count);
  double nb = static_cast<double>(b.count);
  out.count = a.count + b.count;
  double nt = static_cast<double>(out.count);
  for (std::size_t x = 0; x < out.mean.size(); ++x) {
    out.mean[x] = (a.mean[x] * na + b.mean[x] * nb) / nt;
  }
  for (std::size_t p = 0; p < out.pairs.size(); ++p) {
    if (a.pairs[p].a != b.pairs[p].a || a.pairs[p].b != b.pairs[p].b) {
      throw DomainError("stats probe lists do not match");
    }
    // reconstruct the raw sums, merge, and rederive mean and se
    double sa = a.pairs[p].mean_product * na;
    double sb = b.pairs[p].mean_product * nb;
    double qa = (na > 1 ? a.pairs[p].se * a.pairs[p].se * na * (na - 1)
                        : 0.0) +
                sa * sa / na;
    double qb = (nb > 1 ? b.pairs[p].se * b.pairs[p].se * nb * (nb - 1)
                        : 0.0) +
                sb * sb / nb;
    double mean = (sa + sb) / nt;
    out.pairs[p].mean_product = mean;
    double var = (qa + qb - nt * mean * mean) / (nt - 1.0);
    if (var < 0.0) var = 0.0;
    out.pairs[p].se = std::sqrt(var / nt);
  }
  out.s_sum = a.s_sum + b.s_sum;
  out.s2_sum = a.s2_sum + b.s2_sum;
  out.s4_sum = a.s4_sum + b.s4_sum;
  out.h_sum = a.h_sum + b.h_sum;
  out.h2_sum = a.h2_sum + b.h2_sum;
  return out;
}

namespace {

void require_samples(const SampleStats& stats, std::int64_t least) {
  if (stats.count < least) {
    throw EmptyStats("not enough accumulated samples");
  }
}

}  // namespace

double field_mean_variance(const SampleStats& stats) {
  require_samples(stats, 2);
  double n = static_cast<double>(stats.count);
  double mean = stats.s_sum / n;
  double var = (stats.s2_sum - n * mean * mean) / (n - 1.0);
  return var < 0.0 ? 0.0 : var;
}

double field_mean_variance_se(const SampleStats& stats) {
  require_samples(stats, 2);
  double n = static_cast<double>(stats.count);
  double m2 = stats.s2_sum / n;
  double m4 = stats.s4_sum / n;
  double v = m4 - m2 * m2;
  if (v < 0.0) v = 0.0;
  return std::sqrt(v / n);
}

double energy_mean(const SampleStats& stats) {
  require_samples(stats, 1);
  return stats.h_sum / static_cast<double>(stats.count);
}

double energy_se(const SampleStats& stats) {
  require_samples(stats, 2);
  double n = static_cast<double>(stats.count);
  double mean = stats.h_sum / n;
  double var = (stats.h2_sum - n * mean * mean) / (n - 1.0);
  if (var < 0.0) var = 0.0;
  return std::sqrt(var / n);
}

}  // namespace hgff
