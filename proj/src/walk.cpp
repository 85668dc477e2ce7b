#include "hgff/walk.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "hgff/krawtchouk.hpp"

namespace hgff {

namespace {

constexpr std::int64_t kEnumerationCap = std::int64_t{1} << 22;

void check_weight_vector(const GraphSpec& g, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != g.d + 1) {
    throw DomainError("weights: expected d+1 entries");
  }
  for (double v : w) {
    if (!(v >= 0.0)) throw DomainError("weights: negative entry");
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("weights: entries sum to " + std::to_string(total) +
                      ", need 1 within 1e-9");
  }
}

}  // namespace

WalkWeights weights_uniform(const GraphSpec& g) {
  WalkWeights ww;
  ww.g = g;
  ww.model = Model::Uniform;
  ww.w.resize(g.d + 1);
  if (g.count_exact()) {
    for (int i = 0; i <= g.d; ++i) {
      ww.w[i] = static_cast<double>(sphere_size(g, i)) /
                static_cast<double>(g.vertex_count);
    }
  } else {
    for (int i = 0; i <= g.d; ++i) {
      ww.w[i] = std::exp(log_sphere_size(g.d, g.n, i) - g.log_vertex_count);
    }
  }
  return ww;
}

WalkWeights weights_nn(const GraphSpec& g) {
  WalkWeights ww;
  ww.g = g;
  ww.model = Model::NearestNeighbour;
  ww.w.assign(g.d + 1, 0.0);
  ww.w[1] = 1.0;
  return ww;
}

WalkWeights weights_binomial(const GraphSpec& g, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("weights_binomial: gamma must lie in (0,1)");
  }
  WalkWeights ww;
  ww.g = g;
  ww.model = Model::Binomial;
  ww.gamma = gamma;
  ww.w.resize(g.d + 1);
  for (int i = 0; i <= g.d; ++i) {
    // binomial pmf through logs; exact enough for any d and immune to
    // factorial overflow
    const double lg = std::lgamma(g.d + 1.0) - std::lgamma(i + 1.0) -
                      std::lgamma(g.d - i + 1.0) + i * std::log(gamma) +
                      (g.d - i) * std::log1p(-gamma);
    ww.w[i] = std::exp(lg);
  }
  return ww;
}

WalkWeights weights_custom(const GraphSpec& g, const std::vector<double>& w) {
  check_weight_vector(g, w);
  WalkWeights ww;
  ww.g = g;
  ww.model = Model::Custom;
  ww.w = w;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : ww.w) v /= total;
  return ww;
}

std::vector<double> eigenvalues_generic(const WalkWeights& ww) {
  const GraphSpec& g = ww.g;
  std::vector<double> lam(g.d + 1, 0.0);
  for (int i = 0; i <= g.d; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= g.d; ++j) {
      if (ww.w[j] == 0.0) continue;
      // w_j/kappa_j * K_j(i) = w_j * (K_j(i)/kappa_j); the ratio form stays
      // bounded by 1 in magnitude for any d
      auto [sign, lg] = kraw_signlog(g, j, i);
      if (sign == 0) continue;
      acc += ww.w[j] * sign * std::exp(lg - log_sphere_size(g.d, g.n, j));
    }
    lam[i] = acc;
  }
  return lam;
}

Spectrum eigenvalues(const WalkWeights& ww) {
  const GraphSpec& g = ww.g;
  Spectrum s;
  s.lambdas.resize(g.d + 1);
  switch (ww.model) {
    case Model::Uniform:
      for (int i = 0; i <= g.d; ++i) s.lambdas[i] = (i == 0) ? 1.0 : 0.0;
      break;
    case Model::NearestNeighbour:
      for (int i = 0; i <= g.d; ++i) {
        s.lambdas[i] =
            1.0 - static_cast<double>(g.n) * i / ((g.n - 1.0) * g.d);
      }
      break;
    case Model::Binomial: {
      const double base = 1.0 - g.n * ww.gamma / (g.n - 1.0);
      for (int i = 0; i <= g.d; ++i) s.lambdas[i] = std::pow(base, i);
      break;
    }
    case Model::Custom:
      s.lambdas = eigenvalues_generic(ww);
      break;
  }
  s.degeneracies.resize(g.d + 1);
  s.log_degeneracies.resize(g.d + 1);
  for (int i = 0; i <= g.d; ++i) {
    s.log_degeneracies[i] = log_sphere_size(g.d, g.n, i);
    try {
      s.degeneracies[i] = sphere_size(g, i);
    } catch (const CapacityError&) {
      s.degeneracies[i] = -1;
    }
  }
  return s;
}

double step_distribution(const WalkWeights& ww, std::int64_t t, int j) {
  const GraphSpec& g = ww.g;
  if (j < 0 || j > g.d) {
    throw DomainError("step_distribution: distance outside [0,d]");
  }
  if (t < 0) throw DomainError("step_distribution: negative time");
  const Spectrum s = eigenvalues(ww);
  double acc = 0.0;
  for (int i = 0; i <= g.d; ++i) {
    auto [sign, lg] = kraw_signlog(g, i, j);
    if (sign == 0) continue;
    acc += std::pow(s.lambdas[i], static_cast<double>(t)) * sign *
           std::exp(lg - g.log_vertex_count);
  }
  return acc;
}

std::int64_t dense_cap() {
  if (const char* env = std::getenv("HGFF_CAP")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 4096;
}

std::vector<Rank> retained_vertices(const GraphSpec& g,
                                    const BoundarySpec& b) {
  if (!g.count_exact()) {
    throw CapacityError("retained_vertices: vertex count exceeds int64");
  }
  std::vector<Rank> out;
  if (!b.is_ball) {
    out.resize(static_cast<std::size_t>(g.vertex_count));
    std::iota(out.begin(), out.end(), Rank{0});
    return out;
  }
  out.reserve(static_cast<std::size_t>(retained_count(g, b)));
  for (Rank x = 0; x < g.vertex_count; ++x) {
    if (distance_from_origin(g, x) <= b.r) out.push_back(x);
  }
  return out;
}

Eigen::MatrixXd dense_transition(const WalkWeights& ww,
                                 const BoundarySpec& b) {
  const GraphSpec& g = ww.g;
  if (!g.count_exact() || g.vertex_count > dense_cap()) {
    throw CapacityError("dense_transition: n^d exceeds the vertex cap (" +
                        std::to_string(dense_cap()) + ")");
  }
  std::vector<double> entry(g.d + 1);
  for (int i = 0; i <= g.d; ++i) {
    entry[i] = ww.w[i] / static_cast<double>(sphere_size(g, i));
  }
  const std::vector<Rank> verts = retained_vertices(g, b);
  const auto m = static_cast<Eigen::Index>(verts.size());
  Eigen::MatrixXd P(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index c = a; c < m; ++c) {
      const double v = entry[hamming_distance(g, verts[a], verts[c])];
      P(a, c) = v;
      P(c, a) = v;
    }
  }
  return P;
}

std::vector<double> lumped_row_from(const WalkWeights& ww, Rank x) {
  const GraphSpec& g = ww.g;
  if (!g.count_exact() || g.vertex_count > kEnumerationCap) {
    throw CapacityError("lumped_row_from: n^d exceeds the enumeration cap");
  }
  std::vector<double> entry(g.d + 1);
  for (int i = 0; i <= g.d; ++i) {
    entry[i] = ww.w[i] / static_cast<double>(sphere_size(g, i));
  }
  std::vector<double> row(g.d + 1, 0.0);
  for (Rank y = 0; y < g.vertex_count; ++y) {
    row[distance_from_origin(g, y)] += entry[hamming_distance(g, x, y)];
  }
  return row;
}

LumpedChain lumped_transition(const WalkWeights& ww) {
  const GraphSpec& g = ww.g;
  LumpedChain chain;
  chain.tilde_p.resize(g.d + 1, g.d + 1);

  const bool enumerable =
      g.count_exact() && g.vertex_count <= kEnumerationCap;
  if (enumerable) {
    // Canonical representative of class i: value 1 in the first i
    // coordinates, 0 elsewhere.
    std::vector<int> digits(g.d, 0);
    for (int i = 0; i <= g.d; ++i) {
      if (i > 0) digits[i - 1] = 1;
      const std::vector<double> row = lumped_row_from(ww, digits_rank(g, digits));
      for (int j = 0; j <= g.d; ++j) chain.tilde_p(i, j) = row[j];
    }
    return chain;
  }

  // Closed-form fallbacks past the enumeration cap.
  if (ww.model == Model::Uniform) {
    for (int i = 0; i <= g.d; ++i) {
      for (int j = 0; j <= g.d; ++j) {
        chain.tilde_p(i, j) =
            std::exp(log_sphere_size(g.d, g.n, j) - g.log_vertex_count);
      }
    }
    return chain;
  }
  if (ww.model == Model::NearestNeighbour) {
    // Birth-death moves of the distance from the origin: one of the i
    // nonzero coordinates resets (down), re-randomizes among nonzero values
    // (hold), or one of the d-i zero coordinates lights up (up).
    chain.tilde_p.setZero();
    const double deg = static_cast<double>(g.d) * (g.n - 1);
    for (int i = 0; i <= g.d; ++i) {
      if (i > 0) chain.tilde_p(i, i - 1) = i / deg;
      chain.tilde_p(i, i) = i * (g.n - 2.0) / deg;
      if (i < g.d) chain.tilde_p(i, i + 1) = (g.d - i) / static_cast<double>(g.d);
    }
    return chain;
  }
  throw CapacityError(
      "lumped_transition: n^d exceeds the enumeration cap and no closed "
      "form applies to this model");
}

}  // namespace hgff
