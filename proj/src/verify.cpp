#include "hgff/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "hgff/errors.hpp"
#include "hgff/graph.hpp"
#include "hgff/green.hpp"
#include "hgff/krawtchouk.hpp"
#include "hgff/partition.hpp"
#include "hgff/rng.hpp"
#include "hgff/sampler.hpp"
#include "hgff/walk.hpp"

namespace hgff {

bool VerifyReport::all_pass() const {
  for (const auto& gr : groups) {
    if (!gr.pass) return false;
  }
  return true;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Meter {
  int checks = 0;
  double max_err = 0.0;
  bool pass = true;
  std::string note;

  void expect(bool ok, double err, const char* what) {
    ++checks;
    if (std::isfinite(err)) max_err = std::max(max_err, err);
    if (!ok && pass) {
      pass = false;
      note = what;
    }
  }

  void close(double value, double target, double tol, const char* what) {
    double err = std::abs(value - target);
    expect(err <= tol, err, what);
  }

  GroupResult result(const char* name) const {
    GroupResult gr;
    gr.name = name;
    gr.pass = pass;
    gr.checks = checks;
    gr.max_err = max_err;
    gr.note = note;
    return gr;
  }
};

struct Ctx {
  VerifyLevel level;
  FaultInjection fault;
  bool full() const { return level == VerifyLevel::Full; }

  // the corruption hook all Krawtchouk consumers in this suite go through
  double kfetch(const GraphSpec& g, int i, int j) const {
    double v = kraw(g, i, j);
    if (fault.flip_kraw_sign && i == 1 && j == 1) return -v;
    return v;
  }
};

GroupResult run_group(const char* name,
                      const std::function<void(Meter&)>& body) {
  Meter m;
  try {
    body(m);
  } catch (const std::exception& e) {
    m.pass = false;
    m.note = std::string("exception: ") + e.what();
  }
  return m.result(name);
}

std::vector<std::pair<int, int>> small_grid(bool full) {
  std::vector<std::pair<int, int>> g = {{2, 2}, {3, 2}, {2, 3}, {4, 2}};
  if (full) {
    g.push_back({3, 3});
    g.push_back({5, 2});
    g.push_back({2, 4});
    g.push_back({4, 3});
  }
  return g;
}

WalkWeights model_weights(const GraphSpec& g, Model model, double gamma) {
  switch (model) {
    case Model::Uniform:
      return weights_uniform(g);
    case Model::NearestNeighbour:
      return weights_nn(g);
    case Model::Binomial:
      return weights_binomial(g, gamma);
    case Model::Custom:
      break;
  }
  throw DomainError("no canonical custom weights");
}

// ---------------------------------------------------------------- graph --

void group_graph(const Ctx& ctx, Meter& m) {
  for (auto [d, n] : small_grid(ctx.full())) {
    GraphSpec g = make_graph(d, n);
    std::int64_t total = 0;
    for (int i = 0; i <= d; ++i) total += sphere_size(g, i);
    m.expect(total == g.vertex_count,
             static_cast<double>(std::abs(total - g.vertex_count)),
             "sphere sizes must partition the vertex count");
    for (int r = 1; r <= d - 1; ++r) {
      BoundarySpec b = boundary_ball(g, r);
      std::int64_t split = boundary_size(g, r) + retained_count(g, b);
      m.expect(split == g.vertex_count,
               static_cast<double>(std::abs(split - g.vertex_count)),
               "ball and boundary must partition the vertex count");
    }
    Rng rng(0x67726170u + static_cast<std::uint64_t>(d * 100 + n));
    for (int t = 0; t < 32; ++t) {
      Rank x = static_cast<Rank>(
          rng.next_below(static_cast<std::uint64_t>(g.vertex_count)));
      Rank back = digits_rank(g, rank_digits(g, x));
      m.expect(back == x, static_cast<double>(std::abs(back - x)),
               "digit decomposition must round-trip");
      Rank y = static_cast<Rank>(
          rng.next_below(static_cast<std::uint64_t>(g.vertex_count)));
      Rank z = static_cast<Rank>(
          rng.next_below(static_cast<std::uint64_t>(g.vertex_count)));
      int dxy = hamming_distance(g, x, y);
      int dyx = hamming_distance(g, y, x);
      int dxz = hamming_distance(g, x, z);
      int dzy = hamming_distance(g, z, y);
      m.expect(dxy == dyx, std::abs(dxy - dyx), "distance must be symmetric");
      m.expect((dxy == 0) == (x == y), 0.0,
               "distance vanishes exactly on equal vertices");
      m.expect(dxy <= dxz + dzy,
               static_cast<double>(std::max(0, dxy - dxz - dzy)),
               "triangle inequality");
    }
    if (g.vertex_count <= 256) {
      for (int i = 0; i <= d; ++i) {
        auto sphere = enumerate_sphere(g, 0, i);
        m.expect(static_cast<std::int64_t>(sphere.size()) ==
                     sphere_size(g, i),
                 std::abs(static_cast<double>(sphere.size()) -
                          static_cast<double>(sphere_size(g, i))),
                 "enumerated sphere size must match the closed form");
        bool sorted = std::is_sorted(sphere.begin(), sphere.end());
        bool right_dist = true;
        for (Rank v : sphere) {
          if (distance_from_origin(g, v) != i) right_dist = false;
        }
        m.expect(sorted && right_dist, sorted && right_dist ? 0.0 : 1.0,
                 "sphere members must be sorted and at the right distance");
      }
    }
  }
}

// ----------------------------------------------------------- characters --

void group_characters(const Ctx& ctx, Meter& m) {
  std::vector<std::pair<int, int>> grid = {{2, 2}, {2, 3}, {3, 2}};
  if (ctx.full()) {
    grid.push_back({3, 3});
    grid.push_back({2, 4});
  }
  for (auto [d, n] : grid) {
    GraphSpec g = make_graph(d, n);
    const std::int64_t nv = g.vertex_count;
    Rng rng(0x63686172u + static_cast<std::uint64_t>(d * 100 + n));
    int pairs = nv <= 16 ? -1 : 48;  // -1: exhaustive
    auto check_pair = [&](Rank y, Rank yp) {
      std::complex<double> acc(0.0, 0.0);
      for (Rank x = 0; x < nv; ++x) {
        acc += character_phase(g, x, y) * std::conj(character_phase(g, x, yp));
      }
      double target = (y == yp) ? static_cast<double>(nv) : 0.0;
      m.close(std::abs(acc - std::complex<double>(target, 0.0)), 0.0, 1e-9,
              "character rows must be orthogonal");
    };
    if (pairs < 0) {
      for (Rank y = 0; y < nv; ++y) {
        for (Rank yp = 0; yp < nv; ++yp) check_pair(y, yp);
      }
    } else {
      for (int t = 0; t < pairs; ++t) {
        check_pair(static_cast<Rank>(
                       rng.next_below(static_cast<std::uint64_t>(nv))),
                   static_cast<Rank>(
                       rng.next_below(static_cast<std::uint64_t>(nv))));
      }
    }
    for (int t = 0; t < 24; ++t) {
      Rank x = static_cast<Rank>(
          rng.next_below(static_cast<std::uint64_t>(nv)));
      Rank y = static_cast<Rank>(
          rng.next_below(static_cast<std::uint64_t>(nv)));
      m.close(std::abs(character_phase(g, x, y)), 1.0, 1e-12,
              "characters must have unit modulus");
      m.close(std::abs(character_phase(g, x, y) - character_phase(g, y, x)),
              0.0, 1e-12, "the pairing must be symmetric");
    }
    // radial transform against the raw vertex sum
    std::vector<std::complex<double>> f(static_cast<std::size_t>(d) + 1);
    for (auto& v : f) v = {rng.next_normal(), rng.next_normal()};
    for (int t = 0; t < 8; ++t) {
      Rank x = static_cast<Rank>(
          rng.next_below(static_cast<std::uint64_t>(nv)));
      std::complex<double> direct(0.0, 0.0);
      for (Rank y = 0; y < nv; ++y) {
        direct += f[static_cast<std::size_t>(distance_from_origin(g, y))] *
                  character_phase(g, x, y);
      }
      m.close(std::abs(radial_fourier(g, f, x) - direct), 0.0, 1e-9,
              "radial transform must equal the vertex sum");
    }
  }
}

// ----------------------------------------------------------- krawtchouk --

void group_krawtchouk(const Ctx& ctx, Meter& m) {
  std::vector<int> ds = {2, 4, 8, 12};
  if (ctx.full()) {
    ds.push_back(16);
    ds.push_back(20);
  }
  for (int n : {2, 3, 5}) {
    for (int d : ds) {
      GraphSpec g = make_graph(d, n);
      // generating-function oracle, exact at these sizes
      for (int j = 0; j <= d; ++j) {
        std::vector<double> row = kraw_row_genfun(g, j);
        for (int i = 0; i <= d; ++i) {
          double a = ctx.kfetch(g, i, j);
          double b = row[static_cast<std::size_t>(i)];
          double tol = 1e-9 * std::max(1.0, std::abs(b));
          m.close(a, b, tol, "explicit sum must match the generating function");
        }
      }
      // orthogonality, exact 128-bit integer arithmetic
      for (int i = 0; i <= d; ++i) {
        for (int j = i; j <= d; ++j) {
          __int128 acc = 0;
          for (int l = 0; l <= d; ++l) {
            __int128 ki = static_cast<__int128>(
                std::llround(ctx.kfetch(g, i, l)));
            __int128 kj = static_cast<__int128>(
                std::llround(ctx.kfetch(g, j, l)));
            acc += static_cast<__int128>(sphere_size(g, l)) * ki * kj;
          }
          __int128 want =
              (i == j) ? static_cast<__int128>(sphere_size(g, i)) *
                             static_cast<__int128>(g.vertex_count)
                       : 0;
          m.expect(acc == want,
                   acc == want ? 0.0
                               : std::abs(static_cast<double>(acc - want)),
                   "orthogonality must hold exactly");
        }
      }
      for (int i = 0; i <= d; ++i) {
        double k0 = ctx.kfetch(g, i, 0);
        m.close(k0, static_cast<double>(sphere_size(g, i)), 0.0,
                "K_i(0) must equal the sphere size");
        for (int j = 0; j <= d; ++j) {
          double v = std::abs(ctx.kfetch(g, i, j));
          double cap = static_cast<double>(sphere_size(g, i));
          m.expect(v <= cap + 1e-9, std::max(0.0, v - cap),
                   "|K_i(j)| must stay below kappa_i");
          auto [sgn, lg] = kraw_signlog(g, i, j);
          double rebuilt = sgn == 0 ? 0.0 : sgn * std::exp(lg);
          double tol = 1e-9 * std::max(1.0, std::abs(ctx.kfetch(g, i, j)));
          m.close(rebuilt, kraw(g, i, j), tol,
                  "sign-log form must rebuild the value");
        }
      }
    }
  }
}

// ------------------------------------------------------------- spectrum --

void group_spectrum(const Ctx& ctx, Meter& m) {
  for (auto [d, n] : small_grid(ctx.full())) {
    GraphSpec g = make_graph(d, n);
    std::vector<WalkWeights> models = {
        weights_uniform(g), weights_nn(g), weights_binomial(g, 0.3),
        weights_binomial(g, 0.8)};
    for (const auto& ww : models) {
      Spectrum fast = eigenvalues(ww);
      std::vector<double> gen = eigenvalues_generic(ww);
      for (int i = 0; i <= d; ++i) {
        m.close(fast.lambdas[static_cast<std::size_t>(i)],
                gen[static_cast<std::size_t>(i)], 1e-12,
                "closed-form eigenvalues must match the Krawtchouk sum");
      }
      m.close(fast.lambdas[0], 1.0, 1e-14, "lambda_0 must be 1");
      std::int64_t degsum = 0;
      for (int i = 0; i <= d; ++i) {
        degsum += fast.degeneracies[static_cast<std::size_t>(i)];
      }
      m.expect(degsum == g.vertex_count,
               static_cast<double>(std::abs(degsum - g.vertex_count)),
               "degeneracies must sum to the vertex count");
    }
    // eigenvalue bounds over random stochastic weight vectors
    Rng rng(0x73706563u + static_cast<std::uint64_t>(d * 100 + n));
    int trials = ctx.full() ? 1000 : 200;
    double lo = -1.0 / static_cast<double>(n - 1) - 1e-12;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> w(static_cast<std::size_t>(d) + 1);
      double s = 0.0;
      for (auto& v : w) {
        v = -std::log(rng.next_double() + 1e-300);
        s += v;
      }
      for (auto& v : w) v /= s;
      Spectrum sp = eigenvalues(weights_custom(g, w));
      for (int i = 0; i <= d; ++i) {
        double lam = sp.lambdas[static_cast<std::size_t>(i)];
        m.expect(lam >= lo && lam <= 1.0 + 1e-12,
                 std::max(0.0, std::max(lo - lam, lam - 1.0)),
                 "eigenvalues must lie in [-1/(n-1), 1]");
      }
    }
    if (g.vertex_count <= 81) {
      for (const auto& ww : models) {
        Eigen::MatrixXd p = dense_transition(ww, boundary_none());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
        std::vector<double> dense_ev(es.eigenvalues().data(),
                                     es.eigenvalues().data() + p.rows());
        Spectrum sp = eigenvalues(ww);
        std::vector<double> pred;
        for (int i = 0; i <= d; ++i) {
          for (std::int64_t k = 0;
               k < sp.degeneracies[static_cast<std::size_t>(i)]; ++k) {
            pred.push_back(sp.lambdas[static_cast<std::size_t>(i)]);
          }
        }
        std::sort(pred.begin(), pred.end());
        std::sort(dense_ev.begin(), dense_ev.end());
        double worst = 0.0;
        for (std::size_t k = 0; k < pred.size(); ++k) {
          worst = std::max(worst, std::abs(pred[k] - dense_ev[k]));
        }
        m.close(worst, 0.0, 1e-8,
                "dense spectrum must be the degenerate closed-form multiset");
        // t-step distributions against matrix powers
        Eigen::MatrixXd pow = Eigen::MatrixXd::Identity(p.rows(), p.cols());
        for (int t = 0; t <= 6; ++t) {
          for (int j = 0; j <= d; ++j) {
            Rank rep = enumerate_sphere(ww.g, 0, j).front();
            m.close(step_distribution(ww, t, j), pow(0, rep), 1e-10,
                    "spectral t-step law must match the matrix power");
          }
          pow = pow * p;
        }
      }
    }
  }
}

// -------------------------------------------------------------- lumping --

void group_lumping(const Ctx& ctx, Meter& m) {
  for (auto [d, n] : small_grid(ctx.full())) {
    GraphSpec g = make_graph(d, n);
    std::vector<WalkWeights> models = {
        weights_uniform(g), weights_nn(g), weights_binomial(g, 0.4)};
    for (const auto& ww : models) {
      LumpedChain lc = lumped_transition(ww);
      for (int i = 0; i <= d; ++i) {
        double row = 0.0;
        for (int j = 0; j <= d; ++j) {
          double e = lc.tilde_p(i, j);
          m.expect(e >= -1e-15, std::max(0.0, -e),
                   "lumped entries must be nonnegative");
          row += e;
        }
        m.close(row, 1.0, 1e-12, "lumped rows must sum to one");
      }
      if (ww.model == Model::Uniform) {
        for (int i = 0; i <= d; ++i) {
          for (int j = 0; j <= d; ++j) {
            m.close(lc.tilde_p(i, j),
                    std::exp(log_sphere_size(d, n, j) - g.log_vertex_count),
                    1e-12, "uniform lumped rows must be the sphere law");
          }
        }
      }
      if (ww.model == Model::NearestNeighbour) {
        double deg = static_cast<double>(d) * (n - 1);
        for (int i = 0; i <= d; ++i) {
          if (i + 1 <= d) {
            m.close(lc.tilde_p(i, i + 1),
                    static_cast<double>(d - i) * (n - 1) / deg, 1e-12,
                    "neighbour chain must step up with the birth rate");
          }
          if (i >= 1) {
            m.close(lc.tilde_p(i, i - 1), static_cast<double>(i) / deg,
                    1e-12, "neighbour chain must step down with the death rate");
          }
          m.close(lc.tilde_p(i, i),
                  static_cast<double>(i) * (n - 2) / deg, 1e-12,
                  "neighbour chain must hold with the lateral rate");
        }
      }
      if (g.vertex_count <= 256) {
        for (int i = 0; i <= d; ++i) {
          auto sphere = enumerate_sphere(g, 0, i);
          for (Rank x : sphere) {
            std::vector<double> row = lumped_row_from(ww, x);
            double worst = 0.0;
            for (int j = 0; j <= d; ++j) {
              worst = std::max(
                  worst, std::abs(row[static_cast<std::size_t>(j)] -
                                  lc.tilde_p(i, j)));
            }
            m.close(worst, 0.0, 1e-12,
                    "every class representative must lump identically");
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------- green --

void group_green(const Ctx& ctx, Meter& m) {
  std::vector<double> masses = ctx.full()
                                   ? std::vector<double>{0.5, 1.0, 2.0}
                                   : std::vector<double>{1.0};
  for (int d : {2, 3}) {
    for (int n : {2, 3}) {
      GraphSpec g = make_graph(d, n);
      std::vector<WalkWeights> models = {
          weights_uniform(g), weights_nn(g), weights_binomial(g, 0.3),
          weights_binomial(g, 0.8)};
      for (const auto& ww : models) {
        for (double mm : masses) {
          MassSpec ms = mass_spec(mm, 1.0);
          GreenResult res = green_dense_oracle(ww, ms, boundary_none());
          const auto nn = res.values.rows();
          double worst = 0.0;
          double asym = 0.0;
          double neg = 0.0;
          for (Eigen::Index i = 0; i < nn; ++i) {
            for (Eigen::Index j = 0; j < nn; ++j) {
              int rho = hamming_distance(g, res.vertices[i], res.vertices[j]);
              worst = std::max(worst,
                               std::abs(res.values(i, j) -
                                        green_massive_radial(ww, ms, rho)));
              asym = std::max(asym,
                              std::abs(res.values(i, j) - res.values(j, i)));
              neg = std::min(neg, res.values(i, j));
            }
          }
          m.close(worst, 0.0, 1e-10,
                  "spectral Green must match the dense inverse");
          m.close(asym, 0.0, 1e-10, "Green matrices must be symmetric");
          m.expect(neg >= -1e-12, std::max(0.0, -neg),
                   "Green entries must be nonnegative");
          Eigen::MatrixXd p = dense_transition(ww, boundary_none());
          Eigen::MatrixXd resid =
              (Eigen::MatrixXd::Identity(nn, nn) - ms.alpha * p) *
                  res.values -
              Eigen::MatrixXd::Identity(nn, nn);
          m.close(resid.cwiseAbs().maxCoeff(), 0.0, 1e-9,
                  "Green must invert I - alpha P");
        }
      }
      // ball-restricted oracle properties, massless included
      for (double mm : {0.0, 1.0}) {
        MassSpec ms = mass_spec(mm, 1.0);
        BoundarySpec b = boundary_ball(g, 1);
        WalkWeights ww = weights_nn(g);
        GreenResult res = green_dense_oracle(ww, ms, b);
        Eigen::MatrixXd p = dense_transition(ww, b);
        const auto nn = res.values.rows();
        Eigen::MatrixXd resid =
            (Eigen::MatrixXd::Identity(nn, nn) - ms.alpha * p) * res.values -
            Eigen::MatrixXd::Identity(nn, nn);
        m.close(resid.cwiseAbs().maxCoeff(), 0.0, 1e-9,
                "restricted Green must invert I - alpha P-hat");
      }
      // uniform ball closed form: delta + (1/n^d)/(1/alpha - 1 + B/n^d)
      for (int r = 1; r <= d - 1; ++r) {
        MassSpec ms = mass_spec(1.0, 1.0);
        WalkWeights ww = weights_uniform(g);
        GreenResult res = green_dense_oracle(ww, ms, boundary_ball(g, r));
        double bfrac = static_cast<double>(boundary_size(g, r)) /
                       static_cast<double>(g.vertex_count);
        double off = (1.0 / static_cast<double>(g.vertex_count)) /
                     (1.0 / ms.alpha - 1.0 + bfrac);
        const auto nn = res.values.rows();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < nn; ++i) {
          for (Eigen::Index j = 0; j < nn; ++j) {
            double want = (i == j ? 1.0 : 0.0) + off;
            worst = std::max(worst, std::abs(res.values(i, j) - want));
          }
        }
        m.close(worst, 0.0, 1e-10,
                "uniform ball Green must be delta plus a flat shift");
      }
    }
  }
  {  // frozen spot values and scalings
    GraphSpec g = make_graph(2, 2);
    WalkWeights nn2 = weights_nn(g);
    MassSpec ms = mass_spec(1.0, 1.0);
    m.close(green_massive_radial(nn2, ms, 0), 7.0 / 6.0, 1e-12,
            "neighbour variance spot value");
    m.close(green_massive_radial(nn2, ms, 1), 1.0 / 3.0, 1e-12,
            "neighbour distance-1 spot value");
    WalkWeights un2 = weights_uniform(g);
    m.close(covariance(un2, ms, 0, 0, boundary_none()), 5.0 / 8.0, 1e-12,
            "uniform variance spot value");
    m.close(covariance(un2, ms, 0, 1, boundary_none()), 1.0 / 8.0, 1e-12,
            "uniform off-diagonal spot value");
    MassSpec ms2 = mass_spec(1.0, 2.0);
    m.close(covariance(un2, ms2, 0, 1, boundary_none()),
            0.5 * covariance(un2, ms, 0, 1, boundary_none()), 1e-14,
            "doubling beta must halve the covariance");
    m.close(asym_coeff_nn(4, 1.0, 0), 0.5, 1e-12,
            "limit coefficient at distance zero is alpha");
    m.close(asym_coeff_nn(4, 1.0, 1), 1.0 / 14.0, 1e-12,
            "limit coefficient spot value");
    double alpha = 0.5;
    double gval = asym_coeff_binomial(6, 1.0, 0.4, 0);
    m.close(gval, alpha / (1.0 - alpha * std::pow(0.6, 6)), 1e-12,
            "binomial limit coefficient at distance zero is geometric");
    Rng rng(0x61737940u);
    for (int t = 0; t < 24; ++t) {
      int dd = 2 + static_cast<int>(rng.next_below(8));
      double mm = 0.3 + 1.7 * rng.next_double();
      double gg = 0.05 + 0.9 * rng.next_double();
      int rr = static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(dd + 1)));
      double v = asym_coeff_binomial(dd, mm, gg, rr);
      m.expect(v > 0.0 && v <= 1.0 / (mm * mm) + 1e-12,
               std::max(0.0, v - 1.0 / (mm * mm)),
               "binomial limit coefficient must respect the 1/m^2 bound");
    }
  }
  {  // limit diagnostics head toward 1
    GraphSpec g = make_graph(2, 2);
    WalkWeights ww = weights_nn(g);
    auto rows =
        limit_diagnostic_m_to_zero(ww, 1.0, 0, 1, {1e-1, 1e-2, 1e-3});
    for (std::size_t k = 1; k < rows.size(); ++k) {
      m.expect(std::abs(rows[k].scaled_cov - 1.0) <
                   std::abs(rows[k - 1].scaled_cov - 1.0),
               std::abs(rows[k].scaled_cov - 1.0),
               "scaled covariance must approach 1 as the mass vanishes");
      m.expect(rows[k].corr > rows[k - 1].corr, 0.0,
               "correlation must rise toward 1 as the mass vanishes");
    }
    m.close(rows.back().scaled_cov, 1.0, 1e-3,
            "scaled covariance at m = 1e-3");
    std::vector<int> dgrid =
        ctx.full() ? std::vector<int>{7, 14, 28} : std::vector<int>{4, 8};
    auto ld = limit_diagnostic_large_d(Model::NearestNeighbour, 2, 1.0, 1,
                                       dgrid);
    for (std::size_t k = 1; k < ld.size(); ++k) {
      m.expect(std::abs(ld[k].scaled_cov - 1.0) <
                   std::abs(ld[k - 1].scaled_cov - 1.0),
               std::abs(ld[k].scaled_cov - 1.0),
               "large-d scaling must approach 1 as d grows");
    }
  }
}

// ------------------------------------------------------------- massless --

void group_massless(const Ctx& ctx, Meter& m) {
  int dmax = ctx.full() ? 8 : 5;
  for (int d = 2; d <= dmax; ++d) {
    for (int n = 2; n <= 4; ++n) {
      GraphSpec g = make_graph(d, n);
      for (int r = 1; r <= d - 1; ++r) {
        WalkWeights wu = weights_uniform(g);
        double bsz = static_cast<double>(boundary_size(g, r));
        m.close(green_massless_origin(wu, r), (1.0 + bsz) / bsz, 0.0,
                "uniform massless origin value must be exact");
        WalkWeights wn = weights_nn(g);
        double series = hit_prob_nn_series(g, r);
        double lumped = green_massless_origin(wn, r);
        m.close(lumped, series, 1e-10 * std::max(1.0, series),
                "neighbour lumped solve must match the series");
        HitProbabilities hp = massless_hit_probabilities(wn, r);
        for (std::size_t k = 1; k < hp.p.size(); ++k) {
          m.expect(hp.p[k] >= hp.p[k - 1] - 1e-12,
                   std::max(0.0, hp.p[k - 1] - hp.p[k]),
                   "hitting probabilities must grow with distance");
        }
        m.expect(hp.p.front() > 0.0 && hp.p.back() <= 1.0 + 1e-12, 0.0,
                 "hitting probabilities must sit in (0,1]");
        if (g.vertex_count <= dense_cap()) {
          MassSpec ms0 = mass_spec(0.0, 1.0);
          GreenResult res =
              green_dense_oracle(wn, ms0, boundary_ball(g, r));
          m.close(res.values(0, 0), series, 1e-10 * std::max(1.0, series),
                  "dense massless origin entry must match the series");
        }
      }
    }
  }
  if (ctx.full()) {
    // past the dense cap: matrix-free solve at 65536 vertices
    GraphSpec g = make_graph(8, 4);
    WalkWeights wn = weights_nn(g);
    MassSpec ms0 = mass_spec(0.0, 1.0);
    for (int r : {4, 7}) {
      double got = green_origin_solve(wn, ms0, boundary_ball(g, r));
      double want = hit_prob_nn_series(g, r);
      m.close(got, want, 1e-10 * std::max(1.0, want),
              "matrix-free origin solve must match the series");
    }
  }
  // continuity at zero mass
  for (auto [d, n] : {std::pair<int, int>{3, 2}, {2, 3}}) {
    GraphSpec g = make_graph(d, n);
    for (const auto& ww : {weights_uniform(g), weights_nn(g)}) {
      MassSpec tiny = mass_spec(1e-6, 1.0);
      GreenResult res = green_dense_oracle(ww, tiny, boundary_ball(g, 1));
      m.close(res.values(0, 0), green_massless_origin(ww, 1), 1e-4,
              "boundary Green must be continuous at zero mass");
    }
  }
  {  // massless killed-walk spot check
    GraphSpec g = make_graph(2, 2);
    WalkWeights wu = weights_uniform(g);
    MassSpec ms0 = mass_spec(0.0, 1.0);
    auto [est, se] =
        green_mc_estimate(wu, ms0, boundary_ball(g, 1), 0, 0,
                          ctx.full() ? 100000 : 20000, 0x6d617373u);
    m.expect(std::abs(est - 2.0) <= 5.0 * std::max(se, 1e-12),
             std::abs(est - 2.0),
             "massless walk estimate must bracket the closed form");
  }
}

// ------------------------------------------------------------ partition --

void group_partition(const Ctx& ctx, Meter& m) {
  std::vector<double> masses = ctx.full()
                                   ? std::vector<double>{0.5, 1.0, 2.0}
                                   : std::vector<double>{1.0};
  for (int d : {2, 3}) {
    for (int n : {2, 3}) {
      GraphSpec g = make_graph(d, n);
      std::vector<WalkWeights> models = {
          weights_uniform(g), weights_nn(g), weights_binomial(g, 0.3),
          weights_binomial(g, 0.8)};
      for (const auto& ww : models) {
        for (double mm : masses) {
          MassSpec ms = mass_spec(mm, 1.0);
          double a = log_partition_spectral(ww, ms);
          double b = log_partition_dense_oracle(ww, ms, boundary_none());
          m.close(a, b, 1e-9 * std::max(1.0, std::abs(b)),
                  "spectral log Z must match the determinant oracle");
        }
      }
      // ball closed forms against the oracle, massive and massless
      WalkWeights wu = weights_uniform(g);
      for (int r = 1; r <= d - 1; ++r) {
        for (double mm : {0.0, 1.0}) {
          MassSpec ms = mass_spec(mm, 1.0);
          double a = log_partition_uniform_ball(wu, ms, r);
          double b = log_partition_dense_oracle(wu, ms, boundary_ball(g, r));
          m.close(a, b, 1e-9 * std::max(1.0, std::abs(b)),
                  "uniform ball closed form must match the oracle");
        }
      }
    }
  }
  {
    GraphSpec g = make_graph(2, 2);
    WalkWeights wu = weights_uniform(g);
    MassSpec ms = mass_spec(1.0, 1.0);
    m.close(log_partition_spectral(wu, ms),
            2.0 * std::log(kTwoPi) - 1.5 * std::log(2.0), 1e-12,
            "uniform full-graph log Z spot value");
    MassSpec msb = mass_spec(1.0, 1.0);
    m.close(log_partition_uniform_ball(wu, msb, 1), 1.9520966433969682,
            1e-12, "uniform massive ball log Z spot value");
    MassSpec ms0 = mass_spec(0.0, 1.0);
    m.close(log_partition_uniform_ball(wu, ms0, 1), 3.4499627801739634,
            1e-12, "uniform massless ball log Z spot value");
    for (double beta : {2.0, 4.0}) {
      MassSpec msc = mass_spec(1.0, beta);
      m.close(log_partition_spectral(wu, msc) - log_partition_spectral(wu, ms),
              -2.0 * std::log(beta), 1e-10,
              "beta scaling of log Z must be Gaussian");
    }
    GraphSpec g33 = make_graph(3, 3);
    m.close(internal_energy(g33, 2.0), 27.0 / 4.0, 1e-12,
            "internal energy spot value");
    // numeric beta-derivative of log Z against the closed form
    GraphSpec g23 = make_graph(2, 3);
    WalkWeights wn23 = weights_nn(g23);
    for (double beta : {1.0, 2.0}) {
      double h = 1e-5 * beta;
      double up = log_partition_spectral(wn23, mass_spec(1.0, beta + h));
      double dn = log_partition_spectral(wn23, mass_spec(1.0, beta - h));
      double deriv = -(up - dn) / (2.0 * h);
      double want = internal_energy(g23, beta);
      m.close(deriv, want, 1e-6 * want,
              "internal energy must be the beta derivative of log Z");
    }
    // zero-mass and large-mass corollaries as decreasing gaps
    double lim = log_mz_zero_mass_limit(wn23, 1.0);
    double prev = 1e300;
    for (double mm : {1e-2, 1e-3, 1e-4}) {
      MassSpec msm = mass_spec(mm, 1.0);
      double gap =
          std::abs(std::log(mm) + log_partition_spectral(wn23, msm) - lim);
      m.expect(gap < prev, gap, "m Z must converge as the mass vanishes");
      prev = gap;
    }
    prev = 1e300;
    double nv = static_cast<double>(g23.vertex_count);
    for (double mm : {10.0, 100.0, 1000.0}) {
      MassSpec msm = mass_spec(mm, 1.0);
      double gap = std::abs(log_partition_spectral(wn23, msm) -
                            0.5 * nv * std::log(kTwoPi / (mm * mm)));
      m.expect(gap < prev, gap,
               "log Z must approach the independent-spin form as m grows");
      prev = gap;
    }
  }
  {  // free energy limits
    m.close(free_energy_limit(Model::Uniform, 2, 1.0, 1.0,
                              LimitDirection::DToInf),
            0.5 * (std::log(2.0) - std::log(kTwoPi)), 1e-12,
            "uniform free energy limit spot value");
    m.close(free_energy_limit(Model::Binomial, 3, 1.0, 1.0,
                              LimitDirection::NToInf, 0.5),
            0.5 * (std::log(2.0 - 0.125) - std::log(kTwoPi)), 1e-12,
            "binomial n-limit spot value");
    double lim = free_energy_limit(Model::NearestNeighbour, 2, 1.0, 1.0,
                                   LimitDirection::DToInf);
    double prev = 1e300;
    for (int d : {4, 6, 8}) {
      GraphSpec g = make_graph(d, 2);
      WalkWeights ww = weights_nn(g);
      MassSpec ms = mass_spec(1.0, 1.0);
      double f = -log_partition_spectral(ww, ms) /
                 (ms.beta * static_cast<double>(g.vertex_count));
      double gap = std::abs(f - lim);
      m.expect(gap < prev, gap,
               "free energy per site must drift toward its limit");
      prev = gap;
    }
  }
  {  // character table determinants
    for (auto [d, n] : {std::pair<int, int>{2, 2}, {3, 2}, {2, 3}, {2, 4}}) {
      GraphSpec g = make_graph(d, n);
      CharDetCheck ck = char_table_det_check(g);
      m.close(ck.modulus, ck.expected, 1e-8 * ck.expected,
              "character determinant modulus must match the closed form");
    }
    m.close(char_table_det_modulus(1, 3), std::pow(3.0, 1.5),
            1e-8 * std::pow(3.0, 1.5),
            "cyclic character determinant must be the Vandermonde value");
  }
}

// -------------------------------------------------------------- sampler --

void group_sampler(const Ctx& ctx, Meter& m) {
  GraphSpec g22 = make_graph(2, 2);
  GraphSpec g23 = make_graph(2, 3);
  {  // determinism and realness
    WalkWeights ww = weights_nn(g22);
    MassSpec ms = mass_spec(1.0, 1.0);
    FieldSample a = sample_field(ww, ms, 0xfeedu);
    FieldSample b = sample_field(ww, ms, 0xfeedu);
    bool same = a.values == b.values;
    m.expect(same, same ? 0.0 : 1.0, "equal seeds must reproduce the field");
    m.close(a.imag_residue, 0.0, 1e-12,
            "pairing must cancel the imaginary part");
    FieldSample c = sample_field(ww, ms, 0xfeeeu);
    m.expect(a.values != c.values, 0.0,
             "distinct seeds must move the field");
  }
  {  // hamiltonian identities
    Rng rng(0x68616d00u);
    for (const GraphSpec& g : {g22, g23}) {
      for (const auto& ww :
           {weights_nn(g), weights_uniform(g), weights_binomial(g, 0.35)}) {
        MassSpec ms = mass_spec(1.0, 1.0);
        FieldSample f;
        f.params_walk = ww;
        f.params_mass = ms;
        f.values.resize(static_cast<std::size_t>(g.vertex_count));
        for (auto& v : f.values) v = rng.next_normal();
        double hp = hamiltonian(ww, ms, f, boundary_none());
        double hq = hamiltonian_quadratic(ww, ms, f, boundary_none());
        m.close(hp, hq, 1e-10 * std::max(1.0, std::abs(hq)),
                "difference form must equal the quadratic form");
        // vanish on a ball boundary, then the restricted identity holds too
        BoundarySpec b = boundary_ball(g, 1);
        for (Rank x = 0; x < g.vertex_count; ++x) {
          if (distance_from_origin(g, x) > 1) {
            f.values[static_cast<std::size_t>(x)] = 0.0;
          }
        }
        m.close(hamiltonian(ww, ms, f, b),
                hamiltonian_quadratic(ww, ms, f, b),
                1e-10 * std::max(1.0, std::abs(hq)),
                "restricted forms must agree on boundary-vanishing fields");
        std::fill(f.values.begin(), f.values.end(), 0.0);
        m.close(hamiltonian(ww, ms, f, boundary_none()), 0.0, 0.0,
                "zero field must have zero energy");
        std::fill(f.values.begin(), f.values.end(), 2.5);
        double want = ms.m * ms.m * static_cast<double>(g.vertex_count) *
                      2.5 * 2.5 / 2.0;
        m.close(hamiltonian(ww, ms, f, boundary_none()), want,
                1e-10 * want,
                "constant field energy must be the mass term alone");
      }
    }
  }
  {  // moment contracts
    std::int64_t count = ctx.full() ? 200000 : 20000;
    double band = ctx.full() ? 4.0 : 6.0;
    struct Cfg {
      GraphSpec g;
      Model model;
    };
    std::vector<Cfg> cfgs = {{g22, Model::NearestNeighbour},
                             {g23, Model::Uniform}};
    for (const auto& cfg : cfgs) {
      WalkWeights ww = model_weights(cfg.g, cfg.model, 0.5);
      MassSpec ms = mass_spec(1.0, 1.0);
      std::vector<std::pair<Rank, Rank>> probes = {
          {0, 0}, {0, 1}, {0, cfg.g.vertex_count - 1}};
      SampleStats st =
          accumulate_stats(ww, ms, count, 0x73616d70u, probes);
      for (const auto& ps : st.pairs) {
        double want = covariance(ww, ms, ps.a, ps.b, boundary_none());
        m.expect(std::abs(ps.mean_product - want) <= band * ps.se,
                 std::abs(ps.mean_product - want),
                 "probe covariance must bracket the analytic value");
      }
      double want_var = 1.0 / (static_cast<double>(cfg.g.vertex_count) *
                               ms.beta * ms.m * ms.m);
      m.expect(std::abs(field_mean_variance(st) - want_var) <=
                   band * field_mean_variance_se(st),
               std::abs(field_mean_variance(st) - want_var),
               "spatial mean variance must match the magnetisation law");
      double want_h = static_cast<double>(cfg.g.vertex_count) / 2.0;
      m.expect(std::abs(energy_mean(st) - want_h) <= band * energy_se(st),
               std::abs(energy_mean(st) - want_h),
               "mean energy must sit at equipartition");
      // standard errors must shrink like 1/sqrt(count)
      SampleStats half =
          accumulate_stats(ww, ms, count / 2, 0x73616d70u, probes);
      double ratio = half.pairs[0].se / st.pairs[0].se;
      m.expect(std::abs(ratio - std::sqrt(2.0)) <= 0.2 * std::sqrt(2.0),
               std::abs(ratio - std::sqrt(2.0)),
               "standard errors must scale with the root of the count");
      // merging two disjoint halves must reproduce the serial pass
      SampleStats first =
          accumulate_stats(ww, ms, count / 2, 0x73616d70u, probes);
      SampleStats rest = accumulate_stats(
          ww, ms, count - count / 2,
          0x73616d70u + 0x9e3779b97f4a7c15ULL *
                            static_cast<std::uint64_t>(count / 2),
          probes);
      SampleStats merged = merge_stats(first, rest);
      m.expect(merged.count == st.count, 0.0,
               "merged count must match the serial pass");
      m.close(merged.pairs[0].mean_product, st.pairs[0].mean_product,
              1e-12 * std::max(1.0, std::abs(st.pairs[0].mean_product)),
              "merged moments must match the serial pass");
    }
  }
  if (ctx.full()) {  // per-frequency amplitude law
    WalkWeights ww = weights_nn(g22);
    MassSpec ms = mass_spec(1.0, 1.0);
    Spectrum sp = eigenvalues(ww);
    const std::int64_t nv = g22.vertex_count;
    std::int64_t count = 100000;
    std::vector<double> sum2(static_cast<std::size_t>(nv), 0.0);
    std::vector<double> sum4(static_cast<std::size_t>(nv), 0.0);
    for (std::int64_t k = 0; k < count; ++k) {
      std::uint64_t sub = 0x616d7000u +
                          0x9e3779b97f4a7c15ULL *
                              (static_cast<std::uint64_t>(k) + 1);
      FieldSample fs = sample_field(ww, ms, sub);
      for (Rank y = 0; y < nv; ++y) {
        std::complex<double> acc(0.0, 0.0);
        for (Rank x = 0; x < nv; ++x) {
          acc += fs.values[static_cast<std::size_t>(x)] *
                 std::conj(character_phase(g22, x, y));
        }
        double p2 = std::norm(acc) / static_cast<double>(nv);
        sum2[static_cast<std::size_t>(y)] += p2;
        sum4[static_cast<std::size_t>(y)] += p2 * p2;
      }
    }
    for (Rank y = 0; y < nv; ++y) {
      int rho = distance_from_origin(g22, y);
      double want =
          1.0 / (ms.beta * (1.0 / ms.alpha -
                            sp.lambdas[static_cast<std::size_t>(rho)]));
      double mean = sum2[static_cast<std::size_t>(y)] /
                    static_cast<double>(count);
      double var = sum4[static_cast<std::size_t>(y)] /
                       static_cast<double>(count) -
                   mean * mean;
      double se = std::sqrt(std::max(var, 0.0) /
                            static_cast<double>(count));
      m.expect(std::abs(mean - want) <= 4.0 * se, std::abs(mean - want),
               "frequency amplitude variance must follow the eigenvalue");
    }
  }
}

// ----------------------------------------------------------- montecarlo --

void group_montecarlo(const Ctx& ctx, Meter& m) {
  int configs = ctx.full() ? 40 : 8;
  std::int64_t walks = ctx.full() ? 100000 : 20000;
  Rng rng(0x6d632d31u);
  int hits = 0;
  for (int t = 0; t < configs; ++t) {
    int d = 2 + static_cast<int>(rng.next_below(2));
    int n = 2 + static_cast<int>(rng.next_below(2));
    GraphSpec g = make_graph(d, n);
    int pick = static_cast<int>(rng.next_below(3));
    WalkWeights ww =
        pick == 0 ? weights_uniform(g)
                  : (pick == 1 ? weights_nn(g)
                               : weights_binomial(
                                     g, 0.2 + 0.6 * rng.next_double()));
    bool ball = rng.next_below(2) == 0;
    BoundarySpec b = ball ? boundary_ball(g, 1 + static_cast<int>(
                                                     rng.next_below(
                                                         static_cast<
                                                             std::uint64_t>(
                                                             d - 1))))
                          : boundary_none();
    double mm = (ball && rng.next_below(3) == 0)
                    ? 0.0
                    : 0.3 + 1.7 * rng.next_double();
    MassSpec ms = mass_spec(mm, 1.0);
    std::vector<Rank> pool;
    if (ball) {
      pool = retained_vertices(g, b);
    } else {
      for (Rank x = 0; x < g.vertex_count; ++x) pool.push_back(x);
    }
    Rank x = pool[rng.next_below(pool.size())];
    Rank y = pool[rng.next_below(pool.size())];
    if (rng.next_below(3) == 0) {
      x = 0;
      y = 0;
    }
    double exact;
    if (!b.is_ball) {
      exact = green_massive_radial(ww, ms, hamming_distance(g, x, y));
    } else {
      GreenResult res = green_dense_oracle(ww, ms, b);
      auto idx = [&](Rank v) {
        return static_cast<Eigen::Index>(
            std::lower_bound(res.vertices.begin(), res.vertices.end(), v) -
            res.vertices.begin());
      };
      exact = res.values(idx(x), idx(y));
    }
    auto [est, se] = green_mc_estimate(ww, ms, b, x, y, walks,
                                       0x6d632d32u + 7919ULL *
                                           static_cast<std::uint64_t>(t));
    double band = (ctx.full() ? 4.0 : 5.0) * std::max(se, 1e-12);
    if (std::abs(est - exact) <= band) ++hits;
    ++m.checks;
    m.max_err = std::max(
        m.max_err, std::abs(est - exact) / std::max(se, 1e-12));
  }
  double rate = static_cast<double>(hits) / static_cast<double>(configs);
  m.expect(rate >= 0.95, 1.0 - rate,
           "killed-walk estimates must bracket the exact Green values");
}

}  // namespace

VerifyReport run_verification_suite(VerifyLevel level,
                                    const FaultInjection& fault) {
  Ctx ctx{level, fault};
  VerifyReport rep;
  rep.groups.push_back(
      run_group("graph", [&](Meter& m) { group_graph(ctx, m); }));
  rep.groups.push_back(
      run_group("characters", [&](Meter& m) { group_characters(ctx, m); }));
  rep.groups.push_back(
      run_group("krawtchouk", [&](Meter& m) { group_krawtchouk(ctx, m); }));
  rep.groups.push_back(
      run_group("spectrum", [&](Meter& m) { group_spectrum(ctx, m); }));
  rep.groups.push_back(
      run_group("lumping", [&](Meter& m) { group_lumping(ctx, m); }));
  rep.groups.push_back(
      run_group("green", [&](Meter& m) { group_green(ctx, m); }));
  rep.groups.push_back(
      run_group("massless", [&](Meter& m) { group_massless(ctx, m); }));
  rep.groups.push_back(
      run_group("partition", [&](Meter& m) { group_partition(ctx, m); }));
  rep.groups.push_back(
      run_group("sampler", [&](Meter& m) { group_sampler(ctx, m); }));
  rep.groups.push_back(
      run_group("montecarlo", [&](Meter& m) { group_montecarlo(ctx, m); }));
  return rep;
}

}  // namespace hgff
