#include "hgff/krawtchouk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hgff {

namespace {

void check_indices(const GraphSpec& g, int i, int j) {
  if (i < 0 || i > g.d || j < 0 || j > g.d) {
    throw DomainError("kraw: indices (" + std::to_string(i) + "," +
                      std::to_string(j) + ") outside [0," +
                      std::to_string(g.d) + "]");
  }
}

double log_binom(int a, int b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

// Largest log2 magnitude of any term of the alternating sum. Terms are
// bounded by kappa_i, so this decides whether 128-bit accumulation of
// sub-2^62 terms is safe.
double max_term_log2(const GraphSpec& g, int i, int j) {
  const double ln2 = std::log(2.0);
  double best = -1.0;
  const int lo = std::max(0, i + j - g.d);
  const int hi = std::min(i, j);
  for (int l = lo; l <= hi; ++l) {
    double lg = (log_binom(j, l) + log_binom(g.d - j, i - l) +
                 (i - l) * std::log(g.n - 1.0)) /
                ln2;
    best = std::max(best, lg);
  }
  return best;
}

__int128 binom128(int a, int b) {
  __int128 v = 1;
  for (int k = 1; k <= b; ++k) v = v * (a - k + 1) / k;
  return v;
}

}  // namespace

std::pair<int, double> kraw_signlog(const GraphSpec& g, int i, int j) {
  check_indices(g, i, j);
  const int lo = std::max(0, i + j - g.d);
  const int hi = std::min(i, j);

  if (max_term_log2(g, i, j) < 61.5) {
    __int128 acc = 0;
    for (int l = lo; l <= hi; ++l) {
      __int128 term = binom128(j, l) * binom128(g.d - j, i - l);
      for (int k = 0; k < i - l; ++k) term *= g.n - 1;
      acc += (l % 2 == 0) ? term : -term;
    }
    if (acc == 0) return {0, -std::numeric_limits<double>::infinity()};
    const int sign = acc > 0 ? 1 : -1;
    const __int128 mag = acc > 0 ? acc : -acc;
    return {sign, std::log(static_cast<double>(static_cast<long double>(mag)))};
  }

  // Log-space path: pull out the largest term, Kahan-sum the signed ratios.
  double mx = -std::numeric_limits<double>::infinity();
  for (int l = lo; l <= hi; ++l) {
    double lg = log_binom(j, l) + log_binom(g.d - j, i - l) +
                (i - l) * std::log(g.n - 1.0);
    mx = std::max(mx, lg);
  }
  double sum = 0.0, comp = 0.0;
  for (int l = lo; l <= hi; ++l) {
    double lg = log_binom(j, l) + log_binom(g.d - j, i - l) +
                (i - l) * std::log(g.n - 1.0);
    double t = std::exp(lg - mx);
    if (l % 2 != 0) t = -t;
    double y = t - comp;
    double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  // Exact cancellations (n = 2 has structural zeros) leave rounding noise;
  // each term carries a relative error of a few ulps of the lgamma values
  // that built its logarithm, so the floor scales with lgamma(d+1). Below
  // it the sign would be meaningless.
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(hi - lo + 1) *
                       std::max(1.0, std::lgamma(g.d + 1.0));
  if (std::abs(sum) <= floor) {
    return {0, -std::numeric_limits<double>::infinity()};
  }
  const int sign = sum > 0 ? 1 : -1;
  return {sign, mx + std::log(std::abs(sum))};
}

double kraw(const GraphSpec& g, int i, int j) {
  check_indices(g, i, j);
  const int lo = std::max(0, i + j - g.d);
  const int hi = std::min(i, j);
  if (max_term_log2(g, i, j) < 61.5) {
    __int128 acc = 0;
    for (int l = lo; l <= hi; ++l) {
      __int128 term = binom128(j, l) * binom128(g.d - j, i - l);
      for (int k = 0; k < i - l; ++k) term *= g.n - 1;
      acc += (l % 2 == 0) ? term : -term;
    }
    return static_cast<double>(static_cast<long double>(acc));
  }
  auto [sign, lg] = kraw_signlog(g, i, j);
  return sign * std::exp(lg);
}

std::vector<double> kraw_row_genfun(const GraphSpec& g, int j) {
  if (j < 0 || j > g.d) {
    throw DomainError("kraw_row_genfun: j outside [0,d]");
  }
  // Coefficient magnitudes are bounded by kappa_i <= max_i C(d,i)(n-1)^i;
  // insist on staying inside the exact 128-bit range.
  double worst = 0.0;
  for (int i = 0; i <= g.d; ++i) {
    worst = std::max(worst, log_sphere_size(g.d, g.n, i) / std::log(2.0));
  }
  if (worst >= 120.0) {
    throw CapacityError("kraw_row_genfun: coefficients exceed exact range");
  }

  std::vector<__int128> coef(g.d + 1, 0);
  coef[0] = 1;
  // multiply by (1+(n-1)s) d-j times
  for (int rep = 0; rep < g.d - j; ++rep) {
    for (int k = g.d; k >= 1; --k) coef[k] += coef[k - 1] * (g.n - 1);
  }
  // multiply by (1-s) j times
  for (int rep = 0; rep < j; ++rep) {
    for (int k = g.d; k >= 1; --k) coef[k] -= coef[k - 1];
  }
  std::vector<double> out(g.d + 1);
  for (int k = 0; k <= g.d; ++k) {
    out[k] = static_cast<double>(static_cast<long double>(coef[k]));
  }
  return out;
}

KrawTable kraw_table(const GraphSpec& g) {
  KrawTable t;
  t.d = g.d;
  t.n = g.n;
  t.values.assign(g.d + 1, std::vector<double>(g.d + 1, 0.0));
  for (int i = 0; i <= g.d; ++i) {
    for (int j = 0; j <= g.d; ++j) t.values[i][j] = kraw(g, i, j);
  }
  return t;
}

std::complex<double> radial_fourier(const GraphSpec& g,
                                    const std::vector<std::complex<double>>& f,
                                    Rank x) {
  if (static_cast<int>(f.size()) != g.d + 1) {
    throw DomainError("radial_fourier: f must have d+1 entries");
  }
  const int rho = distance_from_origin(g, x);
  std::complex<double> acc = 0.0;
  for (int i = 0; i <= g.d; ++i) acc += f[i] * kraw(g, i, rho);
  return acc;
}

}  // namespace hgff
