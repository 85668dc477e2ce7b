#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "hgff/graph.hpp"

namespace hgff {

// Krawtchouk polynomials of the Hamming scheme H(d,n), normalized so that
// K_i(0) = kappa_i:
//
//   K_i(j) = sum_l (-1)^l (n-1)^{i-l} C(j,l) C(d-j,i-l),
//   l in [max(0, i+j-d), min(i, j)],
//
// equivalently the coefficient of s^i in (1+(n-1)s)^{d-j} (1-s)^j.

struct KrawTable {
  int d = 0;
  int n = 0;
  std::vector<std::vector<double>> values;  // values[i][j] = K_i(j)
};

// Explicit-sum evaluation. Exact integer arithmetic whenever every term of
// the alternating sum stays below 2^62 (the figures are then promoted to
// double without rounding up to 2^53); beyond that, log-magnitude plus sign
// accumulation with compensated summation. The alternating signs make naive
// floating summation useless around d of a few dozen.
double kraw(const GraphSpec& g, int i, int j);

// (sign, log |K_i(j)|) with sign in {-1, 0, +1}. Works at any d; this is
// what large-d consumers combine with log kappa or log n^d. In the exact
// regime sign 0 means the value is exactly zero; in the log regime it means
// the alternating sum cancels below the accumulation noise floor, i.e. the
// value is zero at working precision relative to the largest term.
std::pair<int, double> kraw_signlog(const GraphSpec& g, int i, int j);

// Coefficients of s^0..s^d in (1+(n-1)s)^{d-j} (1-s)^j by exact 128-bit
// polynomial convolution. The anchor oracle for kraw.
std::vector<double> kraw_row_genfun(const GraphSpec& g, int j);

KrawTable kraw_table(const GraphSpec& g);

// sum_i f(i) K_i(rho(x)); equals the vertex sum sum_y zeta^{x.y} f(rho(y)).
std::complex<double> radial_fourier(const GraphSpec& g,
                                    const std::vector<std::complex<double>>& f,
                                    Rank x);

}  // namespace hgff
