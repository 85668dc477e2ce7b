#include "hgff/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hgff {

namespace {

constexpr std::int64_t kInt64Guard = std::int64_t{1} << 62;

// a*b if the product stays below 2^62, else -1.
std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  __int128 p = static_cast<__int128>(a) * b;
  if (p >= static_cast<__int128>(kInt64Guard)) return -1;
  return static_cast<std::int64_t>(p);
}

}  // namespace

GraphSpec make_graph(int d, int n) {
  if (d < 2 || n < 2) {
    throw DomainError("make_graph: need d >= 2 and n >= 2, got d=" +
                      std::to_string(d) + " n=" + std::to_string(n));
  }
  GraphSpec g;
  g.d = d;
  g.n = n;
  g.vertex_count = 1;
  for (int k = 0; k < d && g.vertex_count > 0; ++k) {
    g.vertex_count = checked_mul(g.vertex_count, n);
  }
  g.log_vertex_count = d * std::log(static_cast<double>(n));
  return g;
}

std::vector<int> rank_digits(const GraphSpec& g, Rank x) {
  if (x < 0 || (g.count_exact() && x >= g.vertex_count)) {
    throw DomainError("rank_digits: rank " + std::to_string(x) +
                      " outside [0, n^d)");
  }
  std::vector<int> out(g.d);
  for (int k = 0; k < g.d; ++k) {
    out[k] = static_cast<int>(x % g.n);
    x /= g.n;
  }
  return out;
}

Rank digits_rank(const GraphSpec& g, const std::vector<int>& digits) {
  if (static_cast<int>(digits.size()) != g.d) {
    throw DomainError("digits_rank: expected d digits");
  }
  Rank x = 0;
  for (int k = g.d - 1; k >= 0; --k) {
    if (digits[k] < 0 || digits[k] >= g.n) {
      throw DomainError("digits_rank: digit outside [0, n)");
    }
    x = x * g.n + digits[k];
  }
  return x;
}

int hamming_distance(const GraphSpec& g, Rank x, Rank y) {
  int dist = 0;
  for (int k = 0; k < g.d; ++k) {
    if (x % g.n != y % g.n) ++dist;
    x /= g.n;
    y /= g.n;
  }
  return dist;
}

int distance_from_origin(const GraphSpec& g, Rank x) {
  int dist = 0;
  for (int k = 0; k < g.d; ++k) {
    if (x % g.n != 0) ++dist;
    x /= g.n;
  }
  return dist;
}

std::int64_t sphere_size(const GraphSpec& g, int i) {
  if (i < 0 || i > g.d) {
    throw DomainError("sphere_size: radius " + std::to_string(i) +
                      " outside [0," + std::to_string(g.d) + "]");
  }
  // C(d,i) by the multiplicative recurrence, then (n-1)^i, all guarded.
  std::int64_t binom = 1;
  for (int k = 1; k <= i; ++k) {
    __int128 next = static_cast<__int128>(binom) * (g.d - k + 1) / k;
    if (next >= static_cast<__int128>(kInt64Guard)) {
      throw CapacityError("sphere_size: kappa exceeds the exact range");
    }
    binom = static_cast<std::int64_t>(next);
  }
  std::int64_t value = binom;
  for (int k = 0; k < i; ++k) {
    value = checked_mul(value, g.n - 1);
    if (value < 0) {
      throw CapacityError("sphere_size: kappa exceeds the exact range");
    }
  }
  return value;
}

double log_sphere_size(int d, int n, int i) {
  return std::lgamma(d + 1.0) - std::lgamma(i + 1.0) -
         std::lgamma(d - i + 1.0) + i * std::log(n - 1.0);
}

BoundarySpec boundary_none() { return BoundarySpec{false, 0}; }

BoundarySpec boundary_ball(const GraphSpec& g, int r) {
  if (r < 1 || r > g.d - 1) {
    throw DomainError("boundary_ball: need 1 <= r <= d-1, got r=" +
                      std::to_string(r));
  }
  return BoundarySpec{true, r};
}

std::int64_t boundary_size(const GraphSpec& g, int r) {
  if (r < 1 || r > g.d - 1) {
    throw DomainError("boundary_size: need 1 <= r <= d-1, got r=" +
                      std::to_string(r));
  }
  std::int64_t total = 0;
  for (int i = r + 1; i <= g.d; ++i) {
    std::int64_t k = sphere_size(g, i);
    if (total > kInt64Guard - k) {
      throw CapacityError("boundary_size: exceeds the exact range");
    }
    total += k;
  }
  return total;
}

std::int64_t retained_count(const GraphSpec& g, const BoundarySpec& b) {
  if (!g.count_exact()) {
    throw CapacityError("retained_count: vertex count exceeds int64");
  }
  if (!b.is_ball) return g.vertex_count;
  return g.vertex_count - boundary_size(g, b.r);
}

std::complex<double> character_phase(const GraphSpec& g, Rank x, Rank y) {
  std::int64_t dot = 0;
  for (int k = 0; k < g.d; ++k) {
    dot = (dot + (x % g.n) * (y % g.n)) % g.n;
    x /= g.n;
    y /= g.n;
  }
  const int e = static_cast<int>(dot);
  // Quarter turns come out exact; everything else goes through polar().
  if (4 * e % g.n == 0) {
    switch (4 * e / g.n) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, -1.0};
      default: break;
    }
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * e / g.n);
}

std::vector<Rank> enumerate_sphere(const GraphSpec& g, Rank center, int i) {
  if (i < 0 || i > g.d) {
    throw DomainError("enumerate_sphere: radius outside [0,d]");
  }
  std::int64_t size = sphere_size(g, i);
  if (size > (std::int64_t{1} << 26)) {
    throw CapacityError("enumerate_sphere: sphere too large to materialize");
  }
  std::vector<Rank> out;
  out.reserve(static_cast<std::size_t>(size));
  const std::vector<int> cdig = rank_digits(g, center);

  // Current combination of coordinate positions, lexicographically advanced,
  // with an odometer over the (n-1)^i nonzero digit offsets per combination.
  std::vector<int> pos(i);
  for (int k = 0; k < i; ++k) pos[k] = k;
  std::vector<int> work = cdig;
  bool more = i <= g.d;
  while (more) {
    std::vector<int> offs(i, 1);  // each in [1, n-1]
    while (true) {
      for (int k = 0; k < i; ++k) {
        work[pos[k]] = (cdig[pos[k]] + offs[k]) % g.n;
      }
      out.push_back(digits_rank(g, work));
      int k = 0;
      while (k < i && offs[k] == g.n - 1) {
        offs[k] = 1;
        ++k;
      }
      if (k == i) break;
      ++offs[k];
    }
    for (int k = 0; k < i; ++k) work[pos[k]] = cdig[pos[k]];
    // next combination
    int k = i - 1;
    while (k >= 0 && pos[k] == g.d - i + k) --k;
    if (k < 0) {
      more = false;
    } else {
      ++pos[k];
      for (int t = k + 1; t < i; ++t) pos[t] = pos[t - 1] + 1;
    }
    if (i == 0) more = false;  // single empty combination
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hgff
