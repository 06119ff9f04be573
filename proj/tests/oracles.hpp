#pragma once

// Independent reference implementations used only by the tests.  Group
// arithmetic is redone here from the factor list (mixed radix, first factor
// fastest) so nothing below shares code with the library's kernels.

#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_int;

struct Group {
  std::vector<uint64_t> n;

  uint64_t order() const {
    uint64_t o = 1;
    for (auto f : n) o *= f;
    return o;
  }
  std::vector<uint64_t> coords(uint64_t idx) const {
    std::vector<uint64_t> c(n.size());
    for (size_t i = 0; i < n.size(); ++i) {
      c[i] = idx % n[i];
      idx /= n[i];
    }
    return c;
  }
  uint64_t index(const std::vector<uint64_t>& c) const {
    uint64_t idx = 0;
    for (size_t i = n.size(); i-- > 0;) idx = idx * n[i] + c[i];
    return idx;
  }
  uint64_t add(uint64_t x, uint64_t y) const {
    auto a = coords(x), b = coords(y);
    for (size_t i = 0; i < n.size(); ++i) a[i] = (a[i] + b[i]) % n[i];
    return index(a);
  }
  uint64_t neg(uint64_t x) const {
    auto a = coords(x);
    for (size_t i = 0; i < n.size(); ++i) a[i] = (n[i] - a[i]) % n[i];
    return index(a);
  }
  uint64_t sub(uint64_t x, uint64_t y) const { return add(x, neg(y)); }
};

/// r(x) = #{(a, b) : a − b = x} by listing pairs.
inline std::vector<uint64_t> rep(const Group& g, const std::vector<uint64_t>& a) {
  std::vector<uint64_t> r(g.order(), 0);
  for (auto x : a)
    for (auto y : a) ++r[g.sub(x, y)];
  return r;
}

/// Number of ways to write each element as a sum of m elements of A (ordered).
inline std::vector<Big> sums(const Group& g, const std::vector<uint64_t>& a, unsigned m) {
  std::vector<Big> cur(g.order(), 0);
  cur[0] = 1;
  for (unsigned k = 0; k < m; ++k) {
    std::vector<Big> next(g.order(), 0);
    for (uint64_t y = 0; y < g.order(); ++y)
      if (cur[y] != 0)
        for (auto x : a) next[g.add(y, x)] += cur[y];
    cur.swap(next);
  }
  return cur;
}

/// E_{2m} = Σ_s (number of m-sums equal to s)^2.
inline Big energy(const Group& g, const std::vector<uint64_t>& a, unsigned order) {
  Big e = 0;
  for (const auto& c : sums(g, a, order / 2)) e += c * c;
  return e;
}

/// E_4 by explicit quadruple enumeration a + b = c + d.
inline uint64_t quadruples(const Group& g, const std::vector<uint64_t>& a) {
  uint64_t q = 0;
  for (auto x : a)
    for (auto y : a)
      for (auto z : a)
        for (auto w : a)
          if (g.add(x, y) == g.add(z, w)) ++q;
  return q;
}

/// 1̂_A(ξ) = |Z|^{-1} Σ_a e^{2πi <a, ξ>} by the direct character sum.
inline std::complex<long double> fourier(const Group& g, const std::vector<uint64_t>& a, uint64_t xi) {
  const auto c = g.coords(xi);
  std::complex<long double> s = 0;
  for (auto x : a) {
    const auto e = g.coords(x);
    long double phase = 0;
    for (size_t i = 0; i < g.n.size(); ++i)
      phase += static_cast<long double>(e[i] * c[i] % g.n[i]) / g.n[i];
    const long double t = 2 * std::numbers::pi_v<long double> * phase;
    s += std::complex<long double>(std::cos(t), std::sin(t));
  }
  return s / static_cast<long double>(g.order());
}

/// Δ[x] = Δ ∩ (x + Δ) as a membership mask over positions in Δ.
inline std::vector<char> fiber(const Group& g, const std::vector<uint64_t>& delta, uint64_t x) {
  std::vector<char> in(g.order(), 0);
  for (auto d : delta) in[d] = 1;
  std::vector<char> f(delta.size(), 0);
  for (size_t i = 0; i < delta.size(); ++i) f[i] = in[g.sub(delta[i], x)];
  return f;
}

/// |Δ[x] ∩ Δ[y]|.
inline uint64_t fiber_overlap(const Group& g, const std::vector<uint64_t>& delta, uint64_t x, uint64_t y) {
  const auto fx = fiber(g, delta, x), fy = fiber(g, delta, y);
  uint64_t c = 0;
  for (size_t i = 0; i < fx.size(); ++i) c += fx[i] && fy[i];
  return c;
}

/// Random subset of size m.
inline std::vector<uint64_t> random_subset(std::mt19937_64& rng, uint64_t order, uint64_t m) {
  std::vector<uint64_t> all(order);
  for (uint64_t i = 0; i < order; ++i) all[i] = i;
  for (uint64_t i = 0; i < m; ++i) std::swap(all[i], all[i + rng() % (order - i)]);
  all.resize(m);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace oracle
