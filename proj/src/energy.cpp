#include "nonsmooth/energy.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <omp.h>

#include "nonsmooth/config.hpp"

namespace nonsmooth {
namespace {

// Exact sum of many u128 terms without a 256-bit add per term.
class ExactAccumulator {
 public:
  void add(u128 v) {
    u128 t;
    if (__builtin_add_overflow(acc_, v, &t)) {
      big_ += to_exact(acc_);
      acc_ = v;
    } else {
      acc_ = t;
    }
  }
  void merge(const ExactAccumulator& other) {
    big_ += other.big_;
    add(other.acc_);
  }
  Exact value() const { return big_ + to_exact(acc_); }

 private:
  u128 acc_ = 0;
  Exact big_ = 0;
};

unsigned log2_exact(uint64_t n) { return static_cast<unsigned>(std::countr_zero(n)); }

void check_order(unsigned order) {
  if (order < 2 || order > 2 * kDefaultMaxFold || order % 2 != 0)
    throw std::invalid_argument("energy order must be one of 2, 4, 6, 8; got " + std::to_string(order));
}

template <typename T>
void wht(std::span<T> data) {
  const uint64_t n = data.size();
  const int nt = threads();
  for (uint64_t h = 1; h < n; h <<= 1) {
    const int64_t pairs = static_cast<int64_t>(n / 2);
#pragma omp parallel for schedule(static) num_threads(nt) if (n >= (1u << 14))
    for (int64_t p = 0; p < pairs; ++p) {
      const uint64_t i = (static_cast<uint64_t>(p) / h) * 2 * h + static_cast<uint64_t>(p) % h;
      const T x = data[i];
      const T y = data[i + h];
      data[i] = x + y;
      data[i + h] = x - y;
    }
  }
}

std::vector<int64_t> walsh_of(const GroupSet& a) {
  std::vector<int64_t> w(a.spec().order(), 0);
  for (uint64_t i : a) w[i] = 1;
  wht<int64_t>(w);
  return w;
}

// Fold g by A: out(x) = sum_{a in A} g(x - a).
std::vector<uint64_t> fold(const GroupSpec& spec, const std::vector<uint64_t>& g, const GroupSet& a) {
  const uint64_t n = spec.order();
  std::vector<uint64_t> support;
  for (uint64_t y = 0; y < n; ++y)
    if (g[y]) support.push_back(y);
  const double per_op = spec.elementary_two() ? 1.0 : 2.0 + spec.rank();
  const double sparse_cost = static_cast<double>(support.size()) * a.size() * per_op;
  const double dense_cost = static_cast<double>(a.size()) * n;
  const int nt = std::max(1, std::min<int>(threads(), static_cast<int>(std::max<uint64_t>(1, (uint64_t{1} << 27) / n))));

  std::vector<std::vector<uint64_t>> partial(nt, std::vector<uint64_t>());
#pragma omp parallel num_threads(nt)
  {
    const int t = omp_get_thread_num();
    const int team = omp_get_num_threads();
    std::vector<uint64_t>& out = partial[t];
    out.assign(n, 0);
    if (sparse_cost < dense_cost) {
      for (size_t s = t; s < support.size(); s += team) {
        const uint64_t y = support[s];
        const uint64_t v = g[y];
        for (uint64_t e : a) out[spec.add(y, e)] += v;
      }
    } else {
      for (size_t i = t; i < a.size(); i += team)
        spec.accumulate_shifted<uint64_t>(g, out, a[i]);
    }
  }
  std::vector<uint64_t> out = std::move(partial[0]);
  for (int t = 1; t < nt; ++t)
    if (!partial[t].empty())
      for (uint64_t x = 0; x < n; ++x) out[x] += partial[t][x];
  return out;
}

bool prefer_walsh(const GroupSpec& spec, double other_cost, ExactKernel kernel) {
  if (kernel == ExactKernel::walsh) {
    if (!spec.elementary_two()) throw std::invalid_argument("walsh kernel needs a group of the form Z2^n");
    return true;
  }
  if (kernel == ExactKernel::convolution || !spec.elementary_two()) return false;
  const double n = static_cast<double>(spec.order());
  return 3.0 * n * std::max(1.0, std::log2(n)) < other_cost;
}

// Largest possible value of g_m: M^{m-1}; throws if it cannot fit 64 bits.
void precheck_fold_bound(uint64_t size, unsigned m) {
  u128 bound = 1;
  for (unsigned i = 1; i < m; ++i) {
    if (__builtin_mul_overflow(bound, static_cast<u128>(size), &bound) || bound > UINT64_MAX)
      throw OverflowError("sum_count: counts up to M^(m-1) would exceed 64 bits (M=" + std::to_string(size) +
                          ", m=" + std::to_string(m) + ")");
  }
}

}  // namespace

namespace detail {
void walsh_hadamard(std::span<int64_t> data) { wht<int64_t>(data); }
void walsh_hadamard_wrapping(std::span<u128> data) { wht<u128>(data); }
}  // namespace detail

Exact CountVector::total() const {
  ExactAccumulator acc;
  for (uint64_t v : counts) acc.add(v);
  return acc.value();
}

Exact CountVector::sum_squares() const {
  const int nt = threads();
  std::vector<ExactAccumulator> partial(nt);
  const int64_t n = static_cast<int64_t>(counts.size());
#pragma omp parallel num_threads(nt)
  {
    ExactAccumulator& acc = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
      const u128 v = counts[i];
      acc.add(v * v);
    }
  }
  ExactAccumulator total;
  for (const auto& p : partial) total.merge(p);
  return total.value();
}

size_t CountVector::support_size() const {
  return static_cast<size_t>(std::count_if(counts.begin(), counts.end(), [](uint64_t v) { return v != 0; }));
}

std::string to_string(EnergyMethod m) {
  switch (m) {
    case EnergyMethod::exact: return "exact";
    case EnergyMethod::spectral: return "spectral";
    case EnergyMethod::brute: return "brute";
  }
  return "?";
}

EnergyMethod parse_energy_method(const std::string& s) {
  if (s == "exact") return EnergyMethod::exact;
  if (s == "spectral") return EnergyMethod::spectral;
  if (s == "brute") return EnergyMethod::brute;
  throw std::invalid_argument("unknown energy method '" + s + "' (exact|spectral|brute)");
}

std::string to_string(ExactKernel k) {
  switch (k) {
    case ExactKernel::automatic: return "auto";
    case ExactKernel::convolution: return "convolution";
    case ExactKernel::walsh: return "walsh";
  }
  return "?";
}

ExactKernel parse_exact_kernel(const std::string& s) {
  if (s == "auto") return ExactKernel::automatic;
  if (s == "convolution") return ExactKernel::convolution;
  if (s == "walsh") return ExactKernel::walsh;
  throw std::invalid_argument("unknown exact kernel '" + s + "' (auto|convolution|walsh)");
}

CountVector convolve_sets(const GroupSet& b, const GroupSet& c, ExactKernel kernel) {
  require_same(b.spec(), c.spec(), "convolve_sets");
  const GroupSpec& spec = b.spec();
  require_dense(spec.order(), "convolve_sets");
  const uint64_t n = spec.order();
  const double per_op = spec.elementary_two() ? 1.0 : 2.0 + spec.rank();
  const double pair_cost = static_cast<double>(b.size()) * c.size() * per_op;
  const double dense_cost = static_cast<double>(std::min(b.size(), c.size())) * n;

  CountVector out{spec, {}};
  if (prefer_walsh(spec, std::min(pair_cost, dense_cost), kernel)) {
    const auto wb = walsh_of(b);
    const auto wc = walsh_of(c);
    // n * (1_B * 1_C)(x) < 2^64, so wrapping arithmetic mod 2^64 is exact.
    std::vector<uint64_t> prod(n);
    for (uint64_t i = 0; i < n; ++i) prod[i] = static_cast<uint64_t>(wb[i] * wc[i]);
    wht<uint64_t>(prod);
    const unsigned shift = log2_exact(n);
    out.counts.resize(n);
    for (uint64_t i = 0; i < n; ++i) out.counts[i] = prod[i] >> shift;
    return out;
  }
  if (kernel == ExactKernel::convolution || pair_cost >= dense_cost) {
    const GroupSet& big = b.size() >= c.size() ? b : c;
    const GroupSet& small = b.size() >= c.size() ? c : b;
    std::vector<uint64_t> ind(n, 0);
    for (uint64_t i : big) ind[i] = 1;
    out.counts = fold(spec, ind, small);
    return out;
  }
  out.counts.assign(n, 0);
  const int nt = threads();
  const int64_t nb = static_cast<int64_t>(b.size());
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int64_t i = 0; i < nb; ++i) {
    const uint64_t x = b[i];
    for (uint64_t y : c) std::atomic_ref<uint64_t>(out.counts[spec.add(x, y)]).fetch_add(1, std::memory_order_relaxed);
  }
  return out;
}

CountVector rep_function(const GroupSet& a, ExactKernel kernel) { return convolve_sets(a, a.negated(), kernel); }

CountVector sum_count(const GroupSet& a, unsigned m, ExactKernel kernel, unsigned max_fold) {
  if (m < 1 || m > max_fold)
    throw std::invalid_argument("sum_count: m must be in [1, " + std::to_string(max_fold) + "]");
  const GroupSpec& spec = a.spec();
  require_dense(spec.order(), "sum_count");
  precheck_fold_bound(a.size(), m);
  const uint64_t n = spec.order();
  CountVector out{spec, std::vector<uint64_t>(n, 0)};
  for (uint64_t i : a) out.counts[i] = 1;
  if (m == 1) return out;

  const double fold_cost = static_cast<double>(m - 1) * a.size() * n;
  if (prefer_walsh(spec, fold_cost, kernel)) {
    const auto w = walsh_of(a);
    // n * g_m(x) <= n M^{m-1} < 2^128, so arithmetic mod 2^128 recovers it exactly.
    std::vector<u128> p(n);
    for (uint64_t i = 0; i < n; ++i) {
      u128 v = 1;
      const u128 base = static_cast<u128>(static_cast<__int128>(w[i]));
      for (unsigned k = 0; k < m; ++k) v *= base;
      p[i] = v;
    }
    wht<u128>(p);
    const unsigned shift = log2_exact(n);
    for (uint64_t i = 0; i < n; ++i) {
      const u128 g = p[i] >> shift;
      if (g > UINT64_MAX) throw OverflowError("sum_count: count exceeds 64 bits");
      out.counts[i] = static_cast<uint64_t>(g);
    }
    return out;
  }
  for (unsigned k = 1; k < m; ++k) out.counts = fold(spec, out.counts, a);
  return out;
}

Exact energy_exact(const GroupSet& a, unsigned order, ExactKernel kernel) {
  check_order(order);
  const unsigned m = order / 2;
  const GroupSpec& spec = a.spec();
  require_dense(spec.order(), "energy");
  if (a.empty()) return 0;
  const uint64_t n = spec.order();
  const double fold_cost = static_cast<double>(m > 1 ? m - 1 : 1) * a.size() * n;
  if (prefer_walsh(spec, fold_cost, kernel)) {
    const auto w = walsh_of(a);
    // Histogram of |W(xi)|, then sum_w count(w) w^{2m} / n.
    std::vector<uint64_t> hist(a.size() + 1, 0);
    for (int64_t v : w) ++hist[static_cast<uint64_t>(v < 0 ? -v : v)];
    Exact total = 0;
    for (uint64_t v = 1; v < hist.size(); ++v) {
      if (!hist[v]) continue;
      Exact p = 1;
      for (unsigned k = 0; k < order; ++k) p *= v;
      total += p * hist[v];
    }
    if (total % n != 0) throw std::logic_error("walsh energy: sum not divisible by |Z|");
    return total / n;
  }
  return sum_count(a, m, ExactKernel::convolution).sum_squares();
}

Exact energy_brute(const GroupSet& a, unsigned order, uint64_t tuple_budget) {
  check_order(order);
  const unsigned m = order / 2;
  const GroupSpec& spec = a.spec();
  const size_t k = spec.rank();
  u128 tuples = 1;
  for (unsigned i = 0; i < m; ++i) {
    tuples *= a.size();
    if (tuples > tuple_budget)
      throw BudgetExceeded("brute force refused: M^" + std::to_string(m) + " tuples exceed budget " +
                           std::to_string(tuple_budget));
  }
  if (a.empty()) return 0;
  // Coordinates of every member; sums are formed coordinate-wise.
  std::vector<uint64_t> coords;
  coords.reserve(a.size() * k);
  for (uint64_t i : a) {
    const auto e = spec.element(i);
    coords.insert(coords.end(), e.coords.begin(), e.coords.end());
  }
  const auto& n = spec.factors();
  std::unordered_map<uint64_t, uint64_t> sums;
  sums.reserve(static_cast<size_t>(std::min<u128>(tuples, uint64_t{1} << 24)));
  std::vector<uint64_t> partial((m + 1) * k, 0);
  std::vector<size_t> pick(m, 0);
  // Odometer over m-tuples; level l holds the sum of the first l picks.
  size_t level = 0;
  while (true) {
    if (level == m) {
      uint64_t key = 0, mult = 1;
      for (size_t i = 0; i < k; ++i) {
        key += partial[m * k + i] * mult;
        mult *= n[i];
      }
      ++sums[key];
      --level;
      ++pick[level];
      continue;
    }
    if (pick[level] == a.size()) {
      if (level == 0) break;
      pick[level] = 0;
      --level;
      ++pick[level];
      continue;
    }
    const uint64_t* c = &coords[pick[level] * k];
    for (size_t i = 0; i < k; ++i) {
      uint64_t s = partial[level * k + i] + c[i];
      if (s >= n[i]) s -= n[i];
      partial[(level + 1) * k + i] = s;
    }
    ++level;
  }
  Exact total = 0;
  for (const auto& [key, cnt] : sums) total += Exact(cnt) * cnt;
  return total;
}

EnergyResult energy(const GroupSet& a, unsigned order, EnergyMethod method, ExactKernel kernel,
                    uint64_t tuple_budget) {
  EnergyResult r;
  r.order = order;
  r.method = method;
  switch (method) {
    case EnergyMethod::exact: r.value = energy_exact(a, order, kernel); break;
    case EnergyMethod::brute: r.value = energy_brute(a, order, tuple_budget); break;
    case EnergyMethod::spectral: {
      r.spectral = energy_spectral(a, order);
      if (r.spectral->rounded) {
        r.value = *r.spectral->rounded;
      } else {
        // Outside exact double range: report the integer part of the estimate.
        std::ostringstream digits;
        digits.precision(0);
        digits << std::fixed << std::floor(r.spectral->value);
        r.value = Exact(digits.str());
      }
      break;
    }
  }
  return r;
}

HolderReport holder_check(uint64_t size, const Exact& e4, const Exact& e8) {
  if (size < 1) throw std::invalid_argument("holder_check: empty set");
  HolderReport h;
  h.size = size;
  h.e4 = e4;
  h.e8 = e8;
  const BigInt m = size;
  const BigInt b4 = to_big(e4);
  const BigInt b8 = to_big(e8);
  h.lower_numerator = b4 * b4 * b4;
  h.lower_denominator = m * m;
  h.upper = m * m * m * m * b4;
  const BigInt scaled = b8 * h.lower_denominator;
  h.lower_equality = scaled == h.lower_numerator;
  h.pass = h.lower_numerator <= scaled && b8 <= h.upper;
  return h;
}

HolderReport holder_check(const GroupSet& a, ExactKernel kernel) {
  return holder_check(a.size(), energy_exact(a, 4, kernel), energy_exact(a, 8, kernel));
}

double smoothing_exponent(uint64_t size, const Exact& e4, const Exact& e8) {
  if (size < 2) throw std::invalid_argument("smoothing_exponent: need |A| >= 2");
  const long double lm = std::log(static_cast<long double>(size));
  return static_cast<double>((log_exact(e8) - 3 * log_exact(e4) + 2 * lm) / lm);
}

double smoothing_exponent(const GroupSet& a, ExactKernel kernel) {
  return smoothing_exponent(a.size(), energy_exact(a, 4, kernel), energy_exact(a, 8, kernel));
}

AsymEnergy asym_energy(const GroupSet& b, const GroupSet& c, ExactKernel kernel) {
  require_same(b.spec(), c.spec(), "asym_energy");
  AsymEnergy e;
  e.difference_form = convolve_sets(b, c.negated(), kernel).sum_squares();
  e.sum_form = convolve_sets(b, c, kernel).sum_squares();
  return e;
}

uint64_t popularity(uint64_t a, const GroupSet& set) {
  const GroupSpec& spec = set.spec();
  if (a >= spec.order()) throw std::out_of_range("popularity: element outside group");
  uint64_t total = 0;
  if (spec.order() <= dense_cap()) {
    const CountVector r = rep_function(set);
    for (uint64_t b : set) total += r[spec.sub(a, b)];
    return total;
  }
  std::unordered_map<uint64_t, uint64_t> diff;
  for (uint64_t c : set)
    for (uint64_t d : set) ++diff[spec.sub(c, d)];
  for (uint64_t b : set) {
    auto it = diff.find(spec.sub(a, b));
    if (it != diff.end()) total += it->second;
  }
  return total;
}

std::vector<uint64_t> popularity_all(const GroupSet& set, const CountVector& rep) {
  const GroupSpec& spec = set.spec();
  std::vector<uint64_t> out(set.size(), 0);
  const int nt = threads();
  const int64_t m = static_cast<int64_t>(set.size());
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int64_t i = 0; i < m; ++i) {
    uint64_t total = 0;
    const uint64_t a = set[i];
    for (uint64_t b : set) total += rep[spec.sub(a, b)];
    out[i] = total;
  }
  return out;
}

}  // namespace nonsmooth
