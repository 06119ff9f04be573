#include "nonsmooth/structure.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>

#include <omp.h>

#include "nonsmooth/config.hpp"

namespace nonsmooth {

BaseAnalysis analyze_base(const GroupSet& delta, ExactKernel kernel) {
  if (delta.size() < 2) throw std::invalid_argument("structure analysis needs |Δ| >= 2");
  BaseAnalysis b{delta, rep_function(delta, kernel), 0, 0};
  b.e4 = b.r.sum_squares();
  b.tau = b.exponent(b.e4) - 2.0;
  return b;
}

AdditiveStructure make_structure(const BaseAnalysis& base, std::vector<uint64_t> d, uint64_t bucket_lo) {
  AdditiveStructure s;
  s.base = base.delta;
  s.D = GroupSet(base.delta.spec(), std::move(d));
  s.bucket_lo = bucket_lo;
  s.tau = base.tau;
  u128 size = 0, energy = 0;
  for (uint64_t x : s.D) {
    const u128 v = base.r[x];
    size += v;
    energy += v * v;
  }
  s.graph_size = to_exact(size);
  s.graph_energy = to_exact(energy);
  s.height = size ? 2.0 - base.exponent(s.graph_size) : 2.0;
  return s;
}

unsigned dyadic_band_count(uint64_t m) {
  const u128 m2 = static_cast<u128>(m) * m;
  if (m2 <= 1) return 1;
  const u128 v = m2 - 1;
  const uint64_t hi = static_cast<uint64_t>(v >> 64), lo = static_cast<uint64_t>(v);
  const unsigned ceil_log = hi ? 64 + std::bit_width(hi) : std::bit_width(lo);
  return ceil_log + 1;
}

namespace detail {

BandChoice choose_band(const BaseAnalysis& base, const std::vector<uint64_t>& candidates,
                       const std::vector<Exact>& weights) {
  std::vector<Exact> band_weight(64, 0);
  std::vector<bool> seen(64, false);
  for (size_t i = 0; i < candidates.size(); ++i) {
    const uint64_t r = base.r[candidates[i]];
    if (candidates[i] == 0 || r == 0) continue;
    const unsigned j = std::bit_width(r) - 1;
    band_weight[j] += weights[i];
    seen[j] = true;
  }
  BandChoice c;
  int best = -1;
  for (int j = 63; j >= 0; --j)
    if (seen[j] && (best < 0 || band_weight[j] > band_weight[best])) best = j;
  if (best < 0) return c;
  c.lo = uint64_t{1} << best;
  c.weight = band_weight[best];
  for (uint64_t x : candidates) {
    const uint64_t r = base.r[x];
    if (x != 0 && r >= c.lo && r < 2 * c.lo) c.d.push_back(x);
  }
  const uint64_t m = base.size();
  if (m >= c.lo && m < 2 * c.lo) {
    c.d.push_back(0);
    c.zero_admitted = true;
  }
  std::sort(c.d.begin(), c.d.end());
  c.d.erase(std::unique(c.d.begin(), c.d.end()), c.d.end());
  return c;
}

}  // namespace detail

FindResult find_structure(const BaseAnalysis& base) {
  if (!base.delta.symmetric()) throw std::invalid_argument("find_structure: Δ must be symmetric");
  const uint64_t n = base.r.counts.size();
  const uint64_t m = base.size();
  std::vector<u128> mass(64, 0);
  std::vector<uint64_t> count(64, 0);
  for (uint64_t x = 1; x < n; ++x) {
    const uint64_t r = base.r[x];
    if (!r) continue;
    const unsigned j = std::bit_width(r) - 1;
    mass[j] += static_cast<u128>(r) * r;
    ++count[j];
  }
  FindResult out;
  int best = -1;
  for (int j = 63; j >= 0; --j) {
    if (!count[j]) continue;
    if (best < 0 || mass[j] > mass[best]) best = j;
  }
  for (int j = 0; j < 64; ++j)
    if (count[j]) out.buckets.push_back({uint64_t{1} << j, count[j], to_exact(mass[j])});
  if (best < 0) throw std::logic_error("find_structure: no nonzero difference");

  const uint64_t lo = uint64_t{1} << best;
  std::vector<uint64_t> d;
  d.reserve(count[best] + 1);
  for (uint64_t x = 1; x < n; ++x)
    if (base.r[x] >= lo && base.r[x] < 2 * lo) d.push_back(x);
  if (m >= lo && m < 2 * lo) {
    d.insert(d.begin(), 0);
    out.zero_admitted = true;
  }
  out.structure = make_structure(base, std::move(d), lo);

  const unsigned bands = dyadic_band_count(m);
  const Exact off_diagonal = base.e4 - Exact(m) * m;
  out.bound = off_diagonal / bands;
  out.guarantee_ok = out.structure.graph_energy * bands >= off_diagonal;
  out.guarantee_ratio =
      off_diagonal == 0 ? 0.0
                        : static_cast<double>(std::exp(log_exact(out.structure.graph_energy * bands) - log_exact(off_diagonal)));
  if (m <= (uint64_t{1} << 12)) {
    const auto pop = popularity_all(base.delta, base.r);
    out.max_popularity = *std::max_element(pop.begin(), pop.end());
  }
  return out;
}

namespace {

// mass(z) = Σ_{y ∈ D} #{(a, c) ∈ Δ[y]^2 : a − c = z}.
std::vector<uint64_t> dual_mass(const BaseAnalysis& base, const AdditiveStructure& s) {
  const GroupSpec& spec = base.delta.spec();
  const uint64_t n = spec.order();
  const Indicator in_delta(base.delta);
  std::vector<uint64_t> mass(n, 0);
  const int nt = threads();
  const int64_t nd = static_cast<int64_t>(s.D.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
  for (int64_t i = 0; i < nd; ++i) {
    const uint64_t y = s.D[i];
    std::vector<uint64_t> fiber;
    fiber.reserve(base.r[y]);
    for (uint64_t a : base.delta)
      if (in_delta.test(spec.sub(a, y))) fiber.push_back(a);
    const double pair_cost = static_cast<double>(fiber.size()) * fiber.size();
    if (pair_cost <= static_cast<double>(n)) {
      for (uint64_t a : fiber)
        for (uint64_t c : fiber)
          std::atomic_ref<uint64_t>(mass[spec.sub(a, c)]).fetch_add(1, std::memory_order_relaxed);
    } else {
      const CountVector rf = rep_function(GroupSet(spec, std::move(fiber)));
      for (uint64_t z = 0; z < n; ++z)
        if (rf[z]) std::atomic_ref<uint64_t>(mass[z]).fetch_add(rf[z], std::memory_order_relaxed);
    }
  }
  return mass;
}

}  // namespace

EnforceResult enforce_low_height(const BaseAnalysis& base, const AdditiveStructure& s) {
  EnforceResult out;
  out.structure = s;
  const long double log2m = std::log2(static_cast<long double>(base.size()));
  out.threshold = static_cast<double>((1.0L - base.tau) / 2.0L + 2.0L / log2m);
  if (s.height <= out.threshold) return out;

  AdditiveStructure cur = s;
  constexpr unsigned kMaxRounds = 64;
  while (out.rounds < kMaxRounds && cur.height > out.threshold) {
    const auto mass = dual_mass(base, cur);
    std::vector<uint64_t> cand;
    std::vector<Exact> w;
    for (uint64_t z = 1; z < mass.size(); ++z) {
      if (!mass[z]) continue;
      cand.push_back(z);
      w.emplace_back(mass[z]);
    }
    const auto choice = detail::choose_band(base, cand, w);
    if (choice.d.empty()) break;
    AdditiveStructure next = make_structure(base, choice.d, choice.lo);
    if (!(next.height < cur.height - 1e-12)) break;
    cur = std::move(next);
    ++out.rounds;
    out.changed = true;
  }
  if (out.changed) out.structure = cur;
  out.energy_ok = out.structure.graph_energy * dyadic_band_count(base.size()) >= s.graph_energy;
  return out;
}

ValidationReport validate_structure(const BaseAnalysis& base, const AdditiveStructure& s) {
  ValidationReport rep;
  if (!(s.base == base.delta)) rep.fail("base set differs from Δ");
  if (!(s.D.spec() == base.delta.spec())) {
    rep.fail("D lives in a different group");
    return rep;
  }
  if (s.bucket_lo == 0) rep.fail("bucket_lo is zero");
  u128 size = 0, energy = 0;
  size_t shown = 0;
  for (uint64_t x : s.D) {
    const uint64_t r = base.r[x];
    if (r < s.bucket_lo || r >= 2 * s.bucket_lo) {
      if (shown++ < 8)
        rep.fail("band breach at index " + std::to_string(x) + ": r=" + std::to_string(r) + " outside [" +
                 std::to_string(s.bucket_lo) + ", " + std::to_string(2 * s.bucket_lo) + ")");
      else
        rep.pass = false;
    }
    size += r;
    energy += static_cast<u128>(r) * r;
  }
  if (to_exact(size) != s.graph_size)
    rep.fail("graph_size mismatch: stored " + to_decimal(s.graph_size) + ", recomputed " + to_decimal(to_exact(size)));
  if (to_exact(energy) != s.graph_energy)
    rep.fail("graph_energy mismatch: stored " + to_decimal(s.graph_energy) + ", recomputed " +
             to_decimal(to_exact(energy)));
  if (std::fabs(s.tau - base.tau) > kExponentTolerance) rep.fail("tau mismatch");
  if (size) {
    const double alpha = 2.0 - base.exponent(to_exact(size));
    if (std::fabs(alpha - s.height) > kExponentTolerance) rep.fail("height mismatch");
  }
  return rep;
}

ValidationReport validate_structure(const GroupSet& delta, const AdditiveStructure& s) {
  if (delta.size() < 2) {
    ValidationReport rep;
    rep.fail("Δ has fewer than two elements");
    return rep;
  }
  if (!(s.D.spec() == delta.spec())) {
    ValidationReport rep;
    rep.fail("structure group differs from Δ's group");
    return rep;
  }
  return validate_structure(analyze_base(delta), s);
}

}  // namespace nonsmooth
