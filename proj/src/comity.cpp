#include "nonsmooth/comity.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include <omp.h>

#include "nonsmooth/config.hpp"

namespace nonsmooth {
namespace {

constexpr int kBands = 64;

int band_of(uint64_t v) { return std::bit_width(v) - 1; }

template <typename F>
void for_each_bit(const PackedBits& bits, F f) {
  const auto words = bits.words();
  for (size_t w = 0; w < words.size(); ++w) {
    uint64_t word = words[w];
    while (word) {
      const unsigned t = std::countr_zero(word);
      f(w * 64 + t);
      word &= word - 1;
    }
  }
}

using Entries = std::vector<std::pair<uint64_t, uint64_t>>;  // (key, value), value > 0

struct ScanResult {
  std::array<uint64_t, kBands> count{};
  std::array<u128, kBands> mass{};
  std::array<uint64_t, kBands> min{};
  Exact total = 0;
  std::vector<std::array<uint32_t, kBands>> row_counts;
  int chosen = -1;
};

// Pass 1 over the given rows: per-band counts, masses and minima, plus the
// plain total.  row(i, out) fills the nonzero entries of row i.
template <typename RowFn>
ScanResult scan_rows(const std::vector<size_t>& rows, RowFn row) {
  ScanResult res;
  res.min.fill(UINT64_MAX);
  res.row_counts.assign(rows.size(), {});
  const int nt = threads();
  std::vector<ScanResult> partial(nt);
#pragma omp parallel num_threads(nt)
  {
    ScanResult& loc = partial[omp_get_thread_num()];
    loc.min.fill(UINT64_MAX);
    u128 total = 0;
    Entries entries;
#pragma omp for schedule(dynamic, 4)
    for (int64_t k = 0; k < static_cast<int64_t>(rows.size()); ++k) {
      entries.clear();
      row(rows[k], entries);
      auto& rc = res.row_counts[k];
      for (const auto& [key, v] : entries) {
        const int b = band_of(v);
        ++loc.count[b];
        loc.mass[b] += v;
        loc.min[b] = std::min(loc.min[b], v);
        ++rc[b];
        total += v;
      }
    }
    loc.total = to_exact(total);
  }
  for (const auto& p : partial) {
    for (int b = 0; b < kBands; ++b) {
      res.count[b] += p.count[b];
      res.mass[b] += p.mass[b];
      res.min[b] = std::min(res.min[b], p.min[b]);
    }
    res.total += p.total;
  }
  for (int b = kBands - 1; b >= 0; --b)
    if (res.count[b] && (res.chosen < 0 || res.mass[b] > res.mass[res.chosen])) res.chosen = b;
  return res;
}

// Pass 2: collect every stride-th in-band entry, in row order, as (row key, entry key).
template <typename RowFn>
std::vector<std::pair<uint64_t, uint64_t>> collect_band(const std::vector<size_t>& rows,
                                                        const std::vector<uint64_t>& row_keys,
                                                        const ScanResult& scan, uint64_t stride, RowFn row) {
  const int b = scan.chosen;
  std::vector<uint64_t> start(rows.size() + 1, 0);
  for (size_t k = 0; k < rows.size(); ++k) start[k + 1] = start[k] + scan.row_counts[k][b];
  std::vector<std::vector<std::pair<uint64_t, uint64_t>>> per_row(rows.size());
  const int nt = threads();
#pragma omp parallel num_threads(nt)
  {
    Entries entries;
#pragma omp for schedule(dynamic, 4)
    for (int64_t k = 0; k < static_cast<int64_t>(rows.size()); ++k) {
      const uint64_t lo = start[k], hi = start[k + 1];
      if (lo == hi) continue;
      const uint64_t first = (lo + stride - 1) / stride * stride;
      if (first >= hi) continue;
      entries.clear();
      row(rows[k], entries);
      uint64_t ord = lo;
      for (const auto& [key, v] : entries) {
        if (band_of(v) != b) continue;
        if (ord % stride == 0) per_row[k].emplace_back(row_keys[rows[k]], key);
        ++ord;
      }
    }
  }
  std::vector<std::pair<uint64_t, uint64_t>> out;
  for (auto& v : per_row) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<size_t> choose_rows(size_t n, double per_row_cost, double budget, bool& sampled) {
  std::vector<size_t> rows;
  const double total = per_row_cost * static_cast<double>(n);
  size_t stride = 1;
  if (total > budget) stride = static_cast<size_t>(std::ceil(total / budget));
  sampled = stride > 1;
  for (size_t i = 0; i < n; i += stride) rows.push_back(i);
  return rows;
}

std::vector<BandStat> band_stats(const ScanResult& s) {
  std::vector<BandStat> out;
  for (int b = 0; b < kBands; ++b)
    if (s.count[b]) out.push_back({uint64_t{1} << b, Exact(s.count[b]), to_exact(s.mass[b]), s.min[b]});
  return out;
}

// Σ_a deg_D(a)^2 with deg_D(a) = #{x ∈ D : a − x ∈ Δ}.
Exact degree_square_sum(const BaseAnalysis& base, const GroupSet& d) {
  const CountVector deg = convolve_sets(d, base.delta);
  Exact total = 0;
  u128 acc = 0;
  for (uint64_t a : base.delta) {
    const u128 v = deg[a];
    acc += v * v;
  }
  total += to_exact(acc);
  return total;
}

uint64_t scale_count(uint64_t v, size_t all, size_t scanned) {
  return static_cast<uint64_t>(static_cast<u128>(v) * all / scanned);
}

// F_x as a list of D-members: overlaps with x in [w, 2w).
void fiber_row(const FiberTable& fib, const GroupSet& d, uint64_t x, uint64_t w, std::vector<uint64_t>& out) {
  out.clear();
  const PackedBits& fx = fib(x);
  for (uint64_t y : d) {
    const uint64_t ov = fx.and_count(fib(y));
    if (ov >= w && ov < 2 * w) out.push_back(y);
  }
}

// Values v(x, b) = |Δ[x] ∩ F_{x,b}| for b ∈ Δ with v > 0, as (b, v).
struct SidewaysRow {
  const BaseAnalysis& base;
  const AdditiveStructure& s;
  const FiberTable& fib;
  const PositionIndex& pos;
  uint64_t w;

  void operator()(uint64_t x, Entries& out) const {
    const GroupSpec& spec = base.delta.spec();
    std::vector<uint64_t> fx;
    fiber_row(fib, s.D, x, w, fx);
    std::vector<uint32_t> cnt(base.size(), 0);
    for_each_bit(fib(x), [&](size_t cpos) {
      const uint64_t c = base.delta[cpos];
      for (uint64_t y : fx) {
        const int64_t p = pos.find(spec.sub(c, y));
        if (p >= 0) ++cnt[p];
      }
    });
    for (size_t p = 0; p < cnt.size(); ++p)
      if (cnt[p]) out.emplace_back(base.delta[p], cnt[p]);
  }
};

}  // namespace

FiberTable::FiberTable(const BaseAnalysis& base, const GroupSet& keys) : keys_(keys), key_pos_(keys) {
  const double bytes = static_cast<double>(keys.size()) * (base.size() / 8.0 + 8);
  if (bytes > 2147483648.0)
    throw CapExceeded("fiber table would need " + std::to_string(static_cast<uint64_t>(bytes)) + " bytes");
  fibers_.resize(keys.size());
  const int nt = threads();
  const Indicator in_delta(base.delta);
  const GroupSpec& spec = base.delta.spec();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
  for (int64_t i = 0; i < static_cast<int64_t>(keys.size()); ++i) {
    PackedBits f(base.size());
    const uint64_t x = keys[i];
    for (size_t p = 0; p < base.size(); ++p)
      if (in_delta.test(spec.sub(base.delta[p], x))) f.set(p);
    fibers_[i] = std::move(f);
  }
}

const PackedBits& FiberTable::operator()(uint64_t x) const {
  const int64_t p = key_pos_.find(x);
  if (p < 0) throw std::out_of_range("fiber requested for an element outside the key set");
  return fibers_[p];
}

PackedBits FiberTable::compute(const BaseAnalysis& base, uint64_t x) {
  const Indicator in_delta(base.delta);
  const GroupSpec& spec = base.delta.spec();
  PackedBits f(base.size());
  for (size_t p = 0; p < base.size(); ++p)
    if (in_delta.test(spec.sub(base.delta[p], x))) f.set(p);
  return f;
}

uint64_t overlap(const BaseAnalysis& base, uint64_t x, uint64_t y) {
  return FiberTable::compute(base, x).and_count(FiberTable::compute(base, y));
}

std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::has_certificate: return "certificate";
    case StepKind::new_structure: return "new_structure";
    case StepKind::stall: return "stall";
  }
  return "?";
}

ComityCertificate comity_certificate(const BaseAnalysis& base, const AdditiveStructure& s,
                                     const CertificateOptions& opts) {
  ComityCertificate c;
  c.tau = s.tau;
  c.alpha = s.height;
  const FiberTable fib(base, s.D);
  const size_t nd = s.D.size();
  const double words = std::ceil(base.size() / 64.0);
  bool sampled = false;
  const auto rows = choose_rows(nd, static_cast<double>(nd) * words, opts.work_budget, sampled);
  auto row = [&](size_t i, Entries& out) {
    const PackedBits& fx = fib(s.D[i]);
    for (uint64_t y : s.D) {
      const uint64_t ov = fx.and_count(fib(y));
      if (ov) out.emplace_back(y, ov);
    }
  };
  const ScanResult scan = scan_rows(rows, row);
  if (scan.chosen < 0) throw std::logic_error("comity_certificate: no overlapping pairs");
  const int b = scan.chosen;
  c.sampled = sampled;
  c.rows_scanned = rows.size();
  c.total = degree_square_sum(base, s.D);
  if (!sampled) c.enumerated_total = scan.total;
  c.band_lo = uint64_t{1} << b;
  c.min_overlap = scan.min[b];
  c.pair_count = sampled ? Exact(scale_count(scan.count[b], nd, rows.size())) : Exact(scan.count[b]);
  c.mass = sampled ? to_exact(scan.mass[b] * nd / rows.size()) : to_exact(scan.mass[b]);
  c.bands = band_stats(scan);
  c.beta = base.exponent(Exact(c.min_overlap));
  c.mu = c.tau + c.alpha - c.beta;
  const uint64_t stride = std::max<uint64_t>(1, (scan.count[b] + opts.pair_cap - 1) / opts.pair_cap);
  std::vector<uint64_t> keys(s.D.begin(), s.D.end());
  c.pairs = collect_band(rows, keys, scan, stride, row);
  c.pairs_complete = !sampled && stride == 1;
  return c;
}

ValidationReport verify_comity(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c) {
  ValidationReport rep;
  const auto sv = validate_structure(base, s);
  for (const auto& v : sv.violations) rep.fail("structure: " + v);
  if (!sv.pass && sv.violations.empty()) rep.fail("structure invalid");
  if (c.band_lo == 0 || (c.band_lo & (c.band_lo - 1))) rep.fail("band_lo is not a power of two");
  if (c.min_overlap < c.band_lo || c.min_overlap >= 2 * c.band_lo) rep.fail("min_overlap outside its band");
  if (std::fabs(c.tau - s.tau) > kExponentTolerance) rep.fail("tau differs from structure");
  if (std::fabs(c.alpha - s.height) > kExponentTolerance) rep.fail("alpha differs from structure height");
  if (c.min_overlap && std::fabs(c.beta - base.exponent(Exact(c.min_overlap))) > kExponentTolerance) rep.fail("beta != log_M(min overlap)");
  if (std::fabs(c.mu - (c.tau + c.alpha - c.beta)) > kExponentTolerance) rep.fail("mu != tau + alpha - beta");
  if (!rep.pass) return rep;

  const FiberTable fib(base, s.D);
  uint64_t min_seen = UINT64_MAX;
  Exact stored_mass = 0;
  for (const auto& [x, y] : c.pairs) {
    if (!s.D.contains(x) || !s.D.contains(y)) {
      rep.fail("stored pair outside D x D");
      return rep;
    }
    const uint64_t ov = fib(x).and_count(fib(y));
    if (ov < c.band_lo || ov >= 2 * c.band_lo) {
      rep.fail("stored pair (" + std::to_string(x) + ", " + std::to_string(y) + ") has overlap " +
               std::to_string(ov) + " outside the band");
      return rep;
    }
    min_seen = std::min(min_seen, ov);
    stored_mass += ov;
  }
  if (!c.pairs.empty() && min_seen < c.min_overlap) rep.fail("a stored pair lies below min_overlap");
  const Exact total = degree_square_sum(base, s.D);
  if (total != c.total) rep.fail("total overlap sum mismatch: stored " + to_decimal(c.total) + ", recomputed " + to_decimal(total));
  const unsigned band_count = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(base.size())))) + 1;
  if (!c.sampled && c.mass * band_count < c.total) rep.fail("band mass below total/(ceil(log2 M)+1)");
  if (c.pairs_complete) {
    if (Exact(c.pairs.size()) != c.pair_count) rep.fail("pair_count differs from stored enumeration");
    if (stored_mass != c.mass) rep.fail("mass differs from stored enumeration");
  }
  if (!c.sampled && !c.pairs_complete) {
    std::vector<size_t> rows(s.D.size());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const ScanResult scan = scan_rows(rows, [&](size_t i, Entries& out) {
      const PackedBits& fx = fib(s.D[i]);
      for (uint64_t y : s.D) {
        const uint64_t ov = fx.and_count(fib(y));
        if (ov) out.emplace_back(y, ov);
      }
    });
    const int b = band_of(c.band_lo);
    if (Exact(scan.count[b]) != c.pair_count) rep.fail("pair_count mismatch on recount");
    if (to_exact(scan.mass[b]) != c.mass) rep.fail("mass mismatch on recount");
    if (scan.min[b] != c.min_overlap) rep.fail("min_overlap mismatch on recount");
    if (scan.total != c.total) rep.fail("enumerated total differs from degree identity");
  }
  return rep;
}

FSets f_sets(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c, uint64_t x, uint64_t a) {
  const GroupSpec& spec = base.delta.spec();
  const PackedBits fx_bits = FiberTable::compute(base, x);
  const Indicator in_delta(base.delta);
  std::vector<uint64_t> fx;
  for (uint64_t y : s.D) {
    const PackedBits fy = FiberTable::compute(base, y);
    const uint64_t ov = fx_bits.and_count(fy);
    if (ov >= c.band_lo && ov < 2 * c.band_lo) fx.push_back(y);
  }
  FSets out;
  out.f_x = GroupSet(spec, fx);
  std::vector<uint64_t> fxa, fa;
  for (uint64_t y : fx) {
    const uint64_t b = spec.add(a, y);
    if (in_delta.test(b)) fxa.push_back(b);
  }
  for (uint64_t b : base.delta)
    if (s.D.contains(spec.sub(b, a))) fa.push_back(b);
  out.f_xa = GroupSet(spec, std::move(fxa));
  out.f_a = GroupSet(spec, std::move(fa));
  return out;
}

SidewaysCertificate sideways_certificate(const BaseAnalysis& base, const AdditiveStructure& s,
                                         const ComityCertificate& c, const CertificateOptions& opts) {
  SidewaysCertificate q;
  q.tau = s.tau;
  q.alpha = s.height;
  q.comity_band_lo = c.band_lo;
  const FiberTable fib(base, s.D);
  const PositionIndex pos(base.delta);
  const size_t nd = s.D.size();
  const double words = std::ceil(base.size() / 64.0);
  // Per row: |D| overlaps plus |Δ[x]| |F_x| <= M |D| lookups.
  const double per_row = static_cast<double>(nd) * (words + base.size() * 0.25);
  bool sampled = false;
  const auto rows = choose_rows(nd, per_row, opts.work_budget, sampled);
  const SidewaysRow side{base, s, fib, pos, c.band_lo};
  auto row = [&](size_t i, Entries& out) { side(s.D[i], out); };
  const ScanResult scan = scan_rows(rows, row);
  if (scan.chosen < 0) throw std::logic_error("sideways_certificate: empty 𝒬 support");
  const int b = scan.chosen;
  q.sampled = sampled;
  q.rows_scanned = rows.size();
  q.total = sampled ? scan.total * nd / rows.size() : scan.total;
  q.band_lo = uint64_t{1} << b;
  q.min_value = scan.min[b];
  q.q_count = sampled ? Exact(scale_count(scan.count[b], nd, rows.size())) : Exact(scan.count[b]);
  q.mass = sampled ? to_exact(scan.mass[b] * nd / rows.size()) : to_exact(scan.mass[b]);
  q.bands = band_stats(scan);
  q.gamma = base.exponent(Exact(q.min_value));
  q.nu = q.tau + q.alpha - q.gamma;
  const uint64_t stride = std::max<uint64_t>(1, (scan.count[b] + opts.pair_cap - 1) / opts.pair_cap);
  std::vector<uint64_t> keys(s.D.begin(), s.D.end());
  q.pairs = collect_band(rows, keys, scan, stride, row);
  q.pairs_complete = !sampled && stride == 1;
  return q;
}

Exact sideways_total_by_overlaps(const BaseAnalysis& base, const AdditiveStructure& s, uint64_t comity_band_lo) {
  const FiberTable fib(base, s.D);
  Exact total = 0;
  u128 acc = 0;
  for (uint64_t x : s.D) {
    const PackedBits& fx = fib(x);
    for (uint64_t y : s.D) {
      const uint64_t ov = fx.and_count(fib(y));
      if (ov >= comity_band_lo && ov < 2 * comity_band_lo) acc += ov;
    }
  }
  total += to_exact(acc);
  return total;
}

ValidationReport verify_sideways(const BaseAnalysis& base, const AdditiveStructure& s, const SidewaysCertificate& q) {
  ValidationReport rep;
  const auto sv = validate_structure(base, s);
  for (const auto& v : sv.violations) rep.fail("structure: " + v);
  if (q.band_lo == 0 || (q.band_lo & (q.band_lo - 1))) rep.fail("band_lo is not a power of two");
  if (q.comity_band_lo == 0) rep.fail("comity band missing");
  if (q.min_value < q.band_lo || q.min_value >= 2 * q.band_lo) rep.fail("min_value outside its band");
  if (std::fabs(q.tau - s.tau) > kExponentTolerance) rep.fail("tau differs from structure");
  if (std::fabs(q.alpha - s.height) > kExponentTolerance) rep.fail("alpha differs from structure height");
  if (q.min_value && std::fabs(q.gamma - base.exponent(Exact(q.min_value))) > kExponentTolerance) rep.fail("gamma != log_M(min value)");
  if (std::fabs(q.nu - (q.tau + q.alpha - q.gamma)) > kExponentTolerance) rep.fail("nu != tau + alpha - gamma");
  if (q.q_count * 2 * q.band_lo < q.mass) rep.fail("q_count < mass / 2w");
  if (!rep.pass) return rep;

  const FiberTable fib(base, s.D);
  const PositionIndex pos(base.delta);
  const SidewaysRow side{base, s, fib, pos, q.comity_band_lo};
  // Recheck stored pairs row by row.
  std::vector<std::pair<uint64_t, uint64_t>> pairs = q.pairs;
  std::stable_sort(pairs.begin(), pairs.end(), [](auto& l, auto& r) { return l.first < r.first; });
  Exact stored_mass = 0;
  Entries entries;
  for (size_t i = 0; i < pairs.size();) {
    const uint64_t x = pairs[i].first;
    if (!s.D.contains(x)) {
      rep.fail("stored pair with x outside D");
      return rep;
    }
    entries.clear();
    side(x, entries);
    for (; i < pairs.size() && pairs[i].first == x; ++i) {
      const uint64_t bkey = pairs[i].second;
      auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(bkey, uint64_t{0}));
      const uint64_t v = (it != entries.end() && it->first == bkey) ? it->second : 0;
      if (v < q.band_lo || v >= 2 * q.band_lo) {
        rep.fail("stored pair (" + std::to_string(x) + ", " + std::to_string(bkey) + ") has value " +
                 std::to_string(v) + " outside the band");
        return rep;
      }
      stored_mass += v;
    }
  }
  if (q.pairs_complete) {
    if (Exact(q.pairs.size()) != q.q_count) rep.fail("q_count differs from stored enumeration");
    if (stored_mass != q.mass) rep.fail("mass differs from stored enumeration");
  }
  if (!q.sampled) {
    std::vector<size_t> rows(s.D.size());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const ScanResult scan = scan_rows(rows, [&](size_t i, Entries& out) { side(s.D[i], out); });
    const int b = band_of(q.band_lo);
    if (Exact(scan.count[b]) != q.q_count) rep.fail("q_count mismatch on recount");
    if (to_exact(scan.mass[b]) != q.mass) rep.fail("mass mismatch on recount");
    if (scan.total != q.total) rep.fail("total mismatch on recount");
    if (scan.total != sideways_total_by_overlaps(base, s, q.comity_band_lo))
      rep.fail("interchange identity fails: Σ_x Σ_b |Δ[x] ∩ F_{x,b}| != Σ_x Σ_{F_x} overlap");
  }
  return rep;
}

ComityStep comity_increment(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c,
                            double mu_target, double sigma_hat) {
  ComityStep step;
  step.certificate = c;
  step.old_height = s.height;
  step.new_height = s.height;
  step.predicted_height = s.height - c.mu + 2 * sigma_hat;
  if (c.mu <= mu_target) {
    step.kind = StepKind::has_certificate;
    return step;
  }
  // D_β = {d : r(d) >= M^β}, with M^β the measured band minimum.
  step.threshold = c.min_overlap;
  std::vector<uint64_t> cand;
  std::vector<Exact> w;
  for (uint64_t d = 1; d < base.r.counts.size(); ++d) {
    if (base.r[d] >= step.threshold) {
      cand.push_back(d);
      w.emplace_back(base.r[d]);
    }
  }
  const auto choice = detail::choose_band(base, cand, w);
  if (choice.d.empty()) return step;
  AdditiveStructure next = make_structure(base, choice.d, choice.lo);
  step.new_height = next.height;
  step.kind = next.height < s.height - 1e-12 ? StepKind::new_structure : StepKind::stall;
  step.structure = std::move(next);
  return step;
}

SidewaysStep sideways_increment(const BaseAnalysis& base, const AdditiveStructure& s, const ComityCertificate& c,
                                const SidewaysCertificate& q, double nu_target) {
  SidewaysStep step;
  step.certificate = q;
  step.old_height = s.height;
  step.new_height = s.height;
  step.predicted_height = s.height + c.mu - q.nu / 2;
  if (q.nu <= nu_target) {
    step.kind = StepKind::has_certificate;
    return step;
  }
  const GroupSpec& spec = base.delta.spec();
  const uint64_t m = base.size();
  const long double t = std::pow(static_cast<long double>(m), static_cast<long double>(q.gamma - c.mu)) / 2.0L;
  step.threshold = static_cast<uint64_t>(std::max(1.0L, std::ceil(t - 1e-9L)));

  const FiberTable fib(base, s.D);
  const PositionIndex pos(base.delta);
  const SidewaysRow side{base, s, fib, pos, q.comity_band_lo};
  // Rows follow the certificate: all of D, or the same stride sample.
  const size_t nd = s.D.size();
  const size_t stride = q.sampled ? std::max<size_t>(1, nd / std::max<uint64_t>(1, q.rows_scanned)) : 1;
  std::vector<PackedBits> unions(m);
  Entries entries;
  for (size_t i = 0; i < nd; i += stride) {
    const uint64_t x = s.D[i];
    entries.clear();
    side(x, entries);
    for (const auto& [b, v] : entries) {
      if (v < q.band_lo || v >= 2 * q.band_lo) continue;
      PackedBits& u = unions[pos.find(b)];
      if (u.size() == 0) u = PackedBits(m);
      u |= fib(x);
    }
  }
  // Δ_{x,b} keeps a with |Δ ∩ (a + b − Δ)| = r(a + b) >= T; the pair (b, a)
  // becomes the difference a − (−b) = a + b since Δ = −Δ.
  std::vector<uint64_t> count(spec.order(), 0);
  u128 union_total = 0;
  for (size_t bp = 0; bp < m; ++bp) {
    if (unions[bp].size() == 0) continue;
    const uint64_t b = base.delta[bp];
    for_each_bit(unions[bp], [&](size_t ap) {
      const uint64_t z = spec.add(base.delta[ap], b);
      if (base.r[z] < step.threshold) return;
      ++count[z];
      ++union_total;
      if (step.sample.size() < 100000) step.sample.emplace_back(b, base.delta[ap]);
    });
  }
  step.union_total = to_exact(union_total);
  std::vector<uint64_t> cand;
  std::vector<Exact> w;
  for (uint64_t z = 1; z < count.size(); ++z) {
    if (!count[z]) continue;
    cand.push_back(z);
    w.emplace_back(count[z]);
  }
  const auto choice = detail::choose_band(base, cand, w);
  if (choice.d.empty()) return step;
  AdditiveStructure next = make_structure(base, choice.d, choice.lo);
  step.new_height = next.height;
  step.kind = next.height < s.height - 1e-12 ? StepKind::new_structure : StepKind::stall;
  step.structure = std::move(next);
  return step;
}

}  // namespace nonsmooth
