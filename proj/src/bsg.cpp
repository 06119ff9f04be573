#include "nonsmooth/bsg.hpp"

#include <algorithm>
#include <cmath>

namespace nonsmooth {
namespace {

// {d : 2 r(d) >= size}.
GroupSet half_popular(const CountVector& v, uint64_t size) {
  std::vector<uint64_t> out;
  for (uint64_t i = 0; i < v.counts.size(); ++i)
    if (v.counts[i] > 0 && 2 * v.counts[i] >= size) out.push_back(i);
  return GroupSet(v.spec, std::move(out));
}

uint64_t argmax_smallest(const std::vector<uint64_t>& v) {
  uint64_t best = 0;
  for (uint64_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

std::string to_string(BsgVerdict v) {
  switch (v) {
    case BsgVerdict::strong: return "Strong";
    case BsgVerdict::weak: return "Weak";
    case BsgVerdict::fail: return "Fail";
  }
  return "?";
}

BsgVerdict parse_bsg_verdict(const std::string& s) {
  if (s == "Strong") return BsgVerdict::strong;
  if (s == "Weak") return BsgVerdict::weak;
  if (s == "Fail") return BsgVerdict::fail;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

QuadCount quad_count(const GroupSet& b, const GroupSet& c) {
  QuadCount q;
  q.count = convolve_sets(b, c).sum_squares();
  if (b.size() > 1 && q.count > 0) {
    const long double lb = std::log(static_cast<long double>(b.size()));
    const long double lc = std::log(static_cast<long double>(c.size()));
    q.eta_hat = static_cast<double>((2 * lc + lb - log_exact(q.count)) / lb);
  }
  return q;
}

double doubling_ratio(uint64_t k_size, uint64_t diff_size) {
  if (diff_size <= k_size) return 0.0;
  if (k_size <= 1) return INFINITY;
  return std::log(static_cast<double>(diff_size)) / std::log(static_cast<double>(k_size)) - 1.0;
}

BsgMeasure measure_bsg(const GroupSet& b, const GroupSet& c, const GroupSet& k, const GroupSet& x, uint64_t x0) {
  const GroupSpec& spec = b.spec();
  BsgMeasure m;
  m.x_size = x.size();
  if (!k.empty()) {
    const Indicator in_k(k);
    for (uint64_t e : b) {
      for (uint64_t t : x) {
        if (in_k.test(spec.sub(e, t))) {
          ++m.cover_b;
          break;
        }
      }
    }
    for (uint64_t e : c)
      if (in_k.test(spec.sub(e, x0))) ++m.cover_c;
    m.diff_size = difference_set(k, k).size();
  }
  m.doubling_ratio = doubling_ratio(k.size(), m.diff_size);
  return m;
}

BsgVerdict grade(const GroupSet& b, const GroupSet& c, const BsgMeasure& m, const BsgParams& params) {
  auto meets = [&](const BsgThresholds& t) {
    const double bs = static_cast<double>(b.size()), cs = static_cast<double>(c.size());
    return m.cover_b >= std::pow(bs, t.cover_exp) && m.doubling_ratio <= t.doubling &&
           m.cover_c >= std::pow(cs, t.cover_exp) && m.x_size <= std::pow(bs, t.x_exp) * bs / cs;
  };
  if (meets(params.strong)) return BsgVerdict::strong;
  if (meets(params.weak)) return BsgVerdict::weak;
  return BsgVerdict::fail;
}

BsgCertificate asym_bsg(const GroupSet& b, const GroupSet& c, const BsgParams& params) {
  require_same(b.spec(), c.spec(), "asym_bsg");
  const GroupSpec& spec = b.spec();
  BsgCertificate cert;
  cert.B = b;
  cert.C = c;
  cert.params = params;
  cert.K = GroupSet(spec, {});
  cert.X = GroupSet(spec, {});
  if (c.size() < 4 || b.empty()) {
    cert.reason = "degenerate input: |C| < 4 or B empty";
    return cert;
  }
  const CountVector sums = convolve_sets(b, c);
  cert.quads = quad_count(b, c);
  const Exact bc2 = Exact(b.size()) * c.size() * 2;

  // (1) popular sums: s(x) >= Q / (2|B||C|).
  std::vector<uint64_t> pop;
  for (uint64_t x = 0; x < sums.counts.size(); ++x)
    if (sums[x] && Exact(sums[x]) * bc2 >= cert.quads.count) pop.push_back(x);
  const GroupSet popular(spec, std::move(pop));

  // (2) popular differences of C, r_C(d) >= max(E(C)/(2|C|^2), |C|/8), that
  // are also differences of popular sums.
  const CountVector rc = rep_function(c);
  const Exact ec = rc.sum_squares();
  const Exact c2x2 = Exact(c.size()) * c.size() * 2;
  const CountVector rs = rep_function(popular);
  std::vector<uint64_t> k0{0};
  for (uint64_t d = 1; d < rc.counts.size(); ++d)
    if (rc[d] && rs[d] && Exact(rc[d]) * c2x2 >= ec && 8 * rc[d] >= c.size()) k0.push_back(d);
  GroupSet k(spec, std::move(k0));

  // (3) closure: K <- {d : r_K(d) >= |K|/2}, keep the best doubling ratio.
  CountVector rk = rep_function(k);
  GroupSet best = k;
  double best_ratio = doubling_ratio(k.size(), rk.support_size());
  for (unsigned round = 0; round < params.closure_rounds; ++round) {
    if (best_ratio <= params.closure_delta) {
      cert.closure_converged = true;
      break;
    }
    GroupSet next = half_popular(rk, k.size());
    if (next == k) break;
    k = std::move(next);
    rk = rep_function(k);
    ++cert.closure_rounds;
    const double ratio = doubling_ratio(k.size(), rk.support_size());
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  if (best_ratio <= params.closure_delta) cert.closure_converged = true;
  cert.K = best;

  // (4) greedy cover of B by translates of K.
  const GroupSet neg_k = cert.K.negated();
  std::vector<uint64_t> gain = convolve_sets(b, neg_k).counts;  // |B ∩ (t + K)|
  const long double cs = static_cast<long double>(c.size());
  const uint64_t budget = static_cast<uint64_t>(
      std::max(1.0L, std::floor(params.cover_budget * static_cast<long double>(b.size()) / cs)));
  const long double min_gain = params.min_gain * cs;
  Indicator remaining(b);
  std::vector<uint64_t> chosen;
  while (chosen.size() < budget) {
    const uint64_t t = argmax_smallest(gain);
    if (static_cast<long double>(gain[t]) < min_gain || gain[t] == 0) break;
    chosen.push_back(t);
    // Remove B ∩ (t + K) and update the gains incrementally.
    std::vector<uint64_t> removed;
    for (uint64_t kk : cert.K) {
      const uint64_t e = spec.add(t, kk);
      if (b.contains(e) && remaining.test(e)) removed.push_back(e);
    }
    for (uint64_t e : removed) {
      for (uint64_t kk : cert.K) --gain[spec.sub(e, kk)];
    }
    std::vector<uint64_t> keep;
    const Indicator rem_ind(spec, removed);
    for (uint64_t e : b)
      if (remaining.test(e) && !rem_ind.test(e)) keep.push_back(e);
    remaining = Indicator(spec, keep);
  }
  cert.X = GroupSet(spec, std::move(chosen));

  // (5) the best single translate for C.
  const auto hit_c = convolve_sets(c, neg_k).counts;
  cert.x0 = argmax_smallest(hit_c);

  cert.measured = measure_bsg(b, c, cert.K, cert.X, cert.x0);
  cert.verdict = grade(b, c, cert.measured, params);
  if (cert.verdict == BsgVerdict::fail) cert.reason = "conclusions not met at the configured thresholds";
  return cert;
}

}  // namespace nonsmooth
