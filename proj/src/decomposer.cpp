#include "nonsmooth/decomposer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "nonsmooth/config.hpp"

namespace nonsmooth {

PruneResult prune_popular(const GroupSet& delta, double c_pop) {
  if (!delta.symmetric()) throw std::invalid_argument("prune_popular: Δ must be symmetric");
  if (!(c_pop > 0)) throw std::invalid_argument("prune_popular: C_pop must be positive");
  PruneResult out;
  out.c_pop = c_pop;
  const CountVector r = rep_function(delta);
  out.e4_before = r.sum_squares();
  const auto pop = popularity_all(delta, r);
  // popularity(a) >= C_pop E_4 / M, compared as popularity(a) M 2^20 >= round(C_pop 2^20) E_4.
  const uint64_t scaled = static_cast<uint64_t>(std::llround(c_pop * 1048576.0));
  out.threshold_numerator = out.e4_before * scaled;
  std::vector<uint64_t> removed;
  for (size_t i = 0; i < delta.size(); ++i) {
    out.max_popularity = std::max(out.max_popularity, pop[i]);
    if (Exact(pop[i]) * delta.size() * 1048576u >= out.threshold_numerator) removed.push_back(delta[i]);
  }
  out.removed = symmetrize(GroupSet(delta.spec(), std::move(removed)));
  out.set = delta.minus(out.removed);
  out.e4_after = out.set.empty() ? Exact(0) : energy_exact(out.set, 4);
  return out;
}

Schedule schedule(double sigma0, double nu_star, double c) {
  if (!(sigma0 > 0 && sigma0 < 1)) throw std::invalid_argument("schedule: σ0 must lie in (0, 1)");
  if (!(nu_star > 0 && nu_star < 1)) throw std::invalid_argument("schedule: ν* must lie in (0, 1)");
  if (!(c > 0)) throw std::invalid_argument("schedule: C must be positive");
  Schedule s;
  s.max_iters = static_cast<unsigned>(std::ceil(2.0 / nu_star - 1e-12));
  s.saturated_from = s.max_iters;
  double sigma = sigma0;
  for (unsigned j = 0; j < s.max_iters; ++j) {
    if (sigma > 0 && sigma < 1) {
      const double mu = c / std::log(1.0 / sigma);
      s.sigma.push_back(sigma);
      s.mu_tilde.push_back(mu);
      sigma = c * mu;
    } else {
      if (s.saturated_from == s.max_iters) s.saturated_from = j;
      s.sigma.push_back(std::min(sigma, 1.0));
      s.mu_tilde.push_back(std::max(s.mu_tilde.empty() ? nu_star : s.mu_tilde.back(), nu_star));
    }
  }
  return s;
}

namespace {

GroupSet fiber_set(const BaseAnalysis& base, uint64_t x) {
  const PackedBits bits = FiberTable::compute(base, x);
  std::vector<uint64_t> out;
  for (size_t p = 0; p < base.size(); ++p)
    if (bits.test(p)) out.push_back(base.delta[p]);
  return GroupSet(base.delta.spec(), std::move(out));
}

TraceRow row_for(unsigned& step, unsigned block, const std::string& phase, const AdditiveStructure& s) {
  TraceRow r;
  r.step = step++;
  r.block = block;
  r.phase = phase;
  r.alpha = s.height;
  r.d_size = s.D.size();
  r.graph_energy = s.graph_energy;
  return r;
}

}  // namespace

ExtractResult extract_block(const GroupSet& delta, const ExtractParams& params, unsigned block_index,
                            unsigned step_offset) {
  ExtractResult out;
  unsigned step = step_offset;
  if (delta.size() < 2) {
    out.stall_reason = "residual has fewer than two elements";
    return out;
  }
  const BaseAnalysis base = analyze_base(delta);
  const FindResult found = find_structure(base);
  const EnforceResult enforced = enforce_low_height(base, found.structure);
  AdditiveStructure s = enforced.structure;
  {
    TraceRow r = row_for(step, block_index, "structure", s);
    r.outcome = enforced.changed ? "enforced" : "found";
    out.trace.push_back(r);
  }

  double sigma_hat = smoothing_exponent(delta.size(), base.e4, energy_exact(delta, 8));
  const double sigma0 = params.sigma0 ? *params.sigma0 : std::clamp(sigma_hat, 1e-12, 1 - 1e-9);
  const Schedule sched = schedule(sigma0, params.nu_star, params.c);

  std::optional<ComityCertificate> ccert;
  std::optional<SidewaysCertificate> qcert;
  for (unsigned it = 0; it < sched.max_iters && !qcert; ++it) {
    const ComityCertificate c = comity_certificate(base, s, params.cert);
    const ComityStep cs = comity_increment(base, s, c, sched.mu_tilde[it], sigma_hat);
    TraceRow r = row_for(step, block_index, "comity", s);
    r.mu = c.mu;
    r.outcome = to_string(cs.kind);
    out.trace.push_back(r);
    if (cs.kind == StepKind::stall) {
      out.stall_reason = "comity increment stalled at iteration " + std::to_string(it);
      return out;
    }
    if (cs.kind == StepKind::new_structure) {
      s = *cs.structure;
      continue;
    }
    const SidewaysCertificate q = sideways_certificate(base, s, c, params.cert);
    const SidewaysStep ss = sideways_increment(base, s, c, q, params.nu_star);
    TraceRow r2 = row_for(step, block_index, "sideways", s);
    r2.mu = c.mu;
    r2.nu = q.nu;
    r2.outcome = to_string(ss.kind);
    out.trace.push_back(r2);
    if (ss.kind == StepKind::stall) {
      out.stall_reason = "sideways increment stalled at iteration " + std::to_string(it);
      return out;
    }
    if (ss.kind == StepKind::new_structure) {
      s = *ss.structure;
      continue;
    }
    ccert = c;
    qcert = q;
  }
  if (!qcert) {
    out.stall_reason = "iteration budget exhausted before both certificates met their targets";
    return out;
  }

  // Selection: maximise |F_x| E(Δ[x], F_{x,a}) over a budgeted stride of 𝒬.
  const GroupSpec& spec = delta.spec();
  const auto& qpairs = qcert->pairs;
  const size_t stride = std::max<size_t>(1, (qpairs.size() + params.selection_cap - 1) / params.selection_cap);
  std::map<uint64_t, std::pair<GroupSet, GroupSet>> per_x;  // x -> (F_x, Δ[x])
  const Indicator in_delta(delta);
  double work = 0;
  double best_score = -1;
  uint64_t best_x = 0, best_a = 0;
  GroupSet best_b, best_c;
  size_t scanned = 0;
  for (size_t i = 0; i < qpairs.size() && work <= params.selection_work; i += stride) {
    const auto [x, a] = qpairs[i];
    auto it = per_x.find(x);
    if (it == per_x.end()) {
      const FSets f = f_sets(base, s, *ccert, x, a);
      it = per_x.emplace(x, std::make_pair(f.f_x, fiber_set(base, x))).first;
    }
    const GroupSet& fx = it->second.first;
    const GroupSet& dx = it->second.second;
    std::vector<uint64_t> fxa;
    for (uint64_t y : fx) {
      const uint64_t b = spec.add(a, y);
      if (in_delta.test(b)) fxa.push_back(b);
    }
    const GroupSet fxa_set(spec, std::move(fxa));
    work += static_cast<double>(dx.size()) * fxa_set.size();
    const Exact e = convolve_sets(dx, fxa_set.negated()).sum_squares();
    const double score = static_cast<double>(fx.size()) * std::exp(static_cast<double>(log_exact(e)));
    ++scanned;
    if (score > best_score) {
      best_score = score;
      best_x = x;
      best_a = a;
      best_b = fxa_set;
      best_c = dx;
    }
  }
  {
    TraceRow r = row_for(step, block_index, "select", s);
    r.mu = ccert->mu;
    r.nu = qcert->nu;
    r.outcome = "x=" + std::to_string(best_x) + " a=" + std::to_string(best_a) + " scanned=" + std::to_string(scanned);
    out.trace.push_back(r);
  }
  if (best_score < 0) {
    out.stall_reason = "no selectable (x, a) pair";
    return out;
  }

  const BsgCertificate cert = asym_bsg(best_b, best_c, params.bsg);
  {
    TraceRow r = row_for(step, block_index, "bsg", s);
    r.mu = ccert->mu;
    r.nu = qcert->nu;
    r.outcome = to_string(cert.verdict);
    out.trace.push_back(r);
  }
  if (cert.verdict == BsgVerdict::fail) {
    out.stall_reason = "BSG verdict Fail: " + cert.reason;
    return out;
  }
  Block b;
  b.index = block_index;
  b.H = symmetrize(cert.K);
  b.X = symmetrize(cert.X);
  b.B = sumset(b.X, b.H).intersect(delta);
  b.alpha = s.height;
  b.diff_size = difference_set(b.H, b.H).size();
  b.doubling_ratio = doubling_ratio(b.H.size(), b.diff_size);
  b.verdict = cert.verdict;
  b.x = best_x;
  b.a = best_a;
  if (b.B.empty()) {
    out.stall_reason = "block (X + H) ∩ Δ is empty";
    return out;
  }
  out.block = std::move(b);
  return out;
}

Decomposition decompose(const GroupSet& delta, const DecomposeParams& params) {
  Decomposition d;
  d.input = delta;
  d.pruned = prune_popular(delta, params.c_pop);
  GroupSet residual = d.pruned.set;
  const uint64_t m0 = residual.size();
  const double tau0 = m0 >= 2 ? static_cast<double>(log_exact(d.pruned.e4_after) / std::log(static_cast<long double>(m0))) - 2 : 0;
  uint64_t covered = 0;
  unsigned step = 0;
  while (static_cast<double>(covered) < params.coverage * static_cast<double>(m0)) {
    if (d.blocks.size() >= m0) {
      d.stop_reason = "block count reached M";
      break;
    }
    if (residual.size() < 2) {
      d.stop_reason = "residual exhausted";
      break;
    }
    if (!d.blocks.empty()) {
      const Exact e4 = energy_exact(residual, 4);
      const long double expect = std::pow(static_cast<long double>(residual.size()), 2.0L + tau0);
      if (std::exp(log_exact(e4)) < expect / 2)
        d.notes.push_back("block " + std::to_string(d.blocks.size()) + ": residual E_4 below M_j^(2+tau0)/2 (energy hypothesis violated)");
    }
    ExtractResult ex = extract_block(residual, params.extract, static_cast<unsigned>(d.blocks.size()), step);
    step += static_cast<unsigned>(ex.trace.size());
    d.trace.insert(d.trace.end(), ex.trace.begin(), ex.trace.end());
    if (!ex.block) {
      d.stop_reason = "stall: " + ex.stall_reason;
      break;
    }
    Block& b = *ex.block;
    covered += b.B.size();
    residual = residual.minus(b.B);
    if (!residual.symmetric()) throw std::logic_error("residual lost symmetry");
    d.blocks.push_back(std::move(b));
  }
  if (d.stop_reason.empty()) d.stop_reason = "coverage target reached";
  d.residual = residual;
  d.coverage = m0 ? static_cast<double>(covered) / static_cast<double>(m0) : 0.0;

  // α-band pigeonhole: factor-4 bands of |B_k|, maximal union.
  if (!d.blocks.empty() && m0 >= 2) {
    std::map<int, std::pair<uint64_t, std::vector<unsigned>>> bands;
    for (const Block& b : d.blocks) {
      const int band = (std::bit_width(b.B.size()) - 1) / 2;
      bands[band].first += b.B.size();
      bands[band].second.push_back(b.index);
    }
    auto best = bands.begin();
    for (auto it = bands.begin(); it != bands.end(); ++it)
      if (it->second.first >= best->second.first) best = it;
    d.alpha_band = best->second.second;
    uint64_t smallest = UINT64_MAX;
    for (unsigned i : d.alpha_band) smallest = std::min<uint64_t>(smallest, d.blocks[i].B.size());
    d.alpha_mode = 1.0 - std::log(static_cast<double>(smallest)) / std::log(static_cast<double>(m0));
  }
  return d;
}

ValidationReport verify_decomposition(const Decomposition& d) {
  ValidationReport rep;
  if (!(prune_popular(d.input, d.pruned.c_pop).set == d.pruned.set)) rep.fail("pruning does not reproduce");
  GroupSet residual = d.pruned.set;
  if (!d.pruned.set.is_subset_of(d.input)) rep.fail("pruned set is not a subset of the input");
  if (!d.pruned.set.symmetric()) rep.fail("pruned set is not symmetric");
  uint64_t total = 0;
  GroupSet seen(d.input.spec(), {});
  for (size_t j = 0; j < d.blocks.size(); ++j) {
    const Block& b = d.blocks[j];
    const std::string tag = "block " + std::to_string(j) + ": ";
    if (!b.H.symmetric()) rep.fail(tag + "H not symmetric");
    if (!b.X.symmetric()) rep.fail(tag + "X not symmetric");
    const GroupSet expect = sumset(b.X, b.H).intersect(residual);
    if (!(expect == b.B)) rep.fail(tag + "B != (X + H) ∩ residual");
    if (!b.B.is_subset_of(residual)) rep.fail(tag + "B not inside the residual");
    if (!seen.intersect(b.B).empty()) rep.fail(tag + "overlaps an earlier block");
    const uint64_t diff = difference_set(b.H, b.H).size();
    if (diff != b.diff_size) rep.fail(tag + "|H − H| mismatch");
    seen = seen.unite(b.B);
    total += b.B.size();
    residual = residual.minus(b.B);
    if (!residual.symmetric()) rep.fail(tag + "residual not symmetric");
  }
  if (!(residual == d.residual)) rep.fail("final residual mismatch");
  if (total + d.residual.size() != d.pruned.set.size()) rep.fail("coverage accounting: |Δ̃| != |residual| + Σ|B_j|");
  if (seen.size() != total) rep.fail("blocks not pairwise disjoint");
  return rep;
}

}  // namespace nonsmooth
