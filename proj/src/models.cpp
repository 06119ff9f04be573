#include "nonsmooth/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nonsmooth/config.hpp"

namespace nonsmooth {
namespace {

constexpr int kAttempts = 100;

uint64_t random_element(const GroupSpec& spec, std::mt19937_64& rng) { return uniform_below(rng, spec.order()); }

// k distinct members of `pool`, in pool order, via partial Fisher-Yates.
std::vector<uint64_t> sample_from(std::vector<uint64_t> pool, uint64_t k, std::mt19937_64& rng) {
  if (k > pool.size()) throw std::invalid_argument("sample larger than pool");
  for (uint64_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
  pool.resize(k);
  return pool;
}

// Random subgroup of `within` (itself a subgroup) with exactly `size` elements.
GroupSet random_subgroup_of(const GroupSet& within, uint64_t size, std::mt19937_64& rng) {
  const GroupSpec& spec = within.spec();
  if (size == 0 || within.size() % size != 0)
    throw std::invalid_argument("subgroup size " + std::to_string(size) + " does not divide " +
                                std::to_string(within.size()));
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<uint64_t> gens;
    GroupSet h(spec, {0});
    int misses = 0;
    while (h.size() < size && misses < 64) {
      const uint64_t g = within[uniform_below(rng, within.size())];
      if (h.contains(g)) continue;
      gens.push_back(g);
      GroupSet next = span_indices(spec, gens);
      if (next.size() <= size && size % next.size() == 0) {
        h = std::move(next);
      } else {
        gens.pop_back();
        ++misses;
      }
    }
    if (h.size() == size) return h;
  }
  throw std::runtime_error("could not find a subgroup of size " + std::to_string(size));
}

GroupSet whole_group(const GroupSpec& spec) {
  std::vector<uint64_t> all(spec.order());
  std::iota(all.begin(), all.end(), 0);
  return GroupSet(spec, std::move(all));
}

GroupSet translate(const GroupSet& h, uint64_t t) { return h.translated(t); }

}  // namespace

uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below(0)");
  // Reject the top partial block so every residue is equally likely.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  uint64_t v;
  do v = rng();
  while (v > limit);
  return v % n;
}

std::string to_string(Model m) {
  switch (m) {
    case Model::subgroup_random: return "subgroup_random";
    case Model::subgroup_plus_random: return "subgroup_plus_random";
    case Model::union_subgroups: return "union_subgroups";
    case Model::uniform: return "uniform";
  }
  return "?";
}

Model parse_model(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), '-', '_');
  for (Model m : {Model::subgroup_random, Model::subgroup_plus_random, Model::union_subgroups, Model::uniform})
    if (to_string(m) == t) return m;
  throw std::invalid_argument("unknown model '" + s + "'");
}

GroupSet random_subgroup(const GroupSpec& spec, uint64_t size, std::mt19937_64& rng) {
  require_dense(spec.order(), "random_subgroup");
  return random_subgroup_of(whole_group(spec), size, rng);
}

Generated generate(const ModelSpec& ms) {
  const GroupSpec& spec = ms.group;
  require_dense(spec.order(), "gen");
  std::mt19937_64 rng(ms.seed);
  Generated out;
  out.random_part = GroupSet(spec, {});
  std::vector<uint64_t> raw;

  switch (ms.model) {
    case Model::subgroup_random: {
      if (!(ms.density > 0 && ms.density <= 1)) throw std::invalid_argument("density must be in (0, 1]");
      const GroupSet h = random_subgroup(spec, ms.subgroup_size, rng);
      const uint64_t k = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(ms.density * h.size())));
      raw = sample_from(h.index_vector(), k, rng);
      out.subgroups.push_back(h);
      break;
    }
    case Model::subgroup_plus_random: {
      if (ms.random_size == 0) throw std::invalid_argument("random_size must be >= 1");
      const GroupSet h = random_subgroup(spec, ms.subgroup_size, rng);
      if (h.size() * ms.random_size > spec.order())
        throw std::invalid_argument("|H||R| exceeds the group order");
      // R has one element per coset of H; 0 is always included.
      std::vector<uint64_t> r{0};
      Indicator covered(h);
      int failures = 0;
      while (r.size() < ms.random_size) {
        const uint64_t g = random_element(spec, rng);
        if (covered.test(g)) {
          if (++failures > kAttempts * static_cast<int>(ms.random_size))
            throw std::runtime_error("could not place R in distinct cosets of H");
          continue;
        }
        r.push_back(g);
        for (uint64_t e : h) covered.set(spec.add(e, g));
      }
      out.random_part = GroupSet(spec, r);
      const GroupSet sum = sumset(h, out.random_part);
      if (sum.size() != h.size() * out.random_part.size()) throw std::logic_error("H + R is not free");
      raw = sum.index_vector();
      out.subgroups.push_back(h);
      break;
    }
    case Model::union_subgroups: {
      if (ms.count == 0) throw std::invalid_argument("count must be >= 1");
      if (ms.translates) {
        if (spec.elementary_two()) {
          // Distinct cosets of a random subgroup V of index >= count keep the
          // translates disjoint whatever the H_j look like.
          uint64_t index = 1;
          while (index < ms.count) index <<= 1;
          if (index * ms.subgroup_size > spec.order())
            throw std::invalid_argument("translates do not fit: count * |H| too large");
          const GroupSet v = random_subgroup(spec, spec.order() / index, rng);
          std::vector<uint64_t> reps;
          Indicator covered(v);
          reps.push_back(0);
          while (reps.size() < ms.count) {
            const uint64_t g = random_element(spec, rng);
            if (covered.test(g)) continue;
            reps.push_back(g);
            for (uint64_t e : v) covered.set(spec.add(e, g));
          }
          for (uint64_t j = 0; j < ms.count; ++j) {
            const GroupSet h = random_subgroup_of(v, ms.subgroup_size, rng);
            const uint64_t t = spec.add(reps[j], v[uniform_below(rng, v.size())]);
            out.subgroups.push_back(h);
            out.shifts.push_back(t);
          }
        } else {
          for (uint64_t j = 0; j < ms.count; ++j) {
            bool placed = false;
            for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
              const GroupSet h = random_subgroup(spec, ms.subgroup_size, rng);
              const uint64_t t = random_element(spec, rng);
              const GroupSet ht = translate(h, t);
              placed = true;
              for (size_t i = 0; i < out.subgroups.size() && placed; ++i)
                placed = translate(out.subgroups[i], out.shifts[i]).intersect(ht).empty();
              if (placed) {
                out.subgroups.push_back(h);
                out.shifts.push_back(t);
              }
            }
            if (!placed) throw std::runtime_error("could not place disjoint translates after 100 attempts");
          }
        }
      } else {
        for (uint64_t j = 0; j < ms.count; ++j) {
          bool placed = false;
          for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
            const GroupSet h = random_subgroup(spec, ms.subgroup_size, rng);
            placed = std::all_of(out.subgroups.begin(), out.subgroups.end(), [&](const GroupSet& o) {
              return o.intersect(h).size() <= ms.max_intersection;
            });
            if (placed) out.subgroups.push_back(h);
          }
          if (!placed)
            throw std::runtime_error("could not find subgroup " + std::to_string(j) + " with |H_i ∩ H_j| <= " +
                                     std::to_string(ms.max_intersection) + " after 100 attempts");
        }
        out.shifts.assign(ms.count, 0);
      }
      GroupSet acc(spec, {});
      for (size_t j = 0; j < out.subgroups.size(); ++j) acc = acc.unite(translate(out.subgroups[j], out.shifts[j]));
      for (size_t i = 0; i < out.subgroups.size(); ++i)
        for (size_t j = i + 1; j < out.subgroups.size(); ++j)
          out.max_overlap = std::max<uint64_t>(out.max_overlap, out.subgroups[i].intersect(out.subgroups[j]).size());
      raw = acc.index_vector();
      break;
    }
    case Model::uniform: {
      if (ms.random_size == 0 || ms.random_size > spec.order()) throw std::invalid_argument("bad uniform size");
      std::vector<uint64_t> picked;
      Indicator seen(spec, {});
      while (picked.size() < ms.random_size) {
        const uint64_t g = random_element(spec, rng);
        if (seen.test(g)) continue;
        seen.set(g);
        picked.push_back(g);
      }
      raw = std::move(picked);
      break;
    }
  }
  const GroupSet a(spec, std::move(raw));
  out.raw_size = a.size();
  out.set = symmetrize(a);
  return out;
}

std::optional<Exponents> expected_exponents(const ModelSpec& ms) {
  Exponents e;
  switch (ms.model) {
    case Model::uniform: return std::nullopt;
    case Model::subgroup_random: {
      const double n = std::max(1.0, std::round(ms.density * ms.subgroup_size));
      e.epsilon = n > 1 ? std::log(ms.subgroup_size / n) / std::log(n) : 0.0;
      e.tau_pred = 1 - e.epsilon;
      e.sigma_pred = 2 * e.epsilon;
      return e;
    }
    case Model::subgroup_plus_random: {
      const double n = static_cast<double>(ms.subgroup_size) * ms.random_size;
      e.epsilon = n > 1 ? std::log(static_cast<double>(ms.random_size)) / std::log(n) : 0.0;
      e.tau_pred = 1 - e.epsilon;
      e.sigma_pred = 0;
      return e;
    }
    case Model::union_subgroups: {
      const double n = static_cast<double>(ms.subgroup_size) * ms.count;
      e.epsilon = n > 1 ? 2 * std::log(static_cast<double>(ms.count)) / std::log(n) : 0.0;
      e.tau_pred = 1 - e.epsilon;
      e.sigma_pred = 0;
      return e;
    }
  }
  return std::nullopt;
}

}  // namespace nonsmooth
