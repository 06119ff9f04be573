#include <gtest/gtest.h>

#include <random>

#include "nonsmooth/models.hpp"
#include "nonsmooth/structure.hpp"
#include "oracles.hpp"

using namespace nonsmooth;

namespace {

GroupSet random_symmetric(std::mt19937_64& rng, const GroupSpec& g, uint64_t m) {
  return symmetrize(GroupSet(g, oracle::random_subset(rng, g.order(), m)));
}

std::vector<GroupSet> corpus() {
  std::mt19937_64 rng(41);
  std::vector<GroupSet> out;
  out.push_back(symmetrize(GroupSet(GroupSpec({10}), {0, 1, 2})));
  out.push_back(random_symmetric(rng, GroupSpec(std::vector<uint64_t>(8, 2)), 40));
  out.push_back(random_symmetric(rng, GroupSpec({3, 3, 3, 3}), 20));
  out.push_back(random_symmetric(rng, GroupSpec({97}), 30));
  out.push_back(random_symmetric(rng, GroupSpec({4, 6, 5}), 25));
  ModelSpec ms;
  ms.group = GroupSpec(std::vector<uint64_t>(12, 2));
  ms.model = Model::subgroup_random;
  ms.subgroup_size = 256;
  ms.density = 0.5;
  ms.seed = 2;
  out.push_back(gen(ms));
  ms.model = Model::subgroup_plus_random;
  ms.subgroup_size = 64;
  ms.random_size = 6;
  out.push_back(gen(ms));
  return out;
}

}  // namespace

TEST(Structure, BaseAnalysisMatchesOracle) {
  const GroupSet a = symmetrize(GroupSet(GroupSpec({10}), {0, 1, 2}));
  const BaseAnalysis b = analyze_base(a);
  EXPECT_EQ(b.e4, oracle::quadruples({{10}}, a.index_vector()));
  EXPECT_NEAR(b.tau, std::log(static_cast<double>(b.e4)) / std::log(5.0) - 2, 1e-12);
  EXPECT_THROW(analyze_base(GroupSet(GroupSpec({10}), {3})), std::invalid_argument);
}

TEST(Structure, PigeonholeGuaranteeAndBucketAccounting) {
  for (const GroupSet& a : corpus()) {
    const BaseAnalysis base = analyze_base(a);
    const FindResult f = find_structure(base);
    const uint64_t m = a.size();
    const Exact r0 = base.r[0];
    const Exact off = base.e4 - r0 * r0;
    EXPECT_TRUE(f.guarantee_ok);
    EXPECT_GE(f.structure.graph_energy * dyadic_band_count(m), off);
    Exact mass = 0;
    uint64_t count = 0;
    for (const auto& k : f.buckets) {
      mass += k.mass;
      count += k.count;
      EXPECT_GT(k.count, 0u);
    }
    EXPECT_EQ(mass, off);
    const auto r = oracle::rep(oracle::Group{a.spec().factors()}, a.index_vector());
    uint64_t nonzero = 0;
    for (uint64_t x = 1; x < r.size(); ++x) nonzero += r[x] > 0;
    EXPECT_EQ(count, nonzero);
    // |G| and E(G) straight from the pair list.
    uint64_t gsize = 0, genergy = 0;
    for (uint64_t x : f.structure.D) {
      gsize += r[x];
      genergy += r[x] * r[x];
      EXPECT_GE(r[x], f.structure.bucket_lo);
      EXPECT_LT(r[x], 2 * f.structure.bucket_lo);
    }
    EXPECT_EQ(f.structure.graph_size, gsize);
    EXPECT_EQ(f.structure.graph_energy, genergy);
    EXPECT_TRUE(validate_structure(base, f.structure).pass);
    EXPECT_EQ(f.structure.D.symmetric(), true);
  }
}

TEST(Structure, DyadicBandCount) {
  EXPECT_EQ(dyadic_band_count(1), 1u);
  EXPECT_EQ(dyadic_band_count(2), 3u);
  EXPECT_EQ(dyadic_band_count(3), 5u);  // ⌈log2 9⌉ = 4
  EXPECT_EQ(dyadic_band_count(1024), 21u);
}

TEST(Structure, SubgroupGivesFullGraph) {
  const GroupSpec g(std::vector<uint64_t>(10, 2));
  const GroupSet h = span_indices(g, {1, 2, 4, 8, 16, 32});
  const BaseAnalysis base = analyze_base(h);
  const FindResult f = find_structure(base);
  EXPECT_TRUE(f.zero_admitted);
  EXPECT_EQ(f.structure.D, h);
  EXPECT_NEAR(f.structure.height, 0.0, 1e-12);
  EXPECT_NEAR(f.structure.tau, 1.0, 1e-12);
}

TEST(Structure, EnforceIsIdempotentAndNeverRaisesHeight) {
  for (const GroupSet& a : corpus()) {
    const BaseAnalysis base = analyze_base(a);
    const FindResult f = find_structure(base);
    const EnforceResult e1 = enforce_low_height(base, f.structure);
    const EnforceResult e2 = enforce_low_height(base, e1.structure);
    EXPECT_LE(e1.structure.height, f.structure.height + 1e-12);
    EXPECT_EQ(e2.structure.D, e1.structure.D);
    EXPECT_FALSE(e2.changed);
    EXPECT_TRUE(validate_structure(base, e1.structure).pass);
  }
}

TEST(Structure, ValidationCatchesTampering) {
  const GroupSet a = corpus()[1];
  const BaseAnalysis base = analyze_base(a);
  AdditiveStructure s = find_structure(base).structure;
  AdditiveStructure t = s;
  t.graph_energy += 1;
  EXPECT_FALSE(validate_structure(base, t).pass);
  t = s;
  t.height += 0.01;
  EXPECT_FALSE(validate_structure(base, t).pass);
  t = s;
  t.bucket_lo *= 4;
  EXPECT_FALSE(validate_structure(base, t).pass);
  EXPECT_TRUE(validate_structure(a, s).pass);
}

TEST(Structure, ChooseBandPrefersLargerBandOnTies) {
  // Z/8 with Δ = {0, ±1}: r(±1) = 2, r(±2) = 1; weights tie.  r(0) = 3 lies in
  // the chosen band [2, 4), so 0 is re-admitted.
  const GroupSet a(GroupSpec({8}), {0, 1, 7});
  const BaseAnalysis base = analyze_base(a);
  const auto choice = detail::choose_band(base, {1, 2, 6, 7}, {Exact(1), Exact(1), Exact(1), Exact(1)});
  EXPECT_EQ(choice.lo, 2u);
  EXPECT_EQ(choice.d, (std::vector<uint64_t>{0, 1, 7}));
  EXPECT_TRUE(choice.zero_admitted);
}
