#include <gtest/gtest.h>

#include "nonsmooth/energy.hpp"
#include "nonsmooth/models.hpp"

using namespace nonsmooth;

namespace {

ModelSpec base_spec(Model m, const char* group) {
  ModelSpec s;
  s.model = m;
  s.group = GroupSpec::parse(group);
  s.seed = 5;
  return s;
}

}  // namespace

TEST(Models, UniformBelowIsInRangeAndStable) {
  std::mt19937_64 a(1), b(1);
  for (int i = 0; i < 1000; ++i) {
    const uint64_t x = uniform_below(a, 37);
    EXPECT_LT(x, 37u);
    EXPECT_EQ(x, uniform_below(b, 37));
  }
}

TEST(Models, DeterministicInSeed) {
  ModelSpec s = base_spec(Model::uniform, "Z3^5");
  s.random_size = 40;
  EXPECT_EQ(gen(s), gen(s));
  ModelSpec t = s;
  t.seed = 6;
  EXPECT_NE(gen(s), gen(t));
}

TEST(Models, TrivialCases) {
  ModelSpec s = base_spec(Model::union_subgroups, "Z2^10");
  s.subgroup_size = 64;
  s.count = 1;
  const Generated u = generate(s);
  EXPECT_EQ(u.set, u.subgroups.at(0));
  EXPECT_EQ(sumset(u.set, u.set), u.set);

  s.model = Model::subgroup_plus_random;
  s.random_size = 1;
  const Generated p = generate(s);
  EXPECT_EQ(p.set, p.subgroups.at(0));

  s.model = Model::subgroup_random;
  s.density = 1.0;
  const Generated r = generate(s);
  EXPECT_EQ(r.set, r.subgroups.at(0));
}

TEST(Models, SubgroupPlusRandomIsFree) {
  ModelSpec s = base_spec(Model::subgroup_plus_random, "Z2^14");
  s.subgroup_size = 256;
  s.random_size = 16;
  const Generated g = generate(s);
  EXPECT_EQ(g.set.size(), 256u * 16u);
  EXPECT_TRUE(g.random_part.contains(0));
  const HolderReport hr = holder_check(g.set);
  EXPECT_TRUE(hr.pass);
  // E_4(H + R) = |H|^3 #{r1 + r2 - r3 - r4 ∈ H}, at least E_4(H) E_4(R).
  const GroupSet& h = g.subgroups[0];
  const GroupSpec& z = g.set.spec();
  uint64_t q = 0;
  for (auto r1 : g.random_part)
    for (auto r2 : g.random_part)
      for (auto r3 : g.random_part)
        for (auto r4 : g.random_part) q += h.contains(z.sub(z.add(r1, r2), z.add(r3, r4)));
  const Exact e4 = energy_exact(g.set, 4);
  EXPECT_EQ(e4, Exact(h.size()) * h.size() * h.size() * q);
  EXPECT_GE(e4, energy_exact(h, 4) * energy_exact(g.random_part, 4));
}

TEST(Models, UnionSubgroupsReportsOverlaps) {
  ModelSpec s = base_spec(Model::union_subgroups, "Z2^12");
  s.subgroup_size = 16;
  s.count = 4;
  const Generated g = generate(s);
  EXPECT_LE(g.max_overlap, 1u);
  uint64_t sum = 0;
  for (const auto& h : g.subgroups) sum += h.size();
  EXPECT_EQ(g.set.size(), sum - (g.subgroups.size() - 1));
}

TEST(Models, TranslatesAreDisjoint) {
  ModelSpec s = base_spec(Model::union_subgroups, "Z2^12");
  s.subgroup_size = 64;
  s.count = 4;
  s.translates = true;
  const Generated g = generate(s);
  ASSERT_EQ(g.shifts.size(), 4u);
  EXPECT_EQ(g.set.size(), 4u * 64u);
}

TEST(Models, SymmetrizationOutsideCharacteristicTwo) {
  ModelSpec s = base_spec(Model::uniform, "Z/101");
  s.random_size = 20;
  const Generated g = generate(s);
  EXPECT_TRUE(g.set.symmetric());
  EXPECT_EQ(g.raw_size, 20u);
  EXPECT_LE(g.set.size(), 40u);
}

TEST(Models, InfeasibleRequestsThrow) {
  ModelSpec s = base_spec(Model::subgroup_random, "Z2^6");
  s.subgroup_size = 128;
  EXPECT_THROW(gen(s), std::invalid_argument);
  s.subgroup_size = 12;
  EXPECT_THROW(gen(s), std::invalid_argument);
}

TEST(Models, ExpectedExponents) {
  ModelSpec s = base_spec(Model::union_subgroups, "Z2^20");
  s.count = 8;
  s.subgroup_size = 4096;
  const auto u = expected_exponents(s);
  ASSERT_TRUE(u);
  EXPECT_NEAR(u->sigma_pred, 0.0, 1e-12);
  EXPECT_NEAR(u->tau_pred, 1 - u->epsilon, 1e-12);
  s.model = Model::subgroup_plus_random;
  s.subgroup_size = 65536;
  s.random_size = 256;
  const auto p = expected_exponents(s);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->epsilon, 8.0 / 24.0, 1e-12);
  EXPECT_NEAR(p->sigma_pred, 0.0, 1e-12);
  s.random_size = 1;
  EXPECT_NEAR(expected_exponents(s)->tau_pred, 1.0, 1e-12);
  s.model = Model::uniform;
  EXPECT_FALSE(expected_exponents(s));
}
