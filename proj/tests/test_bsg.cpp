#include <gtest/gtest.h>

#include <random>

#include "nonsmooth/bsg.hpp"
#include "nonsmooth/models.hpp"
#include "oracles.hpp"

using namespace nonsmooth;

TEST(Bsg, QuadCountMatchesEnumeration) {
  std::mt19937_64 rng(8);
  const oracle::Group o{{2, 2, 2, 2, 2, 2}};
  const GroupSpec g(o.n);
  const auto bi = oracle::random_subset(rng, 64, 12), ci = oracle::random_subset(rng, 64, 6);
  uint64_t want = 0;
  for (auto b1 : bi)
    for (auto c1 : ci)
      for (auto b2 : bi)
        for (auto c2 : ci)
          if (o.add(b1, c1) == o.add(b2, c2)) ++want;
  const QuadCount q = quad_count(GroupSet(g, bi), GroupSet(g, ci));
  EXPECT_EQ(q.count, want);
  const double expect_eta = (2 * std::log(6.0) + std::log(12.0) - std::log(static_cast<double>(want))) / std::log(12.0);
  EXPECT_NEAR(q.eta_hat, expect_eta, 1e-12);
}

TEST(Bsg, DoublingRatio) {
  EXPECT_EQ(doubling_ratio(16, 16), 0.0);
  EXPECT_NEAR(doubling_ratio(16, 64), 0.5, 1e-12);
  EXPECT_TRUE(std::isinf(doubling_ratio(1, 5)));
}

TEST(Bsg, MeasureRecountsCover) {
  const GroupSpec g(std::vector<uint64_t>(6, 2));
  const GroupSet k = span_indices(g, {1, 2});
  const GroupSet b(g, {0, 1, 2, 3, 4, 5, 6, 7, 9}), c = k;
  const GroupSet x(g, {0, 4});
  const BsgMeasure m = measure_bsg(b, c, k, x, 0);
  EXPECT_EQ(m.cover_b, 8u);
  EXPECT_EQ(m.cover_c, 4u);
  EXPECT_EQ(m.diff_size, 4u);
  EXPECT_EQ(m.x_size, 2u);
}

TEST(Bsg, RecoversPlantedSubgroup) {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    ModelSpec ms;
    ms.model = Model::subgroup_plus_random;
    ms.group = GroupSpec(std::vector<uint64_t>(14, 2));
    ms.subgroup_size = 128;
    ms.random_size = 8;
    ms.seed = seed;
    const Generated gd = generate(ms);
    const GroupSet& h = gd.subgroups.at(0);
    const BsgCertificate cert = asym_bsg(gd.set, h);
    EXPECT_EQ(cert.verdict, BsgVerdict::strong) << cert.reason;
    EXPECT_LE(cert.K.minus(h).size() + h.minus(cert.K).size(), h.size() / 10);
    const BsgMeasure m = measure_bsg(cert.B, cert.C, cert.K, cert.X, cert.x0);
    EXPECT_EQ(m.cover_b, cert.measured.cover_b);
    EXPECT_EQ(grade(cert.B, cert.C, m, cert.params), cert.verdict);
  }
}

TEST(Bsg, RandomSetsAreNotStrong) {
  std::mt19937_64 rng(12);
  const GroupSpec g(std::vector<uint64_t>(14, 2));
  for (int t = 0; t < 3; ++t) {
    const GroupSet b(g, oracle::random_subset(rng, g.order(), 1024));
    const GroupSet c(g, oracle::random_subset(rng, g.order(), 128));
    EXPECT_NE(asym_bsg(b, c).verdict, BsgVerdict::strong);
  }
}

TEST(Bsg, VerdictNames) {
  for (auto v : {BsgVerdict::strong, BsgVerdict::weak, BsgVerdict::fail}) EXPECT_EQ(parse_bsg_verdict(to_string(v)), v);
}
