#include <gtest/gtest.h>

#include <random>

#include "nonsmooth/config.hpp"
#include "nonsmooth/energy.hpp"
#include "nonsmooth/spectrum.hpp"
#include "oracles.hpp"

using namespace nonsmooth;

namespace {

GroupSet fixture() { return GroupSet(GroupSpec({10}), {0, 1, 2}); }

oracle::Big big(const Exact& v) { return oracle::Big(v.str()); }

}  // namespace

TEST(Energy, FixtureAgainstPolynomialCoefficients) {
  // (1 + t + t^2)^4 has no wraparound in Z/10, so E_8 is the sum of its squared coefficients.
  const std::vector<uint64_t> coef{1, 4, 10, 16, 19, 16, 10, 4, 1};
  uint64_t e8 = 0;
  for (auto c : coef) e8 += c * c;
  const GroupSet a = fixture();
  EXPECT_EQ(energy_exact(a, 8), e8);
  EXPECT_EQ(energy_exact(a, 4), 19u);
  EXPECT_EQ(energy_brute(a, 8), 1107u);
  EXPECT_EQ(oracle::quadruples({{10}}, {0, 1, 2}), 19u);
  const CountVector s4 = sum_count(a, 4);
  for (uint64_t x = 0; x < 9; ++x) EXPECT_EQ(s4[x], coef[x]);
}

TEST(Energy, FixtureRepresentationFunction) {
  const CountVector r = rep_function(fixture());
  const std::vector<uint64_t> want{3, 2, 1, 0, 0, 0, 0, 0, 1, 2};
  for (uint64_t x = 0; x < 10; ++x) EXPECT_EQ(r[x], want[x]) << x;
  EXPECT_EQ(r.sum_squares(), 19u);
  EXPECT_EQ(r.total(), 9u);
}

TEST(Energy, KernelsAgreeWithOracleOnRandomSets) {
  std::mt19937_64 rng(11);
  const std::vector<std::vector<uint64_t>> groups{{2, 2, 2, 2, 2, 2}, {3, 3, 3}, {37}, {4, 6}, {2, 3, 5}};
  for (const auto& f : groups) {
    const GroupSpec g(f);
    const oracle::Group o{f};
    for (int trial = 0; trial < 4; ++trial) {
      const uint64_t m = 1 + rng() % std::min<uint64_t>(14, g.order() - 1);
      const auto idx = oracle::random_subset(rng, g.order(), m);
      const GroupSet a(g, idx);
      for (unsigned order : {2u, 4u, 6u, 8u}) {
        const auto want = oracle::energy(o, idx, order);
        EXPECT_EQ(big(energy_exact(a, order, ExactKernel::convolution)), want);
        if (g.elementary_two()) EXPECT_EQ(big(energy_exact(a, order, ExactKernel::walsh)), want);
        EXPECT_EQ(big(energy_brute(a, order)), want);
        const SpectralEnergy sp = energy_spectral(a, order);
        ASSERT_TRUE(sp.rounded);
        EXPECT_EQ(big(*sp.rounded), want);
      }
      const auto r = oracle::rep(o, idx);
      const CountVector rv = rep_function(a);
      for (uint64_t x = 0; x < g.order(); ++x) ASSERT_EQ(rv[x], r[x]);
    }
  }
}

TEST(Energy, WalshRejectsOtherGroups) {
  const GroupSet a(GroupSpec({3, 3}), {0, 1});
  EXPECT_THROW(energy_exact(a, 4, ExactKernel::walsh), std::invalid_argument);
}

TEST(Energy, BruteBudgetIsEnforced) {
  std::mt19937_64 rng(3);
  const GroupSet a(GroupSpec(std::vector<uint64_t>(12, 2)), oracle::random_subset(rng, 4096, 64));
  EXPECT_THROW(energy_brute(a, 8, 1000), BudgetExceeded);
}

TEST(Energy, OrderValidation) {
  EXPECT_THROW(energy_exact(fixture(), 3), std::invalid_argument);
  EXPECT_THROW(energy_exact(fixture(), 10), std::invalid_argument);
}

TEST(Energy, HolderSandwichAndSubgroupEquality) {
  const GroupSpec g(std::vector<uint64_t>(8, 2));
  const GroupSet h = span_indices(g, {1, 2, 4, 8});
  const HolderReport rep = holder_check(h);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.lower_equality);
  EXPECT_NEAR(smoothing_exponent(h), 0.0, 1e-9);
  const HolderReport f = holder_check(fixture());
  EXPECT_TRUE(f.pass);
  EXPECT_FALSE(f.lower_equality);
  EXPECT_NEAR(smoothing_exponent(fixture()), (std::log(1107.0) - 3 * std::log(19.0) + 2 * std::log(3.0)) / std::log(3.0), 1e-9);
  // A forged E_8 below the lower bound must be rejected.
  EXPECT_FALSE(holder_check(3, 19, 100).pass);
  EXPECT_FALSE(holder_check(3, 19, 81 * 19 + 1).pass);
}

TEST(Energy, AsymmetricForms) {
  const GroupSpec g({10});
  const GroupSet b(g, {0, 1}), c(g, {0, 2});
  const AsymEnergy e = asym_energy(b, c);
  EXPECT_EQ(e.difference_form, 4u);
  EXPECT_EQ(e.sum_form, 4u);
  std::mt19937_64 rng(5);
  const oracle::Group o{{2, 2, 2, 2, 2, 2}};
  const GroupSpec z(o.n);
  for (int t = 0; t < 5; ++t) {
    const auto bi = oracle::random_subset(rng, 64, 9), ci = oracle::random_subset(rng, 64, 5);
    uint64_t want = 0;
    for (auto b1 : bi)
      for (auto c1 : ci)
        for (auto b2 : bi)
          for (auto c2 : ci)
            if (o.sub(b1, c1) == o.sub(b2, c2)) ++want;
    EXPECT_EQ(asym_energy(GroupSet(z, bi), GroupSet(z, ci)).difference_form, want);
  }
}

TEST(Energy, PopularityAgainstTripleEnumeration) {
  EXPECT_EQ(popularity(0, fixture()), 6u);
  std::mt19937_64 rng(17);
  for (const auto& f : {std::vector<uint64_t>{2, 2, 2, 2, 2, 2}, std::vector<uint64_t>{5, 9}}) {
    const GroupSpec g(f);
    const oracle::Group o{f};
    const auto idx = oracle::random_subset(rng, g.order(), 11);
    const GroupSet a(g, idx);
    const auto all = popularity_all(a, rep_function(a));
    for (size_t i = 0; i < idx.size(); ++i) {
      uint64_t want = 0;
      for (auto b : idx)
        for (auto c : idx)
          for (auto d : idx)
            if (o.sub(o.add(b, c), d) == idx[i]) ++want;
      EXPECT_EQ(popularity(idx[i], a), want);
      EXPECT_EQ(all[i], want);
    }
  }
}

TEST(Energy, ResultsDoNotDependOnThreadCount) {
  std::mt19937_64 rng(9);
  const GroupSet a(GroupSpec(std::vector<uint64_t>(12, 2)), oracle::random_subset(rng, 4096, 300));
  set_threads(1);
  const Exact e1 = energy_exact(a, 8, ExactKernel::convolution);
  const auto s1 = energy_spectral(a, 6);
  set_threads(4);
  EXPECT_EQ(energy_exact(a, 8, ExactKernel::convolution), e1);
  EXPECT_EQ(energy_exact(a, 8, ExactKernel::walsh), e1);
  EXPECT_EQ(energy_spectral(a, 6).value, s1.value);
  set_threads(1);
}

TEST(Spectrum, MatchesDirectCharacterSum) {
  std::mt19937_64 rng(21);
  for (const auto& f : {std::vector<uint64_t>{2, 2, 2, 2, 2}, std::vector<uint64_t>{3, 7}, std::vector<uint64_t>{4, 2, 3}}) {
    const GroupSpec g(f);
    const oracle::Group o{f};
    const auto idx = oracle::random_subset(rng, g.order(), g.order() / 3);
    const GroupSet a(g, idx);
    const SpectrumTable t = spectrum(a);
    ASSERT_EQ(t.values.size(), g.order());
    for (uint64_t xi = 0; xi < g.order(); ++xi)
      EXPECT_NEAR(t.values[xi], static_cast<double>(std::norm(oracle::fourier(o, idx, xi))), 1e-12);
    EXPECT_NEAR(static_cast<double>(t.plancherel_sum()), static_cast<double>(a.size()), 1e-9 * a.size());
  }
}
