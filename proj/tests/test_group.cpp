#include <gtest/gtest.h>

#include <random>

#include "nonsmooth/group_set.hpp"
#include "nonsmooth/set_io.hpp"
#include "oracles.hpp"

using namespace nonsmooth;

TEST(GroupSpec, ParsesProductsAndPowers) {
  EXPECT_EQ(GroupSpec::parse("Z2^3").factors(), (std::vector<uint64_t>{2, 2, 2}));
  EXPECT_EQ(GroupSpec::parse("Z/10").order(), 10u);
  EXPECT_EQ(GroupSpec::parse("Z3^2 x Z/5").factors(), (std::vector<uint64_t>{3, 3, 5}));
  EXPECT_TRUE(GroupSpec::parse("Z2^5").elementary_two());
  EXPECT_FALSE(GroupSpec::parse("Z2^2 x Z/4").elementary_two());
  EXPECT_EQ(GroupSpec::parse(GroupSpec::parse("Z3^2 x Z/5").to_string()), GroupSpec::parse("Z3^2xZ/5"));
  EXPECT_THROW(GroupSpec::parse("Q5"), std::invalid_argument);
  EXPECT_THROW(GroupSpec::parse(""), std::invalid_argument);
}

TEST(GroupSpec, ArithmeticMatchesOracle) {
  const GroupSpec g({4, 3, 5});
  const oracle::Group o{{4, 3, 5}};
  for (uint64_t x = 0; x < g.order(); ++x) {
    EXPECT_EQ(g.index(g.element(x)), x);
    EXPECT_EQ(g.neg(x), o.neg(x));
    for (uint64_t y = 0; y < g.order(); y += 7) {
      EXPECT_EQ(g.add(x, y), o.add(x, y));
      EXPECT_EQ(g.sub(x, y), o.sub(x, y));
    }
  }
}

TEST(GroupSpec, ShiftedAccumulationIsTranslation) {
  for (const auto& factors : {std::vector<uint64_t>{2, 2, 2, 2}, std::vector<uint64_t>{6, 4}, std::vector<uint64_t>{3, 5, 2}}) {
    const GroupSpec g(factors);
    const oracle::Group o{factors};
    std::vector<uint64_t> src(g.order());
    for (uint64_t i = 0; i < src.size(); ++i) src[i] = i * i + 1;
    for (uint64_t s = 0; s < g.order(); ++s) {
      std::vector<uint64_t> dst(g.order(), 0);
      g.accumulate_shifted<uint64_t>(src, dst, s);
      for (uint64_t y = 0; y < g.order(); ++y) ASSERT_EQ(dst[o.add(y, s)], src[y]);
    }
  }
}

TEST(GroupSet, CanonicalFormAndSetAlgebra) {
  const GroupSpec g({10});
  const GroupSet a(g, {2, 1, 2, 0});
  EXPECT_EQ(a.size(), 3u);
  EXPECT_FALSE(a.symmetric());
  const GroupSet s = symmetrize(a);
  EXPECT_EQ(s.index_vector(), (std::vector<uint64_t>{0, 1, 2, 8, 9}));
  EXPECT_TRUE(s.symmetric());
  EXPECT_EQ(a.negated().index_vector(), (std::vector<uint64_t>{0, 8, 9}));
  EXPECT_EQ(a.translated(9).index_vector(), (std::vector<uint64_t>{0, 1, 9}));
  EXPECT_TRUE(a.is_subset_of(s));
  EXPECT_EQ(s.minus(a).index_vector(), (std::vector<uint64_t>{8, 9}));
  EXPECT_EQ(sumset(a, a).size(), 5u);
  EXPECT_EQ(difference_set(a, a).index_vector(), (std::vector<uint64_t>{0, 1, 2, 8, 9}));
  EXPECT_EQ(a.position(2), std::optional<size_t>(2));
  EXPECT_FALSE(a.position(5));
}

TEST(GroupSet, SpanIsSubgroup) {
  const GroupSpec g({2, 2, 2, 2, 2});
  const GroupSet h = span_indices(g, {3, 5, 6});
  EXPECT_EQ(h.size(), 4u);  // 3 ^ 5 = 6
  EXPECT_EQ(sumset(h, h), h);
  const GroupSpec c({12});
  EXPECT_EQ(span_indices(c, {8}).size(), 3u);
}

TEST(SetIo, JsonRoundTripAndErrors) {
  const GroupSpec g({3, 3});
  const GroupSet a(g, {0, 4, 8});
  const auto loaded = parse_set_json(set_to_json(a));
  EXPECT_EQ(loaded.set, a);
  EXPECT_THROW(parse_set_json(nlohmann::json::parse(R"({"group":"Z3^2","elements":[[3,0]]})")), std::exception);
  const auto dup = parse_set_json(nlohmann::json::parse(R"({"group":"Z/5","elements":[[1],[1],[2]]})"));
  EXPECT_EQ(dup.duplicates, 1u);
  EXPECT_EQ(dup.set.size(), 2u);
  const auto text = parse_set_text("# group: Z/7\n1\n3\n");
  EXPECT_EQ(text.set.index_vector(), (std::vector<uint64_t>{1, 3}));
}
