#include <gtest/gtest.h>

#include <kcenter/oracle.hpp>
#include <kcenter/sublist_lp.hpp>

#include <random>

#include "support.hpp"

using namespace kcenter;
using kctest::Q;
using kctest::q;

namespace {

std::vector<Line<Q>> wedge3() { return {{q(1), q(0)}, {q(-1), q(0)}, {q(0), q(2)}}; }

std::vector<Line<Q>> random_planes(std::mt19937_64& rng, int m, int spread) {
  std::uniform_int_distribution<int> c(-spread, spread);
  std::vector<Line<Q>> out;
  for (int i = 0; i < m; ++i) out.push_back({q(c(rng), 1 + rng() % 3), q(c(rng))});
  return out;
}

}  // namespace

TEST(SublistLp, LowestExamples) {
  SublistLp<Q> lp(wedge3());
  EXPECT_EQ(lp.lowest(0, 1), (Point<Q>{q(0), q(0)}));
  EXPECT_EQ(lp.lowest(0, 2), (Point<Q>{q(-2), q(2)}));
  EXPECT_FALSE(lp.lowest(0, 0).has_value());
  EXPECT_THROW(lp.lowest(1, 0), std::out_of_range);
  EXPECT_THROW(lp.lowest(0, 3), std::out_of_range);
}

TEST(SublistLp, OnLineExamples) {
  SublistLp<Q> lp(wedge3());
  EXPECT_EQ(lp.on_line(0, 1, q(1)), q(1));
  EXPECT_EQ(lp.on_line(0, 2, q(0)), q(2));
  SublistLp<Q> one({{q(3), q(1)}});
  EXPECT_EQ(one.on_line(0, 0, q(2)), q(7));
}

TEST(SublistLp, ExtraPlaneExamples) {
  SublistLp<Q> lp(wedge3());
  EXPECT_EQ(lp.lowest(0, 0, Line<Q>{q(-1), q(0)}), (Point<Q>{q(0), q(0)}));
  EXPECT_EQ(lp.lowest(0, 1, Line<Q>{q(0), q(5)})->y, q(5));
  EXPECT_EQ(lp.lowest(0, 1, Line<Q>{q(0), q(-10)}), lp.lowest(0, 1));
}

TEST(SublistLp, BuildShapes) {
  SublistLp<Q> lp({{q(1), q(0)}, {q(-1), q(0)}});
  EXPECT_EQ(lp.chain(1).size(), 2u);
  SublistLp<Q> dup({{q(1), q(0)}, {q(1), q(0)}, {q(-1), q(0)}, {q(-1), q(0)}});
  EXPECT_EQ(dup.chain(1).size(), 2u);
  EXPECT_EQ(dup.lowest(0, 3), (Point<Q>{q(0), q(0)}));
  SublistLp<Q> single({{q(2), q(1)}});
  EXPECT_EQ(single.chain(1).size(), 1u);
  EXPECT_THROW(SublistLp<Q>({}), std::invalid_argument);
}

TEST(SublistLp, ChainsAreConvexAndCompact) {
  std::mt19937_64 rng(1);
  auto planes = random_planes(rng, 300, 50);
  SublistLp<Q> lp(planes);
  for (int id = 1; id < 4 * 300; ++id) {
    auto ch = lp.chain(id);
    for (std::size_t t = 1; t < ch.size(); ++t) EXPECT_LT(ch[t - 1].slope, ch[t].slope);
    for (std::size_t t = 2; t < ch.size(); ++t) EXPECT_LT(crossing_x(ch[t - 2], ch[t - 1]), crossing_x(ch[t - 1], ch[t]));
  }
  EXPECT_LE(lp.stored_lines(), 300u * 10u);
}

TEST(SublistLp, FlatRays) {
  // flat to the left, then rising
  SublistLp<Q> left({{q(0), q(1)}, {q(2), q(-3)}, {q(0), q(0)}});
  EXPECT_EQ(left.lowest(0, 2), (Point<Q>{q(2), q(1)}));
  // falling, then flat to the right
  SublistLp<Q> right({{q(-1), q(0)}, {q(0), q(-2)}});
  EXPECT_EQ(right.lowest(0, 1), (Point<Q>{q(2), q(-2)}));
  SublistLp<Q> flat({{q(0), q(1)}, {q(0), q(4)}});
  EXPECT_EQ(flat.lowest(0, 1), (Point<Q>{q(0), q(4)}));
}

TEST(SublistLp, MatchesOracleOnAllRanges) {
  std::mt19937_64 rng(42);
  for (int set = 0; set < 30; ++set) {
    int m = 1 + static_cast<int>(rng() % 48);
    auto planes = random_planes(rng, m, set % 3 == 0 ? 3 : 40);
    SublistLp<Q> lp(planes);
    std::span<const Line<Q>> ps(planes);
    Line<Q> extra = random_planes(rng, 1, 40)[0];
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        ASSERT_EQ(lp.lowest(i, j), oracle_sublist_lowest(ps, i, j)) << set << " " << i << " " << j;
        ASSERT_EQ(lp.lowest(i, j, extra), oracle_sublist_lowest(ps, i, j, extra));
        Q x = q(static_cast<long long>(rng() % 41) - 20, 3);
        ASSERT_EQ(lp.on_line(i, j, x), oracle_on_line(ps, i, j, x));
      }
    }
  }
}

TEST(SublistLp, FloatModeApproximatesExact) {
  std::mt19937_64 rng(9);
  auto planes = random_planes(rng, 64, 30);
  std::vector<Line<double>> fp;
  for (const auto& l : planes) fp.push_back({l.slope.to_double(), l.intercept.to_double()});
  SublistLp<Q> ex(planes);
  SublistLp<double> fl(fp);
  for (int i = 0; i < 64; i += 3) {
    for (int j = i; j < 64; j += 5) {
      auto a = ex.lowest(i, j);
      auto b = fl.lowest(i, j);
      ASSERT_EQ(a.has_value(), b.has_value());
      if (a) {
        EXPECT_NEAR(a->y.to_double(), b->y, 1e-9);
      }
    }
  }
}
