#include <gtest/gtest.h>

#include <kcenter/feasibility.hpp>
#include <kcenter/oracle.hpp>

#include <functional>

#include "support.hpp"

using namespace kcenter;
using kctest::Q;
using kctest::q;

namespace {

Tree<Q> two_path(long long w1, long long w2, long long len) {
  return kctest::tree_of("2 1\n" + std::to_string(w1) + " " + std::to_string(w2) + "\n1 2 " + std::to_string(len) + "\n");
}

// Every positive-weight vertex lies within lambda of its assigned center.
void expect_valid_cover(const Tree<Q>& t, const FeasibilityOutcome<Q>& out, const Q& lambda) {
  Adjacency<Q> adj(t);
  ASSERT_EQ(static_cast<long long>(out.centers.size()), out.count);
  for (int v = 0; v < t.n; ++v) {
    if (t.weights[v] == Q(0)) continue;
    ASSERT_GE(out.cover[v], 0);
    Q d = placement_distance(t, adj, out.centers[out.cover[v]], v);
    EXPECT_LE(t.weights[v] * d, lambda) << "vertex " << v;
  }
}

// A center position on the tree as (edge endpoint, other endpoint, offset).
struct Spot {
  int a;
  int b;
  Q off;
};

// Vertices plus every balancing point between two vertices.
std::vector<Spot> candidate_spots(const Tree<Q>& t) {
  std::vector<Spot> out;
  for (int v = 0; v < t.n; ++v) out.push_back({v, -1, Q(0)});
  for (int u = 0; u < t.n; ++u) {
    RootedTree<Q> rt(t, u);
    for (int v = 0; v < t.n; ++v) {
      Q ws = t.weights[u] + t.weights[v];
      if (v == u || ws == Q(0)) continue;
      Q along = t.weights[v] * rt.rootdist(v) / ws;
      int x = v;
      while (rt.parent(x) != -1 && along <= rt.rootdist(rt.parent(x))) x = rt.parent(x);
      if (rt.parent(x) == -1) continue;
      out.push_back({rt.parent(x), x, along - rt.rootdist(rt.parent(x))});
    }
  }
  return out;
}

int brute_continuous_min_centers(const Tree<Q>& t, const Q& lambda) {
  Adjacency<Q> adj(t);
  std::vector<std::vector<Q>> dist;
  for (int v = 0; v < t.n; ++v) dist.push_back(distances_from(t, adj, v));
  std::vector<unsigned> masks;
  for (const auto& s : candidate_spots(t)) {
    unsigned m = 0;
    for (int v = 0; v < t.n; ++v) {
      Q d = dist[s.a][v] + s.off;
      if (s.b >= 0) d = std::min(d, dist[s.b][v] + dist[s.a][s.b] - s.off);
      if (t.weights[v] * d <= lambda) m |= 1u << v;
    }
    masks.push_back(m);
  }
  const unsigned all = (1u << t.n) - 1;
  unsigned free = 0;
  for (int v = 0; v < t.n; ++v) {
    if (t.weights[v] == Q(0)) free |= 1u << v;
  }
  std::function<bool(unsigned, int)> can = [&](unsigned got, int left) {
    if (got == all) return true;
    if (left == 0) return false;
    int first = __builtin_ctz(~got);
    for (unsigned m : masks) {
      if ((m >> first & 1u) && can(got | m, left - 1)) return true;
    }
    return false;
  };
  for (int s = 0;; ++s) {
    if (can(free, s)) return s;
  }
}

}  // namespace

TEST(Ftest0, TwoVertexPathExamples) {
  RootedTree<Q> rt(two_path(1, 1, 2), 1);
  auto out = ftest0(rt, q(1), 1);
  EXPECT_TRUE(out.feasible);
  EXPECT_EQ(out.count, 1);
  ASSERT_EQ(out.centers.size(), 1u);
  EXPECT_EQ(out.centers[0].vertex, 0);
  EXPECT_EQ(out.centers[0].toward, 1);
  EXPECT_EQ(out.centers[0].offset, q(1));
  auto tight = ftest0(rt, q(9, 10), 1);
  EXPECT_FALSE(tight.feasible);
  EXPECT_EQ(tight.count, 2);
}

TEST(Ftest0, SingleVertexAtZero) {
  RootedTree<Q> rt(kctest::tree_of("1 1\n5\n"), 0);
  auto out = ftest0(rt, q(0), 1);
  EXPECT_TRUE(out.feasible);
  EXPECT_EQ(out.count, 1);
  EXPECT_EQ(out.centers[0].vertex, 0);
  EXPECT_LT(out.centers[0].toward, 0);
}

TEST(Dftest0, TwoVertexPathExamples) {
  RootedTree<Q> rt(two_path(1, 3, 4), 1);
  auto out = dftest0(rt, q(4), 1);
  EXPECT_TRUE(out.feasible);
  EXPECT_EQ(out.count, 1);
  EXPECT_EQ(out.centers[0].vertex, 1);
  auto tight = dftest0(rt, q(39, 10), 1);
  EXPECT_FALSE(tight.feasible);
  EXPECT_EQ(tight.count, 2);
  EXPECT_EQ(tight.centers[0].vertex, 0);
  EXPECT_EQ(tight.centers[1].vertex, 1);
  EXPECT_EQ(dftest0(RootedTree<Q>(kctest::tree_of("1 1\n5\n"), 0), q(0), 1).count, 1);
}

TEST(Ftest0, ZeroWeightVerticesNeedNoCenter) {
  auto t = kctest::tree_of("3 1\n0 0 0\n1 2 1\n2 3 1\n");
  RootedTree<Q> rt(t, 0);
  EXPECT_EQ(ftest0(rt, q(0), 1).count, 0);
  auto mixed = kctest::tree_of("3 1\n0 2 0\n1 2 1\n2 3 1\n");
  auto out = ftest0(RootedTree<Q>(mixed, 0), q(0), 1);
  EXPECT_EQ(out.count, 1);
  for (int v = 0; v < 3; ++v) EXPECT_EQ(out.cover[v], 0);
}

TEST(Ftest0, MonotoneAndValidOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto t = random_tree<Q>({.n = 2 + static_cast<int>(seed % 50), .seed = seed, .weight_min = 0, .weight_max = 9,
                             .length_max = 9, .shape = static_cast<Shape>(seed % 4)});
    RootedTree<Q> rt(t, static_cast<int>(seed % t.n));
    for (Variant var : {Variant::continuous, Variant::discrete}) {
      long long prev = t.n + 1;
      for (int step = 0; step <= 40; ++step) {
        Q lambda = q(step, 2);
        auto out = GreedyCover<Q>(rt).run(lambda, var, 1);
        EXPECT_LE(out.count, prev);
        prev = out.count;
        expect_valid_cover(t, out, lambda);
        if (var == Variant::discrete) {
          for (const auto& c : out.centers) EXPECT_LT(c.toward, 0);
        }
      }
    }
  }
}

TEST(Ftest0, CountMatchesEarlyExitCount) {
  auto t = random_tree<Q>({.n = 300, .seed = 5});
  RootedTree<Q> rt(t, 0);
  GreedyCover<Q> g(rt);
  for (int step = 1; step < 30; ++step) {
    long long full = g.run(q(step), Variant::continuous, 1).count;
    EXPECT_EQ(g.count(q(step), Variant::continuous), full);
    long long cut = g.count(q(step), Variant::continuous, 3);
    EXPECT_EQ(cut <= 3, full <= 3);
  }
}

TEST(Dftest0, CountIsOptimalOnTinyTrees) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    auto t = random_tree<Q>({.n = 1 + static_cast<int>(seed % 12), .seed = seed, .weight_min = 0, .weight_max = 5,
                             .length_max = 6});
    RootedTree<Q> rt(t, static_cast<int>(seed % t.n));
    for (int step = 0; step < 24; step += 3) {
      Q lambda = q(step, 1);
      EXPECT_EQ(dftest0(rt, lambda, 1).count, brute_discrete_min_centers(t, lambda)) << "seed " << seed;
    }
  }
}

TEST(Ftest0, CountIsOptimalOnTinyTrees) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto t = random_tree<Q>({.n = 1 + static_cast<int>(seed % 10), .seed = seed, .weight_min = 0, .weight_max = 5,
                             .length_max = 6});
    RootedTree<Q> rt(t, static_cast<int>(seed % t.n));
    for (int step = 0; step < 16; step += 3) {
      Q lambda = q(step, 2);
      EXPECT_EQ(ftest0(rt, lambda, 1).count, brute_continuous_min_centers(t, lambda)) << "seed " << seed;
    }
  }
}
