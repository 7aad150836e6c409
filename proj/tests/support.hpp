#pragma once

#include <kcenter/rational.hpp>
#include <kcenter/tree.hpp>

#include <string>

namespace kctest {

using Q = kcenter::Rational;

inline Q q(long long num, long long den = 1) { return Q(num, den); }

inline kcenter::Tree<Q> tree_of(const std::string& text) { return kcenter::parse_instance<Q>(text).tree; }

}  // namespace kctest

#include <kcenter/oracle.hpp>
#include <kcenter/stem.hpp>

#include <random>

namespace kctest {

struct StemCase {
  kcenter::Stem<Q> stem;
  long long k = 1;
  Q optimum;
};

inline long long pick(std::mt19937_64& rng, long long lo, long long hi) {
  return std::uniform_int_distribution<long long>(lo, hi)(rng);
}

// Random stem with m backbone vertices and k in [1, m]. Attachments that break
// the thorn or twig conditions at the stem's own optimum are dropped until
// none do.
inline StemCase random_stem(std::mt19937_64& rng, int m, kcenter::Variant var) {
  using kcenter::Attachment;
  StemCase c;
  auto& st = c.stem;
  int next_id = m;
  Q x(0);
  for (int i = 0; i < m; ++i) {
    if (i > 0) x = x + Q(pick(rng, 1, 9));
    st.backbone.push_back(i);
    st.weight.push_back(Q(pick(rng, 0, 5) == 0 ? 0 : pick(rng, 1, 9)));
    st.x.push_back(x);
    std::optional<Attachment<Q>> thorn, twig;
    if (pick(rng, 0, 2) == 0) thorn = Attachment<Q>{next_id++, Q(pick(rng, 1, 9)), Q(pick(rng, 1, 9))};
    if (pick(rng, 0, 2) == 0) {
      const long long len = pick(rng, 5, 30);
      Attachment<Q> a{next_id++, Q(pick(rng, 1, 9)), Q(len)};
      if (var == kcenter::Variant::discrete) {
        const long long bl = pick(rng, 1, 30);
        if (bl >= len) {
          a.bud = a.vertex;
          a.bud_weight = a.weight;
          a.bud_length = a.length;
        } else {
          a.bud = next_id++;
          a.bud_weight = Q(pick(rng, 0, 9));
          a.bud_length = Q(bl);
        }
      }
      twig = a;
    }
    st.thorn.push_back(thorn);
    st.twig.push_back(twig);
  }
  c.k = pick(rng, 1, m);
  for (;;) {
    c.optimum = kcenter::oracle_solve(kcenter::stem_as_tree(st).tree, c.k, var);
    bool dropped = false;
    for (int i = 0; i < m; ++i) {
      if (auto& a = st.thorn[i]; a && !(a->weight * a->length < c.optimum)) {
        a.reset();
        dropped = true;
      }
      if (auto& a = st.twig[i]; a) {
        bool bad = a->weight * a->length < c.optimum;
        if (a->bud >= 0 && !(a->weight * (a->length - a->bud_length) < c.optimum)) bad = true;
        if (bad) {
          a.reset();
          dropped = true;
        }
      }
    }
    if (!dropped) return c;
  }
}

}  // namespace kctest

#include <kcenter/solver.hpp>

namespace kctest {

// Optimum of the reduced instance left by Phase 0, restricted to the range it
// was reduced for: the smallest candidate strictly inside that the reduced
// tree accepts with the remaining centers, or the range's upper end.
inline Q reduced_optimum(const kcenter::Solver<Q>& s, kcenter::Variant var) {
  auto t = s.working().as_tree();
  kcenter::RootedTree<Q> rt(t, 0);
  kcenter::GreedyCover<Q> greedy(rt);
  const long long k = s.remaining_k();
  const auto& range = s.range();
  std::optional<Q> best;
  for (const auto& c : kcenter::candidate_values(t, var)) {
    if (!range.contains(c) || (best && !(c < *best))) continue;
    if (k >= 0 && greedy.count(c, var, k) <= k) best = c;
  }
  return best ? *best : range.hi;
}

}  // namespace kctest
