#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "feasibility.hpp"
#include "geometry.hpp"
#include "tree.hpp"

namespace kcenter {

inline constexpr int kOracleMaxVertices = 2000;

// Every value that can be the optimum: 0, w(v)*d(v,u) for ordered pairs and,
// in the continuous variant, the balancing value of each pair.
template <class S>
std::vector<S> candidate_values(const Tree<S>& t, Variant var) {
  if (t.n > kOracleMaxVertices) throw std::length_error("oracle refuses trees above 2000 vertices");
  Adjacency<S> adj(t);
  std::vector<S> out{S(0)};
  for (int u = 0; u < t.n; ++u) {
    auto dist = distances_from(t, adj, u);
    const S& wu = t.weights[u];
    for (int v = u + 1; v < t.n; ++v) {
      const S& wv = t.weights[v];
      out.push_back(wu * dist[v]);
      out.push_back(wv * dist[v]);
      if (var == Variant::continuous && S(0) < wu + wv) out.push_back(wu * wv * dist[v] / (wu + wv));
    }
  }
  return out;
}

// Smallest candidate accepted by a monotone predicate; candidates are consumed.
template <class S>
std::optional<S> smallest_accepted(std::vector<S> cand, const std::function<bool(const S&)>& accept) {
  std::optional<S> best;
  std::span<S> live(cand);
  while (!live.empty()) {
    auto mid = live.begin() + live.size() / 2;
    std::nth_element(live.begin(), mid, live.end());
    S probe = *mid;
    if (accept(probe)) {
      best = probe;
      auto end = std::partition(live.begin(), live.end(), [&](const S& v) { return v < probe; });
      live = live.first(static_cast<std::size_t>(end - live.begin()));
    } else {
      auto begin = std::partition(live.begin(), live.end(), [&](const S& v) { return !(probe < v); });
      live = live.subspan(static_cast<std::size_t>(begin - live.begin()));
    }
  }
  return best;
}

template <class S>
S oracle_solve(const Tree<S>& t, long long k, Variant var) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  RootedTree<S> rt(t, 0);
  GreedyCover<S> greedy(rt);
  auto best = smallest_accepted<S>(candidate_values(t, var), [&](const S& lambda) {
    return greedy.count(lambda, var, k) <= k;
  });
  if (!best) throw std::logic_error("no candidate value is feasible");
  return *best;
}

// Lowest point above the lines lines[i..j] (inclusive) and an optional extra
// line, found by building their upper envelope from scratch. Leftmost
// minimizer; a flat ray reports its finite end, an all-flat set reports x=0.
template <class S>
Lowest<S> oracle_sublist_lowest(std::span<const Line<S>> lines, int i, int j,
                                const std::optional<std::type_identity_t<Line<S>>>& extra = std::nullopt) {
  if (i < 0 || j < i || j >= static_cast<int>(lines.size())) throw std::out_of_range("bad sublist range");
  if (j - i + 1 > 512) throw std::length_error("oracle sublist limited to 512 lines");
  std::vector<Line<S>> ls(lines.begin() + i, lines.begin() + j + 1);
  if (extra) ls.push_back(*extra);
  std::sort(ls.begin(), ls.end(), [](const Line<S>& p, const Line<S>& q) {
    return p.slope < q.slope || (p.slope == q.slope && q.intercept < p.intercept);
  });
  std::vector<Line<S>> env;
  for (const auto& l : ls) {
    if (!env.empty() && env.back().slope == l.slope) continue;
    while (env.size() >= 2) {
      const auto& p = env[env.size() - 2];
      const auto& q = env.back();
      if (crossing_x(p, q) < crossing_x(q, l)) break;
      env.pop_back();
    }
    env.push_back(l);
  }
  if (S(0) < env.front().slope || env.back().slope < S(0)) return std::nullopt;
  std::size_t p = 0;
  while (env[p].slope < S(0)) ++p;
  if (p == 0) {
    // flat line leads, rising lines follow
    if (env.size() == 1) return Point<S>{S(0), env[0].intercept};
    return Point<S>{crossing_x(env[0], env[1]), env[0].intercept};
  }
  S x = crossing_x(env[p - 1], env[p]);
  return Point<S>{x, env[p].at(x)};
}

template <class S>
S oracle_on_line(std::span<const Line<S>> lines, int i, int j, const S& x) {
  S best = lines[i].at(x);
  for (int q = i + 1; q <= j; ++q) best = std::max(best, lines[q].at(x));
  return best;
}

template <class S>
struct ArrangementVertex {
  S y{};
  int line_a = -1;
  int line_b = -1;
};

template <class S>
struct BoundaryPair {
  std::optional<ArrangementVertex<S>> lowest_feasible;
  std::optional<ArrangementVertex<S>> highest_infeasible;
};

// All pairwise crossings of non-parallel lines, with the y of each crossing.
template <class S>
std::vector<ArrangementVertex<S>> arrangement_vertices(std::span<const Line<S>> lines) {
  if (lines.size() > 512) throw std::length_error("oracle arrangement limited to 512 lines");
  std::vector<ArrangementVertex<S>> out;
  for (int a = 0; a < static_cast<int>(lines.size()); ++a) {
    for (int b = a + 1; b < static_cast<int>(lines.size()); ++b) {
      if (lines[a].slope == lines[b].slope) continue;
      out.push_back({lines[a].at(crossing_x(lines[a], lines[b])), a, b});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.y < q.y; });
  return out;
}

template <class S>
BoundaryPair<S> oracle_arrangement(std::span<const Line<S>> lines, const std::function<bool(const S&)>& feasible) {
  auto verts = arrangement_vertices(lines);
  std::size_t lo = 0, hi = verts.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(verts[mid].y)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  BoundaryPair<S> out;
  if (lo < verts.size()) {
    while (lo > 0 && verts[lo - 1].y == verts[lo].y) --lo;
    out.lowest_feasible = verts[lo];
  }
  if (lo > 0) out.highest_infeasible = verts[lo - 1];
  return out;
}

// Minimum number of vertex centers, by exhaustive subset search (tiny trees).
// Weight-0 vertices need no center.
template <class S>
int brute_discrete_min_centers(const Tree<S>& t, const S& lambda) {
  if (t.n > 16) throw std::length_error("exhaustive search limited to 16 vertices");
  Adjacency<S> adj(t);
  std::vector<unsigned> covers(t.n, 0);
  for (int c = 0; c < t.n; ++c) {
    auto dist = distances_from(t, adj, c);
    for (int v = 0; v < t.n; ++v) {
      if (!(lambda < t.weights[v] * dist[v])) covers[c] |= 1u << v;
    }
  }
  const unsigned all = (1u << t.n) - 1;
  unsigned free = 0;
  for (int v = 0; v < t.n; ++v) {
    if (t.weights[v] == S(0)) free |= 1u << v;
  }
  int best = t.n;
  for (unsigned set = 0; set < (1u << t.n); ++set) {
    int size = __builtin_popcount(set);
    if (size >= best) continue;
    unsigned got = free;
    for (int c = 0; c < t.n; ++c) {
      if (set >> c & 1u) got |= covers[c];
    }
    if (got == all) best = size;
  }
  return best;
}

}  // namespace kcenter
