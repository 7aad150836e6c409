#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "arrangement.hpp"
#include "feasibility.hpp"
#include "geometry.hpp"
#include "scalar.hpp"
#include "sorted_matrix.hpp"
#include "sublist_lp.hpp"
#include "tree.hpp"

namespace kcenter {

// A vertex hanging off a backbone vertex. A discrete twig routes through a
// bud that holds a center; bud == vertex when the two coincide.
template <class S>
struct Attachment {
  int vertex = -1;
  S weight{};
  S length{};  // distance to the backbone vertex
  int bud = -1;
  S bud_weight{};
  S bud_length{};
};

// A path of backbone vertices, lowest first, with at most one thorn and one
// twig per backbone vertex.
template <class S>
struct Stem {
  std::vector<int> backbone;
  std::vector<S> weight;
  std::vector<S> x;  // distance from the lowest backbone vertex
  std::vector<std::optional<Attachment<S>>> thorn;
  std::vector<std::optional<Attachment<S>>> twig;

  int size() const { return static_cast<int>(backbone.size()); }
  int top() const { return backbone.back(); }
  const S& length() const { return x.back(); }
  int twig_count() const {
    return static_cast<int>(std::count_if(twig.begin(), twig.end(), [](const auto& a) { return a.has_value(); }));
  }
};

// ---------------------------------------------------------------------------
// Stem as a standalone tree

template <class S>
struct StemTree {
  Tree<S> tree;
  std::vector<int> original;  // local id -> vertex id carried by the stem
  std::vector<bool> bud;  // a bud that is not also its twig vertex
  int root = 0;  // local id of the top vertex; backbone i has local id i
};

template <class S>
StemTree<S> stem_as_tree(const Stem<S>& st) {
  StemTree<S> out;
  auto add = [&](int id, const S& w, bool is_bud) {
    out.original.push_back(id);
    out.bud.push_back(is_bud);
    out.tree.weights.push_back(w);
    return static_cast<int>(out.original.size()) - 1;
  };
  auto& edges = out.tree.edges;
  const int m = st.size();
  for (int i = 0; i < m; ++i) add(st.backbone[i], st.weight[i], false);
  for (int i = 0; i + 1 < m; ++i) edges.push_back({i, i + 1, st.x[i + 1] - st.x[i]});
  for (int i = 0; i < m; ++i) {
    if (const auto& a = st.thorn[i]; a && a->vertex != st.backbone[i]) {
      edges.push_back({add(a->vertex, a->weight, false), i, a->length});
    }
    if (const auto& a = st.twig[i]) {
      int anchor = i;
      S rest = a->length;
      if (a->bud >= 0) {
        anchor = add(a->bud, a->bud_weight, a->bud != a->vertex);
        edges.push_back({anchor, i, a->bud_length});
        if (a->bud == a->vertex) continue;
        rest = a->length - a->bud_length;
      }
      edges.push_back({add(a->vertex, a->weight, false), anchor, rest});
    }
  }
  out.tree.n = static_cast<int>(out.original.size());
  out.root = m - 1;
  return out;
}

// ---------------------------------------------------------------------------
// Lines

// Slope w, crossing zero at x0.
template <class S>
Line<S> rising_through(const S& w, const S& x0) {
  return {w, S(0) - w * x0};
}

// Slope -w, crossing zero at x0.
template <class S>
Line<S> falling_through(const S& w, const S& x0) {
  return {S(0) - w, w * x0};
}

enum LineKind : int { backbone_up = 0, backbone_down, thorn_up, thorn_down, twig_up, twig_down };

template <class S>
struct StemLines {
  std::vector<TaggedLine<S>> lines;
  std::vector<std::array<int, 6>> slot;  // per backbone index and LineKind: position in `lines`, or -1
};

// Rising lines sort to the far right of a level when horizontal, falling ones
// to the far left. Tags are tag_base + position.
template <class S>
StemLines<S> stem_lines(const Stem<S>& st, int tag_base = 0) {
  StemLines<S> out;
  const int m = st.size();
  out.slot.assign(m, {-1, -1, -1, -1, -1, -1});
  auto push = [&](int i, int kind, Line<S> l) {
    const int pos = static_cast<int>(out.lines.size());
    const bool up = kind % 2 == 0;
    out.lines.push_back({std::move(l), tag_base + pos, up ? 1 : -1});
    out.slot[i][kind] = pos;
  };
  for (int i = 0; i < m; ++i) {
    const S& xi = st.x[i];
    push(i, backbone_up, rising_through(st.weight[i], xi));
    push(i, backbone_down, falling_through(st.weight[i], xi));
    if (const auto& a = st.thorn[i]) {
      push(i, thorn_up, rising_through(a->weight, xi - a->length));
      push(i, thorn_down, falling_through(a->weight, xi + a->length));
    }
    if (const auto& a = st.twig[i]) {
      push(i, twig_up, rising_through(a->weight, xi - a->length));
      push(i, twig_down, falling_through(a->weight, xi + a->length));
    }
  }
  return out;
}

// Four upper half-planes per backbone slot: the vertex pair, then the thorn
// pair (the x-axis twice when there is no thorn).
template <class S>
std::vector<Line<S>> stem_half_planes(const Stem<S>& st, std::span<const int> slots, std::span<const char> with_thorn) {
  std::vector<Line<S>> planes;
  planes.reserve(4 * slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const int i = slots[s];
    const S& xi = st.x[i];
    planes.push_back(rising_through(st.weight[i], xi));
    planes.push_back(falling_through(st.weight[i], xi));
    if (with_thorn[s] && st.thorn[i]) {
      const auto& a = *st.thorn[i];
      planes.push_back(rising_through(a.weight, xi - a.length));
      planes.push_back(falling_through(a.weight, xi + a.length));
    } else {
      planes.push_back({S(0), S(0)});
      planes.push_back({S(0), S(0)});
    }
  }
  return planes;
}

template <class S>
std::vector<Line<S>> stem_half_planes(const Stem<S>& st) {
  std::vector<int> slots(st.size());
  std::iota(slots.begin(), slots.end(), 0);
  std::vector<char> all(st.size(), 1);
  return stem_half_planes(st, slots, all);
}

// ---------------------------------------------------------------------------
// Candidate matrices

// Weighted distance from every stem vertex to the top vertex, largest first.
template <class S>
SortedMatrix<S> top_distance_array(const Stem<S>& st) {
  auto vals = std::make_shared<std::vector<S>>();
  const S& xm = st.length();
  for (int i = 0; i + 1 < st.size(); ++i) {
    vals->push_back(st.weight[i] * (xm - st.x[i]));
    if (const auto& a = st.thorn[i]) vals->push_back(a->weight * (xm - st.x[i] + a->length));
    if (const auto& a = st.twig[i]) vals->push_back(a->weight * (xm - st.x[i] + a->length));
  }
  const int m = st.size();
  if (const auto& a = st.thorn[m - 1]) vals->push_back(a->weight * a->length);
  if (const auto& a = st.twig[m - 1]) vals->push_back(a->weight * a->length);
  std::sort(vals->begin(), vals->end(), [](const S& a, const S& b) { return b < a; });
  const int t = static_cast<int>(vals->size());
  return {t == 0 ? 0 : 1, t, [vals](int, int j) { return (*vals)[j]; }};
}

// Lowest-point matrix over backbone ranges, two arrays per twig and the
// distances to the top, all with nonincreasing rows and columns.
template <class S>
std::vector<SortedMatrix<S>> continuous_stem_matrices(const Stem<S>& st) {
  auto lp = std::make_shared<const SublistLp<S>>(stem_half_planes(st));
  const int m = st.size();
  std::vector<SortedMatrix<S>> out;
  out.push_back({m, m, [lp, m](int i, int j) {
                   return i + j <= m - 1 ? lp->lowest(4 * i, 4 * (m - 1 - j) + 3)->y : S(0);
                 }});
  for (int i = 0; i < m; ++i) {
    const auto& a = st.twig[i];
    if (!a) continue;
    Line<S> up = rising_through(a->weight, st.x[i] - a->length);
    Line<S> down = falling_through(a->weight, st.x[i] + a->length);
    out.push_back({1, m - i, [lp, m, i, up](int, int j) { return lp->lowest(4 * i, 4 * (m - 1 - j) + 3, up)->y; }});
    out.push_back({1, i + 1, [lp, i, down](int, int j) { return lp->lowest(4 * j, 4 * i + 3, down)->y; }});
  }
  out.push_back(top_distance_array(st));
  return out;
}

template <class S>
struct AxisPoint {
  S x{};
  S weight{};
};

// Backbone vertices plus both reflections of every attached vertex, by x.
template <class S>
std::vector<AxisPoint<S>> discrete_points(const Stem<S>& st) {
  std::vector<AxisPoint<S>> pts;
  auto mirror = [&](const S& xi, const S& d, const S& w) {
    pts.push_back({xi - d, w});
    pts.push_back({xi + d, w});
  };
  for (int i = 0; i < st.size(); ++i) {
    const S& xi = st.x[i];
    pts.push_back({xi, st.weight[i]});
    if (const auto& a = st.thorn[i]) mirror(xi, a->length, a->weight);
    if (const auto& a = st.twig[i]) {
      if (a->bud >= 0) mirror(xi, a->bud_length, a->bud_weight);
      if (a->bud != a->vertex) mirror(xi, a->length, a->weight);
    }
  }
  std::sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) { return p.x < q.x; });
  return pts;
}

// Weighted distances from each point to every point right of it and left of
// it, one nonincreasing row each. Weight-0 points only produce zeros.
template <class S>
std::vector<SortedMatrix<S>> discrete_stem_arrays(const Stem<S>& st) {
  auto pts = std::make_shared<const std::vector<AxisPoint<S>>>(discrete_points(st));
  const int t = static_cast<int>(pts->size());
  std::vector<SortedMatrix<S>> out;
  for (int i = 0; i < t; ++i) {
    if ((*pts)[i].weight == S(0)) continue;
    out.push_back({1, t - i, [pts, t, i](int, int j) {
                     const auto& p = *pts;
                     return p[i].weight * (p[t - 1 - j].x - p[i].x);
                   }});
    out.push_back({1, i + 1, [pts, i](int, int j) {
                     const auto& p = *pts;
                     return p[i].weight * (p[i].x - p[j].x);
                   }});
  }
  return out;
}

template <class S>
std::vector<SortedMatrix<S>> stem_matrices(const Stem<S>& st, Variant var) {
  return var == Variant::continuous ? continuous_stem_matrices(st) : discrete_stem_arrays(st);
}

// Every element of a matrix family, for enumeration checks on small stems.
template <class S>
std::vector<S> enumerate_matrices(std::span<const SortedMatrix<S>> ms) {
  std::vector<S> out;
  for (const auto& m : ms) {
    for (int i = 0; i < m.rows; ++i) {
      for (int j = 0; j < m.cols; ++j) out.push_back(m.eval(i, j));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standalone stem problems

namespace detail {

// Greedy test on the stem rooted at its top, plus a bracket (0, hi] with hi
// feasible. Returns nullopt when 0 is already feasible.
template <class S>
struct StemProblem {
  StemTree<S> sts;
  RootedTree<S> rt;
  GreedyCover<S> greedy;
  Variant var;
  long long k;

  StemProblem(const Stem<S>& st, long long k_, Variant v)
      : sts(stem_as_tree(st)), rt(sts.tree, sts.root), greedy(rt), var(v), k(k_) {}

  bool feasible(const S& lambda) { return greedy.count(lambda, var, k) <= k; }

  S upper() const {
    S wmax(0), total(0);
    for (const auto& w : sts.tree.weights) {
      if (wmax < w) wmax = w;
    }
    for (const auto& e : sts.tree.edges) total = total + e.length;
    return wmax * total;
  }
};

}  // namespace detail

// Optimum of the continuous k-center problem on a stem by arrangement search
// over its lines.
template <class S>
S solve_stem_by_lines(const Stem<S>& st, long long k) {
  detail::StemProblem<S> pb(st, k, Variant::continuous);
  if (pb.feasible(S(0))) return S(0);
  auto sl = stem_lines(st);
  std::vector<Line<S>> plain;
  for (const auto& l : sl.lines) plain.push_back(l.line);
  std::function<bool(const S&)> tester = [&pb](const S& v) { return pb.feasible(v); };
  auto res = find_boundary_vertices<S>(plain, tester, LambdaRange<S>{S(0), pb.upper()}, 1);
  return *res.hi;
}

// Optimum of the k-center problem on a stem by matrix search over its
// candidate matrices.
template <class S>
S solve_stem_by_matrices(const Stem<S>& st, long long k, Variant var) {
  detail::StemProblem<S> pb(st, k, var);
  if (pb.feasible(S(0))) return S(0);
  auto ms = stem_matrices(st, var);
  std::function<bool(const S&)> tester = [&pb](const S& v) { return pb.feasible(v); };
  return msearch<S>(ms, LambdaRange<S>{S(0), pb.upper()}, 0, tester).range.hi;
}

// ---------------------------------------------------------------------------
// Replacing a leaf-stem

template <class S>
struct Replacement {
  enum class Kind { none, thorn, twig };
  Kind kind = Kind::none;
  Attachment<S> attachment;  // hangs off the top vertex
  long long centers_used = 0;
};

// Runs the greedy cover on the stem rooted at its top and summarizes the
// stem as one attachment at the top. `rank` is indexed by vertex id.
template <class S>
Replacement<S> postprocess(const Stem<S>& st, const S& lambda, std::span<const int> rank, Variant var) {
  auto sts = stem_as_tree(st);
  RootedTree<S> rt(sts.tree, sts.root);
  GreedyCover<S> greedy(rt);
  auto oc = greedy.run_open(lambda, var);
  const int n = sts.tree.n;
  const int z = sts.root;

  std::vector<char> member(n, 0);
  for (int v : oc.pending) member[v] = 1;
  auto pick = [&]() {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!member[v] || v == z || sts.bud[v] || rt.weight(v) == S(0)) continue;
      if (best < 0 || rank[sts.original[v]] > rank[sts.original[best]]) best = v;
    }
    return best;
  };
  auto attach = [&](int v) {
    Attachment<S> a;
    a.vertex = sts.original[v];
    a.weight = rt.weight(v);
    a.length = rt.rootdist(v);
    return a;
  };

  Replacement<S> out;
  const long long placed = static_cast<long long>(oc.centers.size());
  if (oc.sup <= oc.dem) {
    out.centers_used = placed;
    if (oc.sup_center < 0) return out;
    const int q = oc.sup_center;
    for (int v = 0; v < n; ++v) {
      if (oc.cover[v] == q) member[v] = 1;
    }
    const int u = pick();
    if (u < 0) throw std::logic_error("covering center has no assigned vertex");
    out.kind = Replacement<S>::Kind::twig;
    out.centers_used = placed - 1;
    out.attachment = attach(u);
    if (var == Variant::discrete) {
      const int b = oc.centers[q].vertex;
      out.attachment.bud = sts.original[b];
      out.attachment.bud_weight = rt.weight(b);
      out.attachment.bud_length = rt.rootdist(b);
    }
    return out;
  }
  int u = pick();
  if (u < 0) u = z;
  out.kind = Replacement<S>::Kind::thorn;
  out.centers_used = placed;
  out.attachment = attach(u);
  return out;
}

// Checks the attachment invariants against the maintained range.
template <class S>
void check_attachment(const Replacement<S>& rep, const LambdaRange<S>& range) {
  if constexpr (!ScalarTraits<S>::exact) return;
  const auto& a = rep.attachment;
  if (rep.kind == Replacement<S>::Kind::thorn && range.lo < a.weight * a.length) {
    throw std::logic_error("thorn reaches above the infeasible bound");
  }
  if (rep.kind == Replacement<S>::Kind::twig) {
    if (a.weight * a.length < range.hi) throw std::logic_error("twig is coverable from its backbone vertex");
    if (a.bud >= 0 && range.lo < a.weight * (a.length - a.bud_length)) {
      throw std::logic_error("twig vertex is not covered by its bud");
    }
  }
}

// ---------------------------------------------------------------------------
// Removing vertices covered by twig centers

struct CleanupResult {
  std::vector<char> backbone_covered;  // per backbone index
  std::vector<char> thorn_covered;
  std::vector<int> kept;         // backbone indices of the surviving slots, lowest first
  std::vector<char> kept_thorn;  // per kept slot: whether its thorn survives
};

inline void finish_cleanup(CleanupResult& cr, std::span<const char> has_thorn) {
  const int m = static_cast<int>(cr.backbone_covered.size());
  for (int i = 0; i < m; ++i) {
    const bool thorn_left = has_thorn[i] && !cr.thorn_covered[i];
    if (!cr.backbone_covered[i] || thorn_left) {
      cr.kept.push_back(i);
      cr.kept_thorn.push_back(thorn_left ? 1 : 0);
    }
  }
}

// `rank` holds the level positions of the stem's lines, per backbone index and
// LineKind (-1 where absent).
template <class S>
CleanupResult cleanup_continuous(const Stem<S>& st, std::span<const std::array<int, 6>> rank) {
  const int m = st.size();
  CleanupResult cr;
  cr.backbone_covered.assign(m, 0);
  cr.thorn_covered.assign(m, 0);
  std::vector<char> has_thorn(m);
  for (int i = 0; i < m; ++i) has_thorn[i] = st.thorn[i].has_value();

  int best = -1;
  for (int i = 0; i < m; ++i) {
    if (st.twig[i] && (best < 0 || rank[i][twig_up] > rank[best][twig_up])) best = i;
    if (best < 0) continue;
    const int reach = rank[best][twig_up];
    if (reach > rank[i][backbone_down]) cr.backbone_covered[i] = 1;
    if (has_thorn[i] && reach > rank[i][thorn_down]) cr.thorn_covered[i] = 1;
  }
  best = -1;
  for (int i = m - 1; i >= 0; --i) {
    if (st.twig[i] && (best < 0 || rank[i][twig_down] < rank[best][twig_down])) best = i;
    if (best < 0) continue;
    const int reach = rank[best][twig_down];
    if (reach < rank[i][backbone_up]) cr.backbone_covered[i] = 1;
    if (has_thorn[i] && reach < rank[i][thorn_up]) cr.thorn_covered[i] = 1;
  }
  finish_cleanup(cr, has_thorn);
  return cr;
}

template <class S>
CleanupResult cleanup_discrete(const Stem<S>& st, const S& lambda) {
  const int m = st.size();
  CleanupResult cr;
  cr.backbone_covered.assign(m, 0);
  cr.thorn_covered.assign(m, 0);
  std::vector<char> has_thorn(m);
  for (int i = 0; i < m; ++i) has_thorn[i] = st.thorn[i].has_value();

  auto mark = [&](int i, const S& to_bud) {
    if (!(lambda < st.weight[i] * to_bud)) cr.backbone_covered[i] = 1;
    if (const auto& a = st.thorn[i]; a && !(lambda < a->weight * (a->length + to_bud))) cr.thorn_covered[i] = 1;
  };
  int best = -1;
  for (int i = 0; i < m; ++i) {
    if (st.twig[i] && (best < 0 || !(st.x[i] - st.x[best] + st.twig[best]->bud_length < st.twig[i]->bud_length))) {
      best = i;
    }
    if (best >= 0) mark(i, st.x[i] - st.x[best] + st.twig[best]->bud_length);
  }
  best = -1;
  for (int i = m - 1; i >= 0; --i) {
    if (st.twig[i] && (best < 0 || !(st.x[best] - st.x[i] + st.twig[best]->bud_length < st.twig[i]->bud_length))) {
      best = i;
    }
    if (best >= 0) mark(i, st.x[best] - st.x[i] + st.twig[best]->bud_length);
  }
  finish_cleanup(cr, has_thorn);
  return cr;
}

// ---------------------------------------------------------------------------
// Per-stem tables for the fast test

// A surviving vertex: `x` is where its reach to the right starts (the
// backbone position, or that minus the thorn length). Larger `key` means
// harder to cover from above.
template <class S>
struct Member {
  int vertex = -1;
  S weight{};
  S x{};
  long long key = 0;
};

template <class S>
struct StemTables {
  CleanupResult kept;
  std::shared_ptr<const SublistLp<S>> lp;  // four half-planes per kept slot; null when none survive
  std::vector<long long> ncen;             // per kept slot i: centers for slots i.. beyond the last group
  std::vector<Member<S>> best;             // hardest vertex of the last group starting at i
  std::vector<int> qbest;                  // discrete: highest backbone index covering best[i]
  int a = -1;                              // backbone index of the twig whose center is nearest the bottom
  int b = -1;                              // ... nearest the top

  int t() const { return static_cast<int>(kept.kept.size()); }
};

namespace detail {

// Lowest value of the slots [i, j] over backbone vertex positions only.
template <class S>
std::pair<S, int> snapped_lowest(const SublistLp<S>& lp, std::span<const S> xs, int i, int j) {
  const S px = lp.lowest(4 * i, 4 * j + 3)->x;
  const int m = static_cast<int>(xs.size());
  int left = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), px) - xs.begin()) - 1;
  int right = left + 1;
  left = std::clamp(left, 0, m - 1);
  right = std::clamp(right, 0, m - 1);
  S vl = lp.on_line(4 * i, 4 * j + 3, xs[left]);
  if (left == right) return {vl, left};
  S vr = lp.on_line(4 * i, 4 * j + 3, xs[right]);
  return vr < vl ? std::pair<S, int>{vr, right} : std::pair<S, int>{vl, left};
}

template <class S, class KeyOf>
StemTables<S> build_tables(const Stem<S>& st, CleanupResult cr, const S& lambda, Variant var, KeyOf key_of) {
  StemTables<S> tb;
  tb.kept = std::move(cr);
  const int t = tb.t();
  if (t == 0) return tb;
  const auto& kept = tb.kept.kept;
  tb.lp = std::make_shared<const SublistLp<S>>(stem_half_planes<S>(st, kept, tb.kept.kept_thorn));
  const SublistLp<S>& lp = *tb.lp;

  auto alpha_fits = [&](int i, int j) {
    if (var == Variant::continuous) return !(lambda < lp.lowest(4 * i, 4 * j + 3)->y);
    return !(lambda < snapped_lowest<S>(lp, st.x, i, j).first);
  };
  auto slot_best = [&](int s) {
    const int i = kept[s];
    Member<S> mb{st.backbone[i], st.weight[i], st.x[i], key_of(i, false)};
    if (tb.kept.kept_thorn[s]) {
      const auto& a = *st.thorn[i];
      Member<S> th{a.vertex, a.weight, st.x[i] - a.length, key_of(i, true)};
      if (th.key > mb.key) mb = th;
    }
    return mb;
  };

  tb.ncen.assign(t, 0);
  tb.best.resize(t);
  int j = t;  // first slot of the next group, t when the group runs to the end
  for (int i = t - 1; i >= 0; --i) {
    while (j - 1 > i && !alpha_fits(i, j - 1)) --j;
    if (j == t) {
      Member<S> mb = slot_best(i);
      if (i + 1 < t && tb.best[i + 1].key > mb.key) mb = tb.best[i + 1];
      tb.best[i] = mb;
    } else {
      tb.ncen[i] = tb.ncen[j] + 1;
      tb.best[i] = tb.best[j];
    }
  }
  if (var == Variant::discrete) {
    tb.qbest.resize(t);
    const int m = st.size();
    for (int i = 0; i < t; ++i) {
      const auto& v = tb.best[i];
      int lo = 0, hi = m - 1;  // largest backbone index within reach
      while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (!(lambda < v.weight * (st.x[mid] - v.x))) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      tb.qbest[i] = lo;
    }
  }
  return tb;
}

}  // namespace detail

// `rank` as for cleanup_continuous.
template <class S>
StemTables<S> build_stem_tables_continuous(const Stem<S>& st, CleanupResult cr, const S& lambda,
                                           std::span<const std::array<int, 6>> rank) {
  auto tb = detail::build_tables(st, std::move(cr), lambda, Variant::continuous, [&](int i, bool thorn) {
    return -static_cast<long long>(rank[i][thorn ? thorn_up : backbone_up]);
  });
  for (int i = 0; i < st.size(); ++i) {
    if (!st.twig[i]) continue;
    if (tb.a < 0 || rank[i][twig_down] < rank[tb.a][twig_down]) tb.a = i;
    if (tb.b < 0 || rank[i][twig_up] > rank[tb.b][twig_up]) tb.b = i;
  }
  return tb;
}

// `vertex_rank` is indexed by vertex id.
template <class S>
StemTables<S> build_stem_tables_discrete(const Stem<S>& st, CleanupResult cr, const S& lambda,
                                         std::span<const int> vertex_rank) {
  auto tb = detail::build_tables(st, std::move(cr), lambda, Variant::discrete, [&](int i, bool thorn) {
    return static_cast<long long>(vertex_rank[thorn ? st.thorn[i]->vertex : st.backbone[i]]);
  });
  const S& xm = st.length();
  for (int i = 0; i < st.size(); ++i) {
    const auto& g = st.twig[i];
    if (!g) continue;
    if (tb.a < 0 || st.x[i] + g->bud_length < st.x[tb.a] + st.twig[tb.a]->bud_length) tb.a = i;
    if (tb.b < 0 || xm - st.x[i] + g->bud_length < xm - st.x[tb.b] + st.twig[tb.b]->bud_length) tb.b = i;
  }
  return tb;
}

// ---------------------------------------------------------------------------
// The shrinking tree

template <class S>
struct StemPartition {
  std::vector<Stem<S>> stems;  // stems[0] is the root vertex alone, with its attachments
  std::vector<int> parent;     // -1 for stems[0]

  // Children before parents.
  std::vector<int> postorder() const {
    const int k = static_cast<int>(stems.size());
    std::vector<std::vector<int>> kids(k);
    for (int s = 1; s < k; ++s) kids[parent[s]].push_back(s);
    std::vector<int> order{0};
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (int c : kids[order[i]]) order.push_back(c);
    }
    std::reverse(order.begin(), order.end());
    return order;
  }
};

// The input tree rooted at vertex 0 with leaf-stems progressively replaced by
// thorns and twigs on their top vertices. Every path runs upward from a leaf or
// branching vertex to the root or the next branching vertex.
template <class S>
class WorkingTree {
 public:
  explicit WorkingTree(const RootedTree<S>& t)
      : t_(t), alive_(t.size(), 1), kids_(t.size(), 0), thorn_(t.size(), -1), twig_(t.size(), -1), bud_(t.size(), -1) {
    for (int v = 0; v < t.size(); ++v) {
      if (v != t.root()) ++kids_[t.parent(v)];
    }
    alive_count_ = t.size();
    for (int v = 0; v < t.size(); ++v) {
      if (is_leaf(v)) ++leaves_;
    }
  }

  const RootedTree<S>& base() const { return t_; }
  int leaves() const { return leaves_; }
  int alive_count() const { return alive_count_; }
  bool alive(int v) const { return alive_[v] != 0; }
  bool only_root() const { return alive_count_ == 1; }

  // Leaf-stems with at most `max_length` backbone vertices, by leaf id.
  std::vector<Stem<S>> leaf_stems(int max_length) const {
    std::vector<Stem<S>> out;
    std::vector<int> bb;
    for (int v = 0; v < t_.size(); ++v) {
      if (!is_leaf(v)) continue;
      bb.assign(1, v);
      int u = t_.parent(v);
      while (is_inner(u) && static_cast<int>(bb.size()) < max_length) {
        bb.push_back(u);
        u = t_.parent(u);
      }
      if (is_inner(u) || static_cast<int>(bb.size()) >= max_length) continue;
      bb.push_back(u);
      out.push_back(stem_of(bb, false));
    }
    return out;
  }

  // The root with its own attachments, as a one-vertex stem.
  Stem<S> root_stem() const { return stem_of(std::vector<int>{t_.root()}, true); }

  // All paths chopped into pieces of at most r backbone vertices (r >= 2)
  // sharing boundary vertices. A vertex's attachments go with the piece in
  // which it is not the top.
  StemPartition<S> partition(int r) const {
    r = std::max(r, 2);
    StemPartition<S> out;
    out.stems.push_back(root_stem());
    out.parent.push_back(-1);
    std::vector<int> first_piece(t_.size(), -1);
    struct Top {
      int piece;
      int vertex;
    };
    std::vector<Top> tops;
    std::vector<int> bb;
    for (int v = 0; v < t_.size(); ++v) {
      if (!alive_[v] || v == t_.root() || kids_[v] == 1) continue;
      bb.assign(1, v);
      int u = t_.parent(v);
      while (is_inner(u)) {
        bb.push_back(u);
        u = t_.parent(u);
      }
      bb.push_back(u);
      const int len = static_cast<int>(bb.size());
      first_piece[v] = static_cast<int>(out.stems.size());
      for (int s = 0;;) {
        const int e = std::min(s + r - 1, len - 1);
        out.stems.push_back(stem_of(std::span<const int>(bb).subspan(s, e - s + 1), false));
        const int id = static_cast<int>(out.stems.size()) - 1;
        out.parent.push_back(-1);
        if (e == len - 1) {
          tops.push_back({id, u});
          break;
        }
        out.parent[id] = id + 1;
        s = e;
      }
    }
    for (const auto& tp : tops) out.parent[tp.piece] = tp.vertex == t_.root() ? 0 : first_piece[tp.vertex];
    return out;
  }

  // Removes a leaf-stem below its top and merges the replacement into the
  // top's attachments. Returns the centers committed, including one for a
  // discarded twig.
  long long replace(const Stem<S>& leaf, const Replacement<S>& rep, std::span<const int> rank) {
    const int z = leaf.top();
    for (int i = 0; i + 1 < leaf.size(); ++i) {
      const int v = leaf.backbone[i];
      alive_[v] = 0;
      thorn_[v] = twig_[v] = bud_[v] = -1;
    }
    alive_count_ -= leaf.size() - 1;
    --leaves_;
    --kids_[z];
    if (is_leaf(z)) ++leaves_;

    long long used = rep.centers_used;
    const auto& a = rep.attachment;
    if (rep.kind == Replacement<S>::Kind::thorn) {
      if (thorn_[z] < 0 || rank[a.vertex] > rank[thorn_[z]]) thorn_[z] = a.vertex;
      // the top vertex itself dominates a thorn it outranks
      if (thorn_[z] == z) thorn_[z] = -1;
    } else if (rep.kind == Replacement<S>::Kind::twig) {
      if (twig_[z] < 0) {
        twig_[z] = a.vertex;
        bud_[z] = a.bud;
      } else {
        ++used;
        bool take;
        if (a.bud >= 0) {
          take = a.bud_length < t_.rootdist(bud_[z]) - t_.rootdist(z);
        } else {
          take = rank[a.vertex] < rank[twig_[z]];
        }
        if (take) {
          twig_[z] = a.vertex;
          bud_[z] = a.bud;
        }
      }
    }
    return used;
  }

  // The current tree as a standalone instance. `ids` receives the vertex id
  // behind each new label.
  Tree<S> as_tree(std::vector<int>* ids = nullptr) const {
    std::vector<int> label(t_.size(), -1);
    std::vector<int> back;
    Tree<S> out;
    auto add = [&](int v) {
      if (label[v] < 0) {
        label[v] = static_cast<int>(back.size());
        back.push_back(v);
        out.weights.push_back(t_.weight(v));
      }
      return label[v];
    };
    for (int v = 0; v < t_.size(); ++v) {
      if (alive_[v]) add(v);
    }
    for (int v = 0; v < t_.size(); ++v) {
      if (!alive_[v]) continue;
      if (v != t_.root()) out.edges.push_back({label[v], label[t_.parent(v)], t_.parent_length(v)});
      if (thorn_[v] >= 0) out.edges.push_back({add(thorn_[v]), label[v], gap(thorn_[v], v)});
      if (twig_[v] >= 0) {
        int anchor = v;
        if (bud_[v] >= 0) {
          out.edges.push_back({add(bud_[v]), label[v], gap(bud_[v], v)});
          anchor = bud_[v];
        }
        if (twig_[v] != anchor) out.edges.push_back({add(twig_[v]), label[anchor], gap(twig_[v], anchor)});
      }
    }
    out.n = static_cast<int>(back.size());
    if (ids) *ids = std::move(back);
    return out;
  }

  int thorn(int v) const { return thorn_[v]; }
  int twig(int v) const { return twig_[v]; }
  int bud(int v) const { return bud_[v]; }

 private:
  bool is_leaf(int v) const { return alive_[v] && v != t_.root() && kids_[v] == 0; }
  bool is_inner(int v) const { return v != t_.root() && kids_[v] == 1; }
  S gap(int below, int above) const { return t_.rootdist(below) - t_.rootdist(above); }

  Stem<S> stem_of(std::span<const int> bb, bool with_top) const {
    Stem<S> st;
    const int m = static_cast<int>(bb.size());
    st.backbone.assign(bb.begin(), bb.end());
    st.thorn.resize(m);
    st.twig.resize(m);
    const S& base = t_.rootdist(bb[0]);
    for (int i = 0; i < m; ++i) {
      const int v = bb[i];
      st.weight.push_back(t_.weight(v));
      st.x.push_back(base - t_.rootdist(v));
      if (i + 1 == m && !with_top) continue;
      if (thorn_[v] >= 0) st.thorn[i] = Attachment<S>{thorn_[v], t_.weight(thorn_[v]), gap(thorn_[v], v)};
      if (twig_[v] >= 0) {
        Attachment<S> a{twig_[v], t_.weight(twig_[v]), gap(twig_[v], v)};
        if (bud_[v] >= 0) {
          a.bud = bud_[v];
          a.bud_weight = t_.weight(bud_[v]);
          a.bud_length = gap(bud_[v], v);
        }
        st.twig[i] = a;
      }
    }
    return st;
  }

  const RootedTree<S>& t_;
  std::vector<char> alive_;
  std::vector<int> kids_;
  std::vector<int> thorn_, twig_, bud_;
  int alive_count_ = 0;
  int leaves_ = 0;
};

}  // namespace kcenter
