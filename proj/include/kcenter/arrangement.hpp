#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "geometry.hpp"
#include "oracle.hpp"
#include "scalar.hpp"
#include "sorted_matrix.hpp"

namespace kcenter {

// A line with an identity for rank tables. A horizontal line never meets a
// level above it; `side` says whether it sorts at the far right (+1) or far
// left (-1) of such a level.
template <class S>
struct TaggedLine {
  Line<S> line;
  int tag = 0;
  int side = 1;
};

template <class S>
struct BoundarySearch {
  std::optional<ArrangementVertex<S>> lowest_feasible;
  std::optional<ArrangementVertex<S>> highest_infeasible;
  std::optional<S> lo;  // no vertex lies strictly between lo and hi
  std::optional<S> hi;
  int tests = 0;
};

namespace detail {

// Crossing orders of the non-horizontal lines at a horizontal level.
template <class S>
class CrossingOrders {
 public:
  explicit CrossingOrders(std::span<const Line<S>> lines) : lines_(lines) {
    for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
      if (lines[i].slope == S(0)) {
        flat_.push_back(lines[i].intercept);
      } else {
        idx_.push_back(i);
        inv_.push_back(S(1) / lines[i].slope);
        foot_.push_back(-lines[i].intercept * inv_.back());
      }
    }
    std::sort(flat_.begin(), flat_.end());
  }

  int steep() const { return static_cast<int>(idx_.size()); }
  int line_of(int k) const { return idx_[k]; }

  // Order at `level` (nullopt: the far end given by `above`). With `after`,
  // pairs crossing exactly at the level count as already swapped.
  std::vector<int> order(const std::optional<S>& level, bool above, bool after) const {
    std::vector<int> ord(idx_.size());
    std::iota(ord.begin(), ord.end(), 0);
    if (!level) {
      std::sort(ord.begin(), ord.end(), [&](int p, int q) {
        if (!(inv_[p] == inv_[q])) return above ? inv_[p] < inv_[q] : inv_[q] < inv_[p];
        if (!(foot_[p] == foot_[q])) return foot_[p] < foot_[q];
        return p < q;
      });
      return ord;
    }
    std::vector<S> x(idx_.size());
    for (std::size_t k = 0; k < idx_.size(); ++k) x[k] = (*level - lines_[idx_[k]].intercept) * inv_[k];
    std::sort(ord.begin(), ord.end(), [&](int p, int q) {
      if (!(x[p] == x[q])) return x[p] < x[q];
      if (!(inv_[p] == inv_[q])) return after ? inv_[p] < inv_[q] : inv_[q] < inv_[p];
      return p < q;
    });
    return ord;
  }

  // Horizontal intercepts strictly between lo and hi.
  std::pair<std::size_t, std::size_t> flat_between(const std::optional<S>& lo, const std::optional<S>& hi) const {
    std::size_t a = lo ? static_cast<std::size_t>(std::upper_bound(flat_.begin(), flat_.end(), *lo) - flat_.begin()) : 0;
    std::size_t b = hi ? static_cast<std::size_t>(std::lower_bound(flat_.begin(), flat_.end(), *hi) - flat_.begin())
                       : flat_.size();
    return {a, std::max(a, b)};
  }
  const std::vector<S>& flat() const { return flat_; }

  ArrangementVertex<S> vertex(int p, int q) const {
    const Line<S>& a = lines_[idx_[p]];
    const Line<S>& b = lines_[idx_[q]];
    return {a.at(crossing_x(a, b)), std::min(idx_[p], idx_[q]), std::max(idx_[p], idx_[q])};
  }
  bool parallel(int p, int q) const { return inv_[p] == inv_[q]; }

  // Vertex made by a horizontal intercept, paired with some steep line.
  ArrangementVertex<S> flat_vertex(const S& y) const {
    int h = -1;
    for (int i = 0; i < static_cast<int>(lines_.size()); ++i) {
      if (lines_[i].slope == S(0) && lines_[i].intercept == y) {
        h = i;
        break;
      }
    }
    return {y, std::min(h, idx_[0]), std::max(h, idx_[0])};
  }

 private:
  std::span<const Line<S>> lines_;
  std::vector<int> idx_;
  std::vector<S> inv_, foot_;
  std::vector<S> flat_;
};

class Fenwick {
 public:
  explicit Fenwick(int n) : t_(n + 1, 0) {}
  void add(int i) {
    for (++i; i < static_cast<int>(t_.size()); i += i & -i) ++t_[i];
  }
  long long prefix(int i) const {  // count of entries < i
    long long s = 0;
    for (; i > 0; i -= i & -i) s += t_[i];
    return s;
  }

 private:
  std::vector<long long> t_;
};

// For each j, the number of earlier entries larger than perm[j].
inline std::vector<long long> inversions_ending_at(const std::vector<int>& perm) {
  Fenwick fw(static_cast<int>(perm.size()));
  std::vector<long long> out(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    out[j] = static_cast<long long>(j) - fw.prefix(perm[j]);
    fw.add(perm[j]);
  }
  return out;
}

// Pairs of lines whose crossing lies strictly between lo and hi.
template <class S>
struct Band {
  std::vector<int> above;  // order just below hi
  std::vector<int> perm;   // positions just above lo, listed in `above` order
  std::vector<long long> inv;
  long long steep_pairs = 0;
  std::size_t flat_begin = 0, flat_end = 0;
  long long total() const { return steep_pairs + static_cast<long long>(flat_end - flat_begin); }
};

template <class S>
Band<S> band(const CrossingOrders<S>& co, const std::optional<S>& lo, const std::optional<S>& hi) {
  const int m = co.steep();
  Band<S> b;
  auto below = co.order(lo, false, true);
  b.above = co.order(hi, true, false);
  std::vector<int> pos(m);
  b.perm.resize(m);
  for (int i = 0; i < m; ++i) pos[below[i]] = i;
  for (int i = 0; i < m; ++i) b.perm[i] = pos[b.above[i]];
  b.inv = inversions_ending_at(b.perm);
  b.steep_pairs = std::accumulate(b.inv.begin(), b.inv.end(), 0LL);
  if (m > 0) std::tie(b.flat_begin, b.flat_end) = co.flat_between(lo, hi);
  return b;
}

}  // namespace detail

// Number of arrangement vertices with y <= lambda (with multiplicity: one per
// crossing pair of lines).
template <class S>
long long count_vertices_at_or_below(std::span<const Line<S>> lines, const S& lambda) {
  detail::CrossingOrders<S> co(lines);
  auto low = co.order(std::nullopt, false, false);
  auto at = co.order(lambda, false, true);
  std::vector<int> pos(low.size()), perm(at.size());
  for (std::size_t i = 0; i < low.size(); ++i) pos[low[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < at.size(); ++i) perm[i] = pos[at[i]];
  auto inv = detail::inversions_ending_at(perm);
  long long total = std::accumulate(inv.begin(), inv.end(), 0LL);
  long long flats = std::upper_bound(co.flat().begin(), co.flat().end(), lambda) - co.flat().begin();
  return total + flats * co.steep();
}

// Lowest vertex whose y is feasible and the highest vertex below it, found by
// random sampling of vertices between the current bounds. `hint` bounds the
// tested values and must bracket the threshold.
template <class S>
BoundarySearch<S> find_boundary_vertices(std::span<const Line<S>> lines, const std::function<bool(const S&)>& feasible,
                                         const std::optional<LambdaRange<S>>& hint = std::nullopt,
                                         std::uint64_t seed = 0x9e3779b97f4a7c15ULL) {
  detail::CrossingOrders<S> co(lines);
  const int m = co.steep();
  BoundarySearch<S> out;
  if (hint) {
    out.lo = hint->lo;
    out.hi = hint->hi;
  }
  std::mt19937_64 rng(seed);
  auto test = [&](const S& y) {
    ++out.tests;
    bool ok = feasible(y);
    (ok ? out.hi : out.lo) = y;
    return ok;
  };

  for (;;) {
    auto bd = detail::band(co, out.lo, out.hi);
    const auto& perm = bd.perm;
    const auto& above = bd.above;
    const auto& inv = bd.inv;
    const long long steep_pairs = bd.steep_pairs;
    const std::size_t fa = bd.flat_begin, fb = bd.flat_end;
    const long long total = bd.total();
    if (total == 0) break;

    if (total <= 2LL * m + 16) {
      // Few vertices remain: list them all and bisect.
      std::vector<S> ys;
      std::vector<int> seq = perm;
      std::vector<int> who = above;
      for (int j = 1; j < m; ++j) {
        for (int i = j; i > 0 && seq[i - 1] > seq[i]; --i) {
          ys.push_back(co.vertex(who[i - 1], who[i]).y);
          std::swap(seq[i - 1], seq[i]);
          std::swap(who[i - 1], who[i]);
        }
      }
      ys.insert(ys.end(), co.flat().begin() + fa, co.flat().begin() + fb);
      std::sort(ys.begin(), ys.end());
      ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
      std::size_t a = 0, b = ys.size();
      while (a < b) {
        std::size_t mid = (a + b) / 2;
        if (test(ys[mid])) {
          b = mid;
        } else {
          a = mid + 1;
        }
      }
      break;
    }

    // Median of a few uniformly drawn vertices strictly between the bounds.
    std::vector<long long> cum(m + 1, 0);
    for (int j = 0; j < m; ++j) cum[j + 1] = cum[j] + inv[j];
    std::vector<S> sample;
    const int draws = 31;
    for (int s = 0; s < draws; ++s) {
      long long r = std::uniform_int_distribution<long long>(0, total - 1)(rng);
      if (r >= steep_pairs) {
        sample.push_back(co.flat()[fa + static_cast<std::size_t>((r - steep_pairs))]);
        continue;
      }
      int j = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin()) - 1;
      long long skip = r - cum[j];
      for (int i = 0; i < j; ++i) {
        if (perm[i] > perm[j] && skip-- == 0) {
          sample.push_back(co.vertex(above[i], above[j]).y);
          break;
        }
      }
    }
    auto mid = sample.begin() + sample.size() / 2;
    std::nth_element(sample.begin(), mid, sample.end());
    test(*mid);
  }

  // Neighbours in the order just beyond each bound give the closest vertices.
  if (out.hi) {
    auto ord = co.order(out.hi, true, false);
    for (int i = 0; i + 1 < m; ++i) {
      if (co.parallel(ord[i], ord[i + 1])) continue;
      auto v = co.vertex(ord[i], ord[i + 1]);
      if (!(v.y < *out.hi) && (!out.lowest_feasible || v.y < out.lowest_feasible->y)) out.lowest_feasible = v;
    }
    auto it = std::lower_bound(co.flat().begin(), co.flat().end(), *out.hi);
    if (m > 0 && it != co.flat().end() && (!out.lowest_feasible || *it < out.lowest_feasible->y)) {
      out.lowest_feasible = co.flat_vertex(*it);
    }
  }
  if (out.lo) {
    auto ord = co.order(out.lo, false, true);
    for (int i = 0; i + 1 < m; ++i) {
      if (co.parallel(ord[i], ord[i + 1])) continue;
      auto v = co.vertex(ord[i], ord[i + 1]);
      if (!(*out.lo < v.y) && (!out.highest_infeasible || out.highest_infeasible->y < v.y)) out.highest_infeasible = v;
    }
    auto it = std::upper_bound(co.flat().begin(), co.flat().end(), *out.lo);
    if (m > 0 && it != co.flat().begin() && (!out.highest_infeasible || out.highest_infeasible->y < *std::prev(it))) {
      out.highest_infeasible = co.flat_vertex(*std::prev(it));
    }
  }
  return out;
}

// Ranks along the level y = lambda without the band check.
template <class S>
std::vector<int> rank_order_at(std::span<const TaggedLine<S>> lines, const S& lambda) {
  const int m = static_cast<int>(lines.size());
  std::vector<S> x(m);
  for (int i = 0; i < m; ++i) {
    const auto& l = lines[i].line;
    if (!(l.slope == S(0))) x[i] = (lambda - l.intercept) / l.slope;
  }
  auto key_side = [&](int i) { return lines[i].line.slope == S(0) ? lines[i].side : 0; };
  std::vector<int> ord(m);
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&](int p, int q) {
    int sp = key_side(p), sq = key_side(q);
    if (sp != sq) return sp < sq;
    if (sp == 0 && !(x[p] == x[q])) return x[p] < x[q];
    if (!(lines[p].line.slope == lines[q].line.slope)) return lines[p].line.slope < lines[q].line.slope;
    return lines[p].tag < lines[q].tag;
  });
  std::vector<int> rank(m);
  for (int i = 0; i < m; ++i) rank[ord[i]] = i;
  return rank;
}

// Position (0-based, left to right) of every line along a level strictly
// inside (lo, hi); that band must be free of vertices. Ties in position are
// broken by (slope, tag).
template <class S>
std::vector<int> compute_ranks(std::span<const TaggedLine<S>> lines, const S& lo, const S& hi) {
  std::vector<Line<S>> plain;
  plain.reserve(lines.size());
  for (const auto& l : lines) plain.push_back(l.line);
  detail::CrossingOrders<S> co(plain);
  if (detail::band(co, std::optional<S>(lo), std::optional<S>(hi)).total() != 0) {
    throw std::logic_error("rank band contains an arrangement vertex");
  }
  return rank_order_at(lines, midpoint(lo, hi));
}

}  // namespace kcenter
