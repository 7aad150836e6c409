#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "scalar.hpp"
#include "stem.hpp"

namespace kcenter {

// Feasibility test over a partition of the reduced tree into short stems. Each
// stem is handled with a few binary searches on its precomputed tables, so a
// test costs polylogarithmic time per stem. Valid only strictly inside the
// range the tables were built for.
template <class S>
class FastFeasibility {
 public:
  struct Node {
    Stem<S> stem;
    StemTables<S> tables;
    int parent = -1;
  };

  // `committed` counts centers already fixed while the tree was reduced.
  FastFeasibility(std::vector<Node> nodes, std::vector<int> postorder, Variant var, long long committed)
      : nodes_(std::move(nodes)), order_(std::move(postorder)), var_(var), committed_(committed) {}

  FastFeasibility(const StemPartition<S>& part, std::vector<StemTables<S>> tables, Variant var, long long committed)
      : var_(var), committed_(committed) {
    for (std::size_t s = 0; s < part.stems.size(); ++s) {
      nodes_.push_back({part.stems[s], std::move(tables[s]), part.parent[s]});
    }
    order_ = part.postorder();
  }

  long long count(const S& lambda) const {
    const int k = static_cast<int>(nodes_.size());
    std::vector<X> sup(k, X::inf()), dem(k, X::inf_low());
    long long count = committed_;
    int root = -1;
    for (int p : order_) {
      const Node& nd = nodes_[p];
      count += nd.stem.twig_count();
      process(nd, lambda, sup[p], dem[p], count);
      if (nd.parent < 0) {
        root = p;
        continue;
      }
      if (sup[p] < sup[nd.parent]) sup[nd.parent] = sup[p];
      if (dem[p] < dem[nd.parent]) dem[nd.parent] = dem[p];
    }
    if (root >= 0 && sup[root] > dem[root] && dem[root].finite()) ++count;
    return count;
  }

  bool feasible(const S& lambda, long long k) const { return count(lambda) <= k; }

  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int i) const { return nodes_[i]; }

 private:
  using X = Extended<S>;

  // Largest prefix length in [0, t] accepted by a predicate monotone in it.
  template <class Pred>
  static int largest_prefix(int t, Pred ok) {
    int lo = 0, hi = t;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (ok(mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  }

  // Whether one backbone center within `limit` of the bottom covers the first
  // `len` surviving slots.
  bool reachable(const Node& nd, int len, const X& limit, const S& lambda) const {
    if (len == 0) return true;
    const SublistLp<S>& lp = *nd.tables.lp;
    const auto& xs = nd.stem.x;
    const int last = 4 * len - 1;
    if (var_ == Variant::continuous) {
      const auto p = *lp.lowest(0, last);
      if (lambda < p.y) return false;
      if (!limit.finite() || !(limit.value < p.x)) return true;
      return !(lambda < lp.on_line(0, last, limit.value));
    }
    const auto [value, at] = detail::snapped_lowest<S>(lp, xs, 0, len - 1);
    if (lambda < value) return false;
    if (!limit.finite() || !(limit.value < xs[at])) return true;
    return !(lambda < lp.on_line(0, last, xs[highest_within(xs, limit)]));
  }

  // Largest backbone index within `limit` of the bottom.
  static int highest_within(const std::vector<S>& xs, const X& limit) {
    if (!limit.finite()) return static_cast<int>(xs.size()) - 1;
    auto it = std::upper_bound(xs.begin(), xs.end(), limit.value);
    return std::max(0, static_cast<int>(it - xs.begin()) - 1);
  }

  // Distance from the top vertex down to the center covering `v` from as
  // high as possible.
  S highest_center(const Node& nd, int slot, const S& lambda) const {
    const Member<S>& v = nd.tables.best[slot];
    const S& xm = nd.stem.length();
    if (var_ == Variant::continuous) return xm - v.x - lambda / v.weight;
    return xm - nd.stem.x[nd.tables.qbest[slot]];
  }

  // Whether no center at or above the top vertex covers v.
  bool demanding(const Member<S>& v, const S& xm, const S& lambda) const {
    return !(v.weight == S(0)) && lambda < v.weight * (xm - v.x);
  }

  void process(const Node& nd, const S& lambda, X& sup, X& dem, long long& count) const {
    const Stem<S>& st = nd.stem;
    const StemTables<S>& tb = nd.tables;
    const int t = tb.t();
    const S& xm = st.length();

    X from_bottom = X::inf(), from_top = X::inf();
    if (tb.a >= 0) {
      const auto& g = *st.twig[tb.a];
      from_bottom = var_ == Variant::continuous ? X(st.x[tb.a] + g.length - lambda / g.weight)
                                                : X(st.x[tb.a] + g.bud_length);
    }
    if (tb.b >= 0) {
      const auto& g = *st.twig[tb.b];
      from_top = var_ == Variant::continuous ? X(xm - st.x[tb.b] + g.length - lambda / g.weight)
                                             : X(xm - st.x[tb.b] + g.bud_length);
    }

    // Groups the slots from j upward greedily; the last group either waits
    // for a center above or gets one as high as possible.
    auto finish = [&](int j) {
      if (j == t) {
        dem = X::inf_low();
        sup = from_top;
        return;
      }
      count += tb.ncen[j];
      const Member<S>& v = tb.best[j];
      if (!demanding(v, xm, lambda)) {
        dem = v.weight == S(0) ? X::inf_low() : X(lambda / v.weight - (xm - v.x));
        sup = from_top;
        return;
      }
      ++count;
      sup = ext_min(X(highest_center(nd, j, lambda)), from_top);
      dem = X::inf_low();
    };

    if (sup <= dem) {
      const S below = sup.value;
      const int i = largest_prefix(t, [&](int len) {
        return !(lambda < tb.lp->on_line(0, 4 * len - 1, S(0) - below));
      });
      if (i == t) {
        sup = ext_min(X(below + xm), from_top);
        dem = X::inf_low();
      } else {
        finish(i);
      }
      return;
    }
    if (tb.a >= 0 && dem >= from_bottom) {
      finish(0);
      return;
    }
    const X limit = dem;
    const int i = largest_prefix(t, [&](int len) { return reachable(nd, len, limit, lambda); });
    if (i < t) {
      ++count;
      finish(i);
      return;
    }
    const Member<S>* v = t > 0 ? &tb.best[0] : nullptr;
    const bool needs_center = v && demanding(*v, xm, lambda);
    if (!needs_center && limit > X(xm)) {
      X own = v && !(v->weight == S(0)) ? X(lambda / v->weight - (xm - v->x)) : X::inf_low();
      dem = ext_min(limit - xm, own);
      sup = from_top;
      return;
    }
    ++count;
    S down;
    if (var_ == Variant::continuous) {
      std::optional<S> d;
      if (limit.finite()) d = xm - limit.value;
      if (v && !(v->weight == S(0))) {
        S e = xm - v->x - lambda / v->weight;
        if (!d || *d < e) d = std::move(e);
      }
      down = *d;
    } else {
      int j = highest_within(st.x, limit);
      if (v && !(v->weight == S(0))) j = std::min(j, tb.qbest[0]);
      down = xm - st.x[j];
    }
    sup = ext_min(X(down), from_top);
    dem = X::inf_low();
  }

  std::vector<Node> nodes_;
  std::vector<int> order_;
  Variant var_;
  long long committed_ = 0;
};

}  // namespace kcenter
