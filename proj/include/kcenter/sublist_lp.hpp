#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "geometry.hpp"

namespace kcenter {

// Upper envelope of lines given in nondecreasing slope order. Equal slopes keep
// the highest intercept.
template <class S>
std::vector<Line<S>> upper_envelope_sorted(std::span<const Line<S>> sorted) {
  std::vector<Line<S>> env;
  env.reserve(sorted.size());
  for (const auto& l : sorted) {
    if (!env.empty() && env.back().slope == l.slope) {
      if (!(env.back().intercept < l.intercept)) continue;
      env.pop_back();
    }
    while (env.size() >= 2) {
      const auto& a = env[env.size() - 2];
      const auto& b = env.back();
      // b survives only if it rises above a before l overtakes it
      if ((a.intercept - b.intercept) * (l.slope - b.slope) < (b.intercept - l.intercept) * (b.slope - a.slope)) break;
      env.pop_back();
    }
    env.push_back(l);
  }
  return env;
}

// Range structure over an ordered list of upper half-planes y >= a x + b.
// Ranges are 0-based and inclusive.
template <class S>
class SublistLp {
 public:
  explicit SublistLp(std::vector<Line<S>> planes) : planes_(std::move(planes)) {
    if (planes_.empty()) throw std::invalid_argument("sublist structure needs at least one half-plane");
    m_ = static_cast<int>(planes_.size());
    nodes_.resize(4 * static_cast<std::size_t>(m_));
    build(1, 0, m_ - 1);
  }

  int size() const { return m_; }
  std::span<const Line<S>> planes() const { return planes_; }

  // max over the range of a x + b.
  S on_line(int i, int j, const S& x) const {
    check(i, j);
    std::optional<S> best;
    visit(1, 0, m_ - 1, i, j, [&](const Node& nd) {
      S v = value_at(nd, x).first;
      if (!best || *best < v) best = std::move(v);
    });
    return *best;
  }

  // Lowest point of the intersection of the range (and `extra`, if given).
  // Reports the leftmost minimizer; a flat ray reports its finite end and an
  // entirely flat set reports x = 0.
  Lowest<S> lowest(int i, int j, const std::optional<std::type_identity_t<Line<S>>>& extra = std::nullopt) const {
    check(i, j);
    Query qy;
    visit(1, 0, m_ - 1, i, j, [&](const Node& nd) { qy.chains.push_back(&nd); });
    if (extra) qy.extra = &*extra;
    return solve(qy);
  }

  // Chain sizes, exposed for structural tests.
  std::size_t stored_lines() const {
    std::size_t total = 0;
    for (const auto& nd : nodes_) total += nd.lines.size();
    return total;
  }
  std::span<const Line<S>> chain(int node) const { return nodes_[node].lines; }

 private:
  struct Node {
    std::vector<Line<S>> lines;  // strictly increasing slopes
    std::vector<S> breaks;       // breaks[t] = crossing of lines[t] and lines[t+1]
  };

  struct Query {
    std::vector<const Node*> chains;
    const Line<S>* extra = nullptr;
  };

  void check(int i, int j) const {
    if (i < 0 || j < i || j >= m_) throw std::out_of_range("bad sublist range");
  }

  void build(int id, int l, int r) {
    Node& nd = nodes_[id];
    if (l == r) {
      nd.lines = {planes_[l]};
      return;
    }
    int mid = (l + r) / 2;
    build(2 * id, l, mid);
    build(2 * id + 1, mid + 1, r);
    const auto& a = nodes_[2 * id].lines;
    const auto& b = nodes_[2 * id + 1].lines;
    std::vector<Line<S>> merged(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), merged.begin(),
               [](const Line<S>& p, const Line<S>& q) { return p.slope < q.slope; });
    nd.lines = upper_envelope_sorted<S>(merged);
    nd.breaks.reserve(nd.lines.size() - 1);
    for (std::size_t t = 0; t + 1 < nd.lines.size(); ++t) nd.breaks.push_back(crossing_x(nd.lines[t], nd.lines[t + 1]));
  }

  template <class F>
  void visit(int id, int l, int r, int i, int j, F&& f) const {
    if (j < l || r < i) return;
    if (i <= l && r <= j) {
      f(nodes_[id]);
      return;
    }
    int mid = (l + r) / 2;
    visit(2 * id, l, mid, i, j, f);
    visit(2 * id + 1, mid + 1, r, i, j, f);
  }

  // Value at x and slope just right of x.
  static std::pair<S, const S*> value_at(const Node& nd, const S& x) {
    auto t = std::upper_bound(nd.breaks.begin(), nd.breaks.end(), x) - nd.breaks.begin();
    const Line<S>& l = nd.lines[t];
    return {l.at(x), &l.slope};
  }

  // Whether the right derivative of the max at x is >= 0 (or > 0 if strict).
  static bool rising(const Query& qy, const S& x, bool strict) {
    std::optional<S> top;
    const S* slope = nullptr;
    auto take = [&](S v, const S* s) {
      if (!top || *top < v) {
        top = std::move(v);
        slope = s;
      } else if (v == *top && *slope < *s) {
        slope = s;
      }
    };
    for (const Node* nd : qy.chains) {
      auto [v, s] = value_at(*nd, x);
      take(std::move(v), s);
    }
    if (qy.extra) take(qy.extra->at(x), &qy.extra->slope);
    return strict ? S(0) < *slope : !(*slope < S(0));
  }

  static S evaluate(const Query& qy, const S& x) {
    std::optional<S> top;
    for (const Node* nd : qy.chains) {
      S v = value_at(*nd, x).first;
      if (!top || *top < v) top = std::move(v);
    }
    if (qy.extra) {
      S v = qy.extra->at(x);
      if (*top < v) top = std::move(v);
    }
    return *top;
  }

  // Smallest x where the right derivative of the max becomes >= 0 (> 0 if
  // strict). Requires that such an x exists and that the derivative is
  // negative (nonpositive) far to the left.
  static S threshold(const Query& qy, bool strict) {
    const std::size_t k = qy.chains.size();
    std::vector<std::ptrdiff_t> lo(k, 0), hi(k);
    for (std::size_t c = 0; c < k; ++c) hi[c] = static_cast<std::ptrdiff_t>(qy.chains[c]->breaks.size());
    std::optional<S> left, right;
    std::vector<std::pair<const S*, std::ptrdiff_t>> probes;
    for (;;) {
      probes.clear();
      std::ptrdiff_t total = 0;
      for (std::size_t c = 0; c < k; ++c) {
        if (lo[c] >= hi[c]) continue;
        probes.emplace_back(&qy.chains[c]->breaks[(lo[c] + hi[c]) / 2], hi[c] - lo[c]);
        total += hi[c] - lo[c];
      }
      if (probes.empty()) break;
      std::sort(probes.begin(), probes.end(), [](const auto& p, const auto& q) { return *p.first < *q.first; });
      std::ptrdiff_t acc = 0;
      const S* pick = probes.back().first;
      for (const auto& [x, w] : probes) {
        acc += w;
        if (2 * acc >= total) {
          pick = x;
          break;
        }
      }
      S x = *pick;
      if (rising(qy, x, strict)) {
        for (std::size_t c = 0; c < k; ++c) {
          const auto& br = qy.chains[c]->breaks;
          hi[c] = std::min(hi[c], std::lower_bound(br.begin(), br.end(), x) - br.begin());
        }
        right = std::move(x);
      } else {
        for (std::size_t c = 0; c < k; ++c) {
          const auto& br = qy.chains[c]->breaks;
          lo[c] = std::max(lo[c], std::upper_bound(br.begin(), br.end(), x) - br.begin());
        }
        left = std::move(x);
      }
    }
    // Between left and right every chain is a single line.
    std::vector<Line<S>> active;
    active.reserve(k + 1);
    for (std::size_t c = 0; c < k; ++c) active.push_back(qy.chains[c]->lines[lo[c]]);
    if (qy.extra) active.push_back(*qy.extra);
    std::sort(active.begin(), active.end(), [](const Line<S>& p, const Line<S>& q) { return p.slope < q.slope; });
    auto env = upper_envelope_sorted<S>(active);
    std::size_t p = 0;
    while (p < env.size() && (strict ? !(S(0) < env[p].slope) : env[p].slope < S(0))) ++p;
    S x;
    if (p == 0 || p == env.size()) {
      // the switch happens at one end of the window
      x = p == 0 ? *left : *right;
    } else {
      x = crossing_x(env[p - 1], env[p]);
    }
    if (left && x < *left) x = *left;
    if (right && *right < x) x = *right;
    return x;
  }

  static Lowest<S> solve(const Query& qy) {
    const S* min_slope = nullptr;
    const S* max_slope = nullptr;
    auto see = [&](const S& lo, const S& hi) {
      if (!min_slope || lo < *min_slope) min_slope = &lo;
      if (!max_slope || *max_slope < hi) max_slope = &hi;
    };
    for (const Node* nd : qy.chains) see(nd->lines.front().slope, nd->lines.back().slope);
    if (qy.extra) see(qy.extra->slope, qy.extra->slope);
    if (S(0) < *min_slope || *max_slope < S(0)) return std::nullopt;
    if (*min_slope < S(0)) {
      S x = threshold(qy, false);
      S y = evaluate(qy, x);
      return Point<S>{std::move(x), std::move(y)};
    }
    // Flat toward -infinity: the minimum is the highest flat line.
    std::optional<S> y;
    for (const Node* nd : qy.chains) {
      const Line<S>& f = nd->lines.front();
      if (f.slope == S(0) && (!y || *y < f.intercept)) y = f.intercept;
    }
    if (qy.extra && qy.extra->slope == S(0) && (!y || *y < qy.extra->intercept)) y = qy.extra->intercept;
    if (*max_slope == S(0)) return Point<S>{S(0), *y};
    return Point<S>{threshold(qy, true), *y};
  }

  std::vector<Line<S>> planes_;
  int m_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace kcenter
