#pragma once

#include <limits>
#include <vector>

#include "scalar.hpp"
#include "tree.hpp"

namespace kcenter {

enum class Variant { continuous, discrete };

inline const char* to_string(Variant v) { return v == Variant::continuous ? "continuous" : "discrete"; }

// A center on edge (vertex, toward) at `offset` from `vertex`, or at `vertex`
// itself when toward < 0.
template <class S>
struct Placement {
  int vertex = 0;
  int toward = -1;
  S offset{};
};

template <class S>
struct FeasibilityOutcome {
  bool feasible = false;
  long long count = 0;
  std::vector<Placement<S>> centers;
  std::vector<int> cover;  // vertex -> index into centers, -1 only when no center exists
};

// Greedy state at the root before the final root decision.
template <class S>
struct OpenCover {
  Extended<S> sup;
  Extended<S> dem;
  int sup_center = -1;
  std::vector<int> pending;  // unresolved vertices, weight-0 ones included
  std::vector<Placement<S>> centers;
  std::vector<int> cover;
};

// Bottom-up greedy cover. Buffers are reused across calls on the same tree.
template <class S>
class GreedyCover {
 public:
  explicit GreedyCover(const RootedTree<S>& t) : t_(t) {}

  // Centers needed at `lambda`; stops counting once `limit` is exceeded.
  long long count(const S& lambda, Variant var, long long limit = std::numeric_limits<long long>::max()) {
    return sweep<false>(lambda, var, limit, nullptr);
  }

  FeasibilityOutcome<S> run(const S& lambda, Variant var, long long k) {
    OpenCover<S> oc;
    sweep<true>(lambda, var, std::numeric_limits<long long>::max(), &oc);
    close_root(oc);
    FeasibilityOutcome<S> out;
    out.count = static_cast<long long>(oc.centers.size());
    out.feasible = out.count <= k;
    out.centers = std::move(oc.centers);
    out.cover = std::move(oc.cover);
    return out;
  }

  OpenCover<S> run_open(const S& lambda, Variant var) {
    OpenCover<S> oc;
    sweep<true>(lambda, var, std::numeric_limits<long long>::max(), &oc);
    return oc;
  }

  // Applies the root rule to an open state.
  void close_root(OpenCover<S>& oc) const {
    int c = oc.sup_center;
    if (oc.sup > oc.dem) {
      c = static_cast<int>(oc.centers.size());
      oc.centers.push_back({t_.root(), -1, S(0)});
    }
    for (int v : oc.pending) oc.cover[v] = c;
    oc.pending.clear();
  }

 private:
  template <bool Track>
  long long sweep(const S& lambda, Variant var, long long limit, OpenCover<S>* oc) {
    const int n = t_.size();
    sup_.assign(n, Extended<S>::inf());
    dem_.resize(n);
    for (int v = 0; v < n; ++v) {
      const S& w = t_.weight(v);
      dem_[v] = w == S(0) ? Extended<S>::inf() : Extended<S>(lambda / w);
    }
    if constexpr (Track) {
      supc_.assign(n, -1);
      head_.resize(n);
      tail_.resize(n);
      next_.assign(n, -1);
      for (int v = 0; v < n; ++v) head_[v] = tail_[v] = v;
      oc->cover.assign(n, -1);
      oc->centers.clear();
    }
    long long count = 0;
    const int root = t_.root();
    for (int u : t_.postorder()) {
      if (u == root) continue;
      const int v = t_.parent(u);
      const S& d = t_.parent_length(u);
      if (sup_[u] <= dem_[u]) {
        Extended<S> cand = sup_[u] + d;
        if constexpr (Track) {
          if (supc_[u] >= 0) {
            assign(u, supc_[u], *oc);
          } else {
            splice(u, v);
          }
          if (cand < sup_[v]) supc_[v] = supc_[u];
        }
        if (cand < sup_[v]) sup_[v] = std::move(cand);
      } else if (dem_[u] < Extended<S>(d)) {
        if (++count > limit && !Track) return count;
        Extended<S> cand = var == Variant::continuous ? Extended<S>(d - dem_[u].value) : Extended<S>(d);
        if constexpr (Track) {
          int c = static_cast<int>(oc->centers.size());
          if (var == Variant::continuous) {
            oc->centers.push_back({u, v, dem_[u].value});
          } else {
            oc->centers.push_back({u, -1, S(0)});
          }
          assign(u, c, *oc);
          if (cand < sup_[v]) supc_[v] = c;
        }
        if (cand < sup_[v]) sup_[v] = std::move(cand);
      } else {
        Extended<S> cand = dem_[u] - d;
        if (cand < dem_[v]) dem_[v] = std::move(cand);
        if constexpr (Track) splice(u, v);
      }
    }
    if constexpr (Track) {
      oc->sup = sup_[root];
      oc->dem = dem_[root];
      oc->sup_center = supc_[root];
      oc->pending.clear();
      for (int x = head_[root]; x != -1; x = next_[x]) oc->pending.push_back(x);
    } else if (sup_[root] > dem_[root]) {
      ++count;
    }
    return count;
  }

  void assign(int u, int c, OpenCover<S>& oc) {
    for (int x = head_[u]; x != -1; x = next_[x]) oc.cover[x] = c;
    head_[u] = tail_[u] = -1;
  }

  // Moves u's pending list onto v's.
  void splice(int u, int v) {
    if (head_[u] == -1) return;
    if (head_[v] == -1) {
      head_[v] = head_[u];
    } else {
      next_[tail_[v]] = head_[u];
    }
    tail_[v] = tail_[u];
    head_[u] = tail_[u] = -1;
  }

  const RootedTree<S>& t_;
  std::vector<Extended<S>> sup_, dem_;
  std::vector<int> supc_, head_, tail_, next_;
};

template <class S>
FeasibilityOutcome<S> ftest0(const RootedTree<S>& t, const S& lambda, long long k) {
  return GreedyCover<S>(t).run(lambda, Variant::continuous, k);
}

template <class S>
FeasibilityOutcome<S> dftest0(const RootedTree<S>& t, const S& lambda, long long k) {
  return GreedyCover<S>(t).run(lambda, Variant::discrete, k);
}

// Distance from a placement to vertex x, measured through the tree.
template <class S>
S placement_distance(const Tree<S>& t, const Adjacency<S>& adj, const Placement<S>& p, int x) {
  auto from_vertex = distances_from(t, adj, p.vertex);
  if (p.toward < 0) return from_vertex[x];
  auto from_other = distances_from(t, adj, p.toward);
  S edge = from_vertex[p.toward];
  S a = from_vertex[x] + p.offset;
  S b = from_other[x] + (edge - p.offset);
  return a < b ? a : b;
}

}  // namespace kcenter
