#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace kcenter {

// Implicit matrix whose rows and columns are nonincreasing, so the largest
// element sits at (0, 0).
template <class S>
struct SortedMatrix {
  int rows = 0;
  int cols = 0;
  std::function<S(int, int)> eval;
};

// Bracket for the optimum: lo is known infeasible, hi known feasible.
template <class S>
struct LambdaRange {
  S lo{};
  S hi{};
  bool contains(const S& v) const { return lo < v && v < hi; }
};

template <class S>
struct MsearchResult {
  LambdaRange<S> range;
  long long remaining = 0;           // elements not yet ruled out of (lo, hi)
  int tests = 0;
  long long evaluations = 0;
  std::vector<bool> matrix_active;  // per input matrix: anything left in (lo, hi)
};

template <class S>
bool is_sorted_matrix(const SortedMatrix<S>& m) {
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      S v = m.eval(i, j);
      if (j + 1 < m.cols && v < m.eval(i, j + 1)) return false;
      if (i + 1 < m.rows && v < m.eval(i + 1, j)) return false;
    }
  }
  return true;
}

// Narrows `range` with a monotone tester until at most `c` matrix elements can
// still lie strictly inside it. Only values strictly inside the current range
// are ever tested.
template <class S>
MsearchResult<S> msearch(std::span<const SortedMatrix<S>> matrices, LambdaRange<S> range, long long c,
                         const std::function<bool(const S&)>& feasible) {
  if (c < 0) throw std::invalid_argument("stopping count must be nonnegative");
  if (!(range.lo < range.hi)) throw std::invalid_argument("empty search range");

  struct Piece {
    int mat;
    int r0, c0;
    int h, w;  // powers of two; cells past the matrix edge are absent
    long long real;
    S top, bottom;
  };

  MsearchResult<S> out;
  auto& rng = out.range;
  rng = range;

  auto make = [&](int mat, int r0, int c0, int h, int w) {
    const auto& m = matrices[mat];
    int rr = std::min(h, m.rows - r0), cc = std::min(w, m.cols - c0);
    out.evaluations += 2;
    return Piece{mat, r0, c0, h, w, static_cast<long long>(rr) * cc, m.eval(r0, c0), m.eval(r0 + rr - 1, c0 + cc - 1)};
  };
  auto alive = [&](const Piece& p) { return rng.lo < p.top && p.bottom < rng.hi; };

  std::vector<Piece> pieces, next;
  for (int j = 0; j < static_cast<int>(matrices.size()); ++j) {
    const auto& m = matrices[j];
    if (m.rows <= 0 || m.cols <= 0) continue;
    Piece p = make(j, 0, 0, static_cast<int>(std::bit_ceil(static_cast<unsigned>(m.rows))),
                   static_cast<int>(std::bit_ceil(static_cast<unsigned>(m.cols))));
    if (alive(p)) pieces.push_back(std::move(p));
  }

  auto count = [&] {
    long long s = 0;
    for (const auto& p : pieces) s += p.real;
    return s;
  };
  auto prune = [&] {
    std::erase_if(pieces, [&](const Piece& p) { return !alive(p); });
  };
  auto test = [&](const S& v) {
    ++out.tests;
    if (feasible(v)) {
      rng.hi = v;
    } else {
      rng.lo = v;
    }
    prune();
  };
  // Tests the weighted median of the values strictly inside the range.
  auto test_median = [&](auto value_of) {
    std::vector<std::pair<const S*, long long>> vals;
    long long weight = 0;
    for (const auto& p : pieces) {
      const S& v = value_of(p);
      if (rng.contains(v)) {
        vals.emplace_back(&v, p.real);
        weight += p.real;
      }
    }
    if (vals.empty()) return;
    std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return *a.first < *b.first; });
    long long acc = 0;
    for (const auto& [v, w] : vals) {
      acc += w;
      if (2 * acc >= weight) {
        S probe = *v;
        test(probe);
        return;
      }
    }
  };

  prune();
  while (!pieces.empty() && count() > c) {
    bool split_any = false;
    next.clear();
    for (const auto& p : pieces) {
      const auto& m = matrices[p.mat];
      if (p.h == 1 && p.w == 1) {
        next.push_back(p);
        continue;
      }
      split_any = true;
      int h2 = p.h >= p.w && p.h > 1 ? p.h / 2 : p.h;
      int w2 = p.w >= p.h && p.w > 1 ? p.w / 2 : p.w;
      for (int dr = 0; dr < p.h; dr += h2) {
        for (int dc = 0; dc < p.w; dc += w2) {
          int r0 = p.r0 + dr, c0 = p.c0 + dc;
          if (r0 >= m.rows || c0 >= m.cols) continue;
          Piece q = make(p.mat, r0, c0, h2, w2);
          if (alive(q)) next.push_back(std::move(q));
        }
      }
    }
    pieces.swap(next);
    if (count() <= c) break;
    if (!split_any) {
      test_median([](const Piece& p) -> const S& { return p.top; });
      continue;
    }
    test_median([](const Piece& p) -> const S& { return p.top; });
    if (count() <= c) break;
    test_median([](const Piece& p) -> const S& { return p.bottom; });
  }

  out.remaining = count();
  out.matrix_active.assign(matrices.size(), false);
  for (const auto& p : pieces) out.matrix_active[p.mat] = true;
  return out;
}

}  // namespace kcenter
