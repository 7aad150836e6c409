#pragma once

#include <optional>

namespace kcenter {

// The line y = slope * x + intercept, or the upper half-plane above it.
template <class S>
struct Line {
  S slope{};
  S intercept{};

  S at(const S& x) const { return slope * x + intercept; }
  friend bool operator==(const Line&, const Line&) = default;
};

template <class S>
struct Point {
  S x{};
  S y{};
  friend bool operator==(const Point&, const Point&) = default;
};

// Lowest point of a half-plane intersection; empty when unbounded below.
template <class S>
using Lowest = std::optional<Point<S>>;

// x-coordinate where two lines of different slope meet.
template <class S>
S crossing_x(const Line<S>& p, const Line<S>& q) {
  return (q.intercept - p.intercept) / (p.slope - q.slope);
}

}  // namespace kcenter
