#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace kcenter {

template <class S>
struct Edge {
  int u = 0;
  int v = 0;
  S length{};
};

// Vertices are 0-based here; files use 1-based ids.
template <class S>
struct Tree {
  int n = 0;
  std::vector<S> weights;
  std::vector<Edge<S>> edges;
};

template <class S>
struct Instance {
  Tree<S> tree;
  long long k = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

class Dsu {
 public:
  explicit Dsu(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline long long parse_count(const std::string& tok, int line, const char* what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  return v;
}

}  // namespace detail

// Throws std::invalid_argument when the tree invariants do not hold.
template <class S>
void validate(const Tree<S>& t) {
  if (t.n < 1) throw std::invalid_argument("tree needs at least one vertex");
  if (static_cast<int>(t.weights.size()) != t.n) throw std::invalid_argument("weight count differs from n");
  if (static_cast<int>(t.edges.size()) != t.n - 1) throw std::invalid_argument("tree needs exactly n-1 edges");
  for (const S& w : t.weights) {
    if (w < S(0)) throw std::invalid_argument("negative weight");
  }
  detail::Dsu dsu(t.n);
  for (const auto& e : t.edges) {
    if (e.u < 0 || e.u >= t.n || e.v < 0 || e.v >= t.n) throw std::invalid_argument("edge endpoint out of range");
    if (!(S(0) < e.length)) throw std::invalid_argument("nonpositive edge length");
    if (!dsu.unite(e.u, e.v)) throw std::invalid_argument("edges contain a cycle");
  }
}

template <class S>
Instance<S> parse_instance(std::istream& in) {
  using T = ScalarTraits<S>;
  std::vector<std::pair<int, std::vector<std::string>>> lines;
  std::string raw;
  for (int no = 1; std::getline(in, raw); ++no) {
    auto toks = detail::split_ws(raw);
    if (!toks.empty()) lines.emplace_back(no, std::move(toks));
  }
  if (lines.empty()) throw ParseError(1, "empty input");
  auto scalar = [](const std::string& tok, int line, const char* what) {
    auto v = T::parse(tok);
    if (!v) throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
    return *v;
  };

  const auto& [hline, head] = lines[0];
  if (head.size() != 2) throw ParseError(hline, "expected 'n k'");
  long long n = detail::parse_count(head[0], hline, "vertex count");
  long long k = detail::parse_count(head[1], hline, "center count");
  if (n < 1 || n > 100'000'000) throw ParseError(hline, "vertex count out of range");
  if (k < 0) throw ParseError(hline, "negative center count");

  Instance<S> inst;
  inst.k = k;
  Tree<S>& t = inst.tree;
  t.n = static_cast<int>(n);
  if (lines.size() < 2) throw ParseError(hline + 1, "missing weight line");
  const auto& [wline, wtoks] = lines[1];
  if (static_cast<long long>(wtoks.size()) != n) throw ParseError(wline, "expected " + std::to_string(n) + " weights");
  t.weights.reserve(t.n);
  for (const auto& tok : wtoks) {
    S w = scalar(tok, wline, "weight");
    if (w < S(0)) throw ParseError(wline, "negative weight '" + tok + "'");
    t.weights.push_back(w);
  }

  if (static_cast<long long>(lines.size()) - 2 != n - 1) {
    int at = lines.size() > static_cast<std::size_t>(n + 1) ? lines[n + 1].first : lines.back().first + 1;
    throw ParseError(at, "expected " + std::to_string(n - 1) + " edges, found " + std::to_string(lines.size() - 2));
  }
  detail::Dsu dsu(t.n);
  t.edges.reserve(t.n - 1);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto& [eline, toks] = lines[i];
    if (toks.size() != 3) throw ParseError(eline, "expected 'u v length'");
    long long u = detail::parse_count(toks[0], eline, "vertex id");
    long long v = detail::parse_count(toks[1], eline, "vertex id");
    if (u < 1 || u > n || v < 1 || v > n) throw ParseError(eline, "vertex id out of range");
    S len = scalar(toks[2], eline, "length");
    if (!(S(0) < len)) throw ParseError(eline, "nonpositive length '" + toks[2] + "'");
    if (!dsu.unite(static_cast<int>(u - 1), static_cast<int>(v - 1))) {
      throw ParseError(eline, "edge creates a cycle");
    }
    t.edges.push_back({static_cast<int>(u - 1), static_cast<int>(v - 1), len});
  }
  return inst;
}

template <class S>
Instance<S> parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance<S>(in);
}

template <class S>
std::string format_scalar(const S& v) {
  if constexpr (ScalarTraits<S>::exact) {
    std::string f = ScalarTraits<S>::fraction(v);
    if (f.size() > 2 && f.ends_with("/1")) f.resize(f.size() - 2);
    return f;
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
}

// Canonical text form: edges sorted by (min id, max id), smaller id first.
template <class S>
std::string serialize(const Instance<S>& inst) {
  const Tree<S>& t = inst.tree;
  std::ostringstream out;
  out << t.n << ' ' << inst.k << '\n';
  for (int i = 0; i < t.n; ++i) out << (i ? " " : "") << format_scalar(t.weights[i]);
  out << '\n';
  std::vector<Edge<S>> es = t.edges;
  for (auto& e : es) {
    if (e.v < e.u) std::swap(e.u, e.v);
  }
  std::sort(es.begin(), es.end(), [](const Edge<S>& a, const Edge<S>& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  for (const auto& e : es) out << e.u + 1 << ' ' << e.v + 1 << ' ' << format_scalar(e.length) << '\n';
  return out.str();
}

// Compressed adjacency lists.
template <class S>
struct Adjacency {
  std::vector<int> offset;
  std::vector<int> target;
  std::vector<S> length;

  explicit Adjacency(const Tree<S>& t) : offset(t.n + 1, 0), target(2 * t.edges.size()), length(2 * t.edges.size()) {
    for (const auto& e : t.edges) {
      ++offset[e.u + 1];
      ++offset[e.v + 1];
    }
    std::partial_sum(offset.begin(), offset.end(), offset.begin());
    std::vector<int> fill(offset.begin(), offset.end() - 1);
    for (const auto& e : t.edges) {
      target[fill[e.u]] = e.v;
      length[fill[e.u]++] = e.length;
      target[fill[e.v]] = e.u;
      length[fill[e.v]++] = e.length;
    }
  }
  int degree(int v) const { return offset[v + 1] - offset[v]; }
};

template <class S>
class RootedTree {
 public:
  RootedTree(const Tree<S>& t, int root) : root_(root) {
    if (root < 0 || root >= t.n) throw std::out_of_range("root out of range");
    const int n = t.n;
    weight_ = t.weights;
    parent_.assign(n, -1);
    parent_len_.assign(n, S(0));
    rootdist_.assign(n, S(0));
    Adjacency<S> adj(t);
    std::vector<int> order;
    order.reserve(n);
    order.push_back(root);
    for (std::size_t i = 0; i < order.size(); ++i) {
      int v = order[i];
      for (int a = adj.offset[v]; a < adj.offset[v + 1]; ++a) {
        int u = adj.target[a];
        if (u == parent_[v]) continue;
        parent_[u] = v;
        parent_len_[u] = adj.length[a];
        rootdist_[u] = rootdist_[v] + adj.length[a];
        order.push_back(u);
      }
    }
    if (static_cast<int>(order.size()) != n) throw std::invalid_argument("tree is not connected");
    child_off_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) {
      if (parent_[v] >= 0) ++child_off_[parent_[v] + 1];
    }
    std::partial_sum(child_off_.begin(), child_off_.end(), child_off_.begin());
    children_.resize(n > 0 ? n - 1 : 0);
    std::vector<int> fill(child_off_.begin(), child_off_.end() - 1);
    for (int v : order) {
      if (parent_[v] >= 0) children_[fill[parent_[v]]++] = v;
    }
    // Reversed BFS order lists every child before its parent.
    postorder_.assign(order.rbegin(), order.rend());
  }

  int size() const { return static_cast<int>(parent_.size()); }
  int root() const { return root_; }
  int parent(int v) const { return parent_[v]; }
  const S& parent_length(int v) const { return parent_len_[v]; }
  const S& rootdist(int v) const { return rootdist_[v]; }
  const S& weight(int v) const { return weight_[v]; }
  std::span<const int> children(int v) const {
    return {children_.data() + child_off_[v], children_.data() + child_off_[v + 1]};
  }
  std::span<const int> postorder() const { return postorder_; }
  std::span<const int> parents() const { return parent_; }
  std::span<const S> parent_lengths() const { return parent_len_; }
  std::span<const S> rootdists() const { return rootdist_; }
  std::span<const S> weights() const { return weight_; }

 private:
  int root_;
  std::vector<int> parent_;
  std::vector<S> parent_len_;
  std::vector<S> rootdist_;
  std::vector<S> weight_;
  std::vector<int> child_off_;
  std::vector<int> children_;
  std::vector<int> postorder_;
};

// Single-source distances over the whole tree.
template <class S>
std::vector<S> distances_from(const Tree<S>& t, const Adjacency<S>& adj, int src) {
  std::vector<S> dist(t.n, S(0));
  std::vector<int> from(t.n, -1), stack{src};
  from[src] = src;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int a = adj.offset[v]; a < adj.offset[v + 1]; ++a) {
      int u = adj.target[a];
      if (from[u] != -1) continue;
      from[u] = v;
      dist[u] = dist[v] + adj.length[a];
      stack.push_back(u);
    }
  }
  return dist;
}

template <class S>
S path_distance(const Tree<S>& t, int u, int v) {
  if (u < 0 || u >= t.n || v < 0 || v >= t.n) throw std::out_of_range("vertex out of range");
  return distances_from(t, Adjacency<S>(t), u)[v];
}

enum class Shape { uniform_attach, path, caterpillar, star };

struct RandomTreeSpec {
  int n = 1;
  std::uint64_t seed = 0;
  long long weight_min = 1, weight_max = 10;
  long long length_min = 1, length_max = 10;
  Shape shape = Shape::uniform_attach;
};

template <class S>
Tree<S> random_tree(const RandomTreeSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("random_tree needs n >= 1");
  if (spec.weight_min < 0 || spec.weight_min > spec.weight_max) throw std::invalid_argument("bad weight range");
  if (spec.length_min < 1 || spec.length_min > spec.length_max) throw std::invalid_argument("bad length range");
  std::mt19937_64 rng(spec.seed);
  auto pick = [&rng](long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng); };
  const int n = spec.n;
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::shuffle(label.begin(), label.end(), rng);

  Tree<S> t;
  t.n = n;
  t.weights.resize(n);
  for (int i = 0; i < n; ++i) t.weights[i] = ScalarTraits<S>::from_int(pick(spec.weight_min, spec.weight_max));
  int spine = n;
  if (spec.shape == Shape::caterpillar) spine = std::max(1, static_cast<int>(pick(1, std::max(1, n / 2))));
  for (int i = 1; i < n; ++i) {
    int p = 0;
    switch (spec.shape) {
      case Shape::uniform_attach: p = static_cast<int>(pick(0, i - 1)); break;
      case Shape::path: p = i - 1; break;
      case Shape::star: p = 0; break;
      case Shape::caterpillar: p = i < spine ? i - 1 : static_cast<int>(pick(0, spine - 1)); break;
    }
    t.edges.push_back({label[p], label[i], ScalarTraits<S>::from_int(pick(spec.length_min, spec.length_max))});
  }
  return t;
}

template <class To, class From>
Tree<To> convert_tree(const Tree<From>& t) {
  Tree<To> out;
  out.n = t.n;
  for (const auto& w : t.weights) out.weights.push_back(To(ScalarTraits<From>::to_double(w)));
  for (const auto& e : t.edges) out.edges.push_back({e.u, e.v, To(ScalarTraits<From>::to_double(e.length))});
  return out;
}

}  // namespace kcenter
