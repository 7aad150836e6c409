#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <climits>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "arrangement.hpp"
#include "fast_feasibility.hpp"
#include "feasibility.hpp"
#include "scalar.hpp"
#include "sorted_matrix.hpp"
#include "stem.hpp"
#include "tree.hpp"

namespace kcenter {

struct SolverConfig {
  Variant variant = Variant::continuous;
  int r = 0;                 // stem block length; 0 picks ceil(log2 n)^2
  bool cross_check = false;  // replay every fast test against the greedy test
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

// (ceil(log2 n))^2 clamped to [1, n].
inline int default_block_length(int n) {
  if (n <= 1) return 1;
  const int lg = static_cast<int>(std::bit_width(static_cast<unsigned>(n - 1)));
  return std::clamp(lg * lg, 1, n);
}

struct SolveStats {
  int r = 0;
  long long tests_preprocess = 0;
  long long tests_phase0 = 0;
  long long tests_phase1 = 0;
  long long tests_phase2 = 0;
  int phase0_rounds = 0;
  std::vector<int> phase0_leaves;  // leaf count before each round and at the end
  int phase2_rounds = 0;
  long long stems_replaced = 0;
  long long committed_phase0 = 0;  // centers fixed while reducing, before the fast test is built
  int substems = 0;
  long long fast_checked = 0;
  long long fast_mismatches = 0;
  double ms_preprocess = 0, ms_phase0 = 0, ms_phase1 = 0, ms_phase2 = 0;

  long long feasibility_tests() const { return tests_preprocess + tests_phase0 + tests_phase1 + tests_phase2; }
};

template <class S>
struct SolveResult {
  S lambda_star{};
  std::vector<Placement<S>> centers;
  SolveStats stats;
};

// Builds the per-stem tables of a partition for tests strictly inside
// `range`, which must hold no candidate value of any of its stems. `rank` is
// the vertex rank over the input tree.
template <class S>
FastFeasibility<S> build_fast_feasibility(const StemPartition<S>& part, const LambdaRange<S>& range, Variant var,
                                          std::span<const int> rank, long long committed) {
  const S mid = midpoint(range.lo, range.hi);
  std::vector<StemTables<S>> tables;
  tables.reserve(part.stems.size());
  if (var == Variant::continuous) {
    std::vector<TaggedLine<S>> all;
    std::vector<std::size_t> offset;
    std::vector<std::vector<std::array<int, 6>>> slots;
    for (const auto& st : part.stems) {
      offset.push_back(all.size());
      auto sl = stem_lines(st, static_cast<int>(all.size()));
      all.insert(all.end(), sl.lines.begin(), sl.lines.end());
      slots.push_back(std::move(sl.slot));
    }
    std::vector<int> level;
    if constexpr (ScalarTraits<S>::exact) {
      level = compute_ranks<S>(all, range.lo, range.hi);
    } else {
      level = rank_order_at<S>(all, mid);
    }
    for (std::size_t s = 0; s < part.stems.size(); ++s) {
      auto rank6 = slots[s];
      for (auto& row : rank6) {
        for (int& p : row) p = p < 0 ? -1 : level[offset[s] + p];
      }
      auto cr = cleanup_continuous(part.stems[s], rank6);
      tables.push_back(build_stem_tables_continuous(part.stems[s], std::move(cr), mid, rank6));
    }
  } else {
    for (const auto& st : part.stems) {
      tables.push_back(build_stem_tables_discrete(st, cleanup_discrete(st, mid), mid, rank));
    }
  }
  return FastFeasibility<S>(part, std::move(tables), var, committed);
}

// Runs the phases one at a time so tests can stop after any of them.
template <class S>
class Solver {
 public:
  Solver(const Tree<S>& t, long long k, SolverConfig cfg = {})
      : k_(k), cfg_(cfg), rt_(t, 0), greedy_(rt_), work_(rt_) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    const int n = rt_.size();
    stats_.r = cfg.r > 0 ? std::min(cfg.r, n) : default_block_length(n);
  }

  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  SolveResult<S> run() {
    SolveResult<S> out;
    if (!solved_at_zero()) {
      preprocess();
      phase0();
      phase1();
      phase2();
    }
    out.lambda_star = lambda_star();
    if constexpr (ScalarTraits<S>::exact) {
      if (!reference(out.lambda_star)) throw std::logic_error("final value is infeasible");
    }
    out.centers = GreedyCover<S>(rt_).run(widened(out.lambda_star), cfg_.variant, k_).centers;
    out.stats = stats_;
    return out;
  }

  // Tests 0 first; every later test then lies strictly above the range's
  // lower end.
  bool solved_at_zero() {
    ++stats_.tests_preprocess;
    zero_ = reference(S(0));
    return zero_;
  }

  void preprocess() {
    auto started = now();
    S wmax(0), total(0);
    for (int v = 0; v < rt_.size(); ++v) {
      if (wmax < rt_.weight(v)) wmax = rt_.weight(v);
      if (v != rt_.root()) total = total + rt_.parent_length(v);
    }
    range_ = {S(0), wmax * total};
    std::vector<TaggedLine<S>> lines;
    lines.reserve(rt_.size());
    for (int v = 0; v < rt_.size(); ++v) lines.push_back({falling_through(rt_.weight(v), rt_.rootdist(v)), v, -1});
    search_lines(lines, stats_.tests_preprocess, false);
    rank_ = ranks_in(lines);
    stats_.ms_preprocess = elapsed(started);
  }

  void phase0() {
    auto started = now();
    const long long n = rt_.size();
    const int r = stats_.r;
    while (static_cast<long long>(work_.leaves()) * r > 2 * n) {
      stats_.phase0_leaves.push_back(work_.leaves());
      auto stems = work_.leaf_stems(r);
      if (stems.empty()) break;
      std::vector<SortedMatrix<S>> pool;
      std::vector<int> owner;
      long long backbone = 0;
      for (int s = 0; s < static_cast<int>(stems.size()); ++s) {
        for (auto& m : stem_matrices(stems[s], cfg_.variant)) {
          pool.push_back(std::move(m));
          owner.push_back(s);
        }
        backbone += stems[s].size();
      }
      auto res = msearch<S>(pool, range_, backbone / (2LL * r), counted(stats_.tests_phase0));
      narrow_to(res.range.lo, res.range.hi);
      std::vector<char> active(stems.size(), 0);
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (res.matrix_active[j]) active[owner[j]] = 1;
      }
      int done = 0;
      for (std::size_t s = 0; s < stems.size(); ++s) {
        if (active[s]) continue;
        replace(stems[s]);
        ++done;
      }
      ++stats_.phase0_rounds;
      if (done == 0) break;
    }
    stats_.phase0_leaves.push_back(work_.leaves());
    stats_.committed_phase0 = committed_;
    stats_.ms_phase0 = elapsed(started);
  }

  void phase1() {
    auto started = now();
    auto part = work_.partition(stats_.r);
    stats_.substems = static_cast<int>(part.stems.size());
    if (cfg_.variant == Variant::continuous) {
      std::vector<TaggedLine<S>> all;
      for (const auto& st : part.stems) {
        auto sl = stem_lines(st, static_cast<int>(all.size()));
        all.insert(all.end(), sl.lines.begin(), sl.lines.end());
      }
      search_lines(all, stats_.tests_phase1, false);
    } else {
      search_matrices(part.stems, stats_.tests_phase1, false);
    }
    fast_ = std::make_unique<FastFeasibility<S>>(build_fast_feasibility(part, range_, cfg_.variant, rank_, committed_));
    stats_.ms_phase1 = elapsed(started);
  }

  void phase2() {
    auto started = now();
    while (!work_.only_root()) {
      auto stems = work_.leaf_stems(INT_MAX);
      narrow_over(stems, true);
      for (const auto& st : stems) replace(st);
      ++stats_.phase2_rounds;
    }
    narrow_over(std::vector<Stem<S>>{work_.root_stem()}, false);
    stats_.ms_phase2 = elapsed(started);
  }

  S lambda_star() const { return zero_ ? S(0) : range_.hi; }
  const LambdaRange<S>& range() const { return range_; }
  const WorkingTree<S>& working() const { return work_; }
  const RootedTree<S>& rooted() const { return rt_; }
  long long remaining_k() const { return k_ - committed_; }
  std::span<const int> ranks() const { return rank_; }
  const FastFeasibility<S>* fast() const { return fast_.get(); }
  const SolveStats& stats() const { return stats_; }

  // Greedy verdict at lambda for the input instance.
  bool reference(const S& lambda) { return greedy_.count(widened(lambda), cfg_.variant, k_) <= k_; }

  // Float runs judge every value a relative 1e-12 above the one asked for.
  static S widened(const S& lambda) {
    if constexpr (ScalarTraits<S>::exact) {
      return lambda;
    } else {
      return lambda + (lambda < S(0) ? S(0) - lambda : lambda) * S(1e-12);
    }
  }

 private:
  using Clock = std::chrono::steady_clock;
  static Clock::time_point now() { return Clock::now(); }
  static double elapsed(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
  }

  std::function<bool(const S&)> counted(long long& counter) {
    return [this, &counter](const S& lambda) {
      ++counter;
      return reference(lambda);
    };
  }

  std::function<bool(const S&)> fast_tester(long long& counter) {
    return [this, &counter](const S& lambda) {
      ++counter;
      if constexpr (ScalarTraits<S>::exact) {
        if (!range_.contains(lambda)) throw std::logic_error("fast test outside its valid range");
      }
      const bool verdict = fast_->feasible(widened(lambda), k_);
      if (cfg_.cross_check) {
        ++stats_.fast_checked;
        if (verdict != reference(lambda)) ++stats_.fast_mismatches;
      }
      return verdict;
    };
  }

  void narrow_to(const S& lo, const S& hi) {
    if constexpr (ScalarTraits<S>::exact) {
      if (lo < range_.lo || range_.hi < hi || !(lo < hi)) throw std::logic_error("search range did not narrow");
    } else if (!(lo < hi)) {
      return;
    }
    range_ = {lo, hi};
  }

  std::vector<int> ranks_in(std::span<const TaggedLine<S>> lines) const {
    if constexpr (ScalarTraits<S>::exact) return compute_ranks(lines, range_.lo, range_.hi);
    return rank_order_at(lines, midpoint(range_.lo, range_.hi));
  }

  void search_lines(std::span<const TaggedLine<S>> tagged, long long& counter, bool fast) {
    std::vector<Line<S>> plain;
    plain.reserve(tagged.size());
    for (const auto& l : tagged) plain.push_back(l.line);
    auto tester = fast ? fast_tester(counter) : counted(counter);
    auto res = find_boundary_vertices<S>(plain, tester, range_, cfg_.seed + counter);
    narrow_to(*res.lo, *res.hi);
  }

  void search_matrices(std::span<const Stem<S>> stems, long long& counter, bool fast) {
    std::vector<SortedMatrix<S>> pool;
    for (const auto& st : stems) {
      for (auto& m : discrete_stem_arrays(st)) pool.push_back(std::move(m));
    }
    auto tester = fast ? fast_tester(counter) : counted(counter);
    auto res = msearch<S>(pool, range_, 0, tester);
    narrow_to(res.range.lo, res.range.hi);
  }

  void narrow_over(const std::vector<Stem<S>>& stems, bool replacing) {
    if (cfg_.variant == Variant::continuous) {
      std::vector<TaggedLine<S>> all;
      for (const auto& st : stems) {
        auto sl = stem_lines(st, static_cast<int>(all.size()));
        all.insert(all.end(), sl.lines.begin(), sl.lines.end());
      }
      search_lines(all, stats_.tests_phase2, true);
      if (replacing) {
        std::vector<SortedMatrix<S>> pool;
        for (const auto& st : stems) pool.push_back(top_distance_array(st));
        auto res = msearch<S>(pool, range_, 0, fast_tester(stats_.tests_phase2));
        narrow_to(res.range.lo, res.range.hi);
      }
    } else {
      search_matrices(stems, stats_.tests_phase2, true);
    }
  }

  void replace(const Stem<S>& st) {
    auto rep = postprocess(st, midpoint(range_.lo, range_.hi), std::span<const int>(rank_), cfg_.variant);
    check_attachment(rep, range_);
    committed_ += work_.replace(st, rep, rank_);
    ++stats_.stems_replaced;
  }

  long long k_;
  SolverConfig cfg_;
  RootedTree<S> rt_;
  GreedyCover<S> greedy_;
  WorkingTree<S> work_;
  LambdaRange<S> range_{};
  std::vector<int> rank_;
  long long committed_ = 0;
  bool zero_ = false;
  std::unique_ptr<FastFeasibility<S>> fast_;
  SolveStats stats_;
};

template <class S>
SolveResult<S> solve(const Tree<S>& t, long long k, const SolverConfig& cfg = {}) {
  return Solver<S>(t, k, cfg).run();
}

}  // namespace kcenter
