#ifndef COOPSCHED_OPTIMIZER_HPP
#define COOPSCHED_OPTIMIZER_HPP

#include <functional>
#include <map>
#include <vector>

#include "coopsched/success.hpp"

// Buffer-threshold optimization: the recursive coordinate search plus an
// exhaustive-search oracle over nondecreasing threshold vectors.

namespace coopsched {

using ThresholdObjective = std::function<double(const std::vector<int>&)>;

struct SearchTraceEntry {
  std::vector<int> thresholds;
  double success = 0.0;
  bool cached = false;    // memo hit
  bool accepted = false;  // the step was kept by the search
};

struct ThresholdSearchResult {
  std::vector<int> thresholds;
  double total_success = 0.0;
  long evaluations = 0;  // distinct objective computations
  std::vector<SearchTraceEntry> trace;
  bool boundary_warning = false;  // exhaustive optimum touched a cap
};

/// Search exceeded its evaluation budget; partial holds the trace so far.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, ThresholdSearchResult partial)
      : Error(what), partial(std::move(partial)) {}
  ThresholdSearchResult partial;
};

// Memoizes an objective by threshold vector so repeated evaluations return
// bit-identical values; share one instance between the local and exhaustive
// searches when comparing them.
class MemoizedObjective {
 public:
  explicit MemoizedObjective(ThresholdObjective fn) : fn_(std::move(fn)) {}

  // Analytic total success for the base config with swapped-in thresholds.
  // Consecutive evaluations warm-start from the previous chain solution.
  static MemoizedObjective for_config(const SystemConfig& base, const GridSpec* grid = nullptr,
                                      SolveOptions solve = {});

  double evaluate(const std::vector<int>& thresholds, bool* was_cached = nullptr);
  long evaluations() const { return evaluations_; }

 private:
  ThresholdObjective fn_;
  std::map<std::vector<int>, double> memo_;
  long evaluations_ = 0;
};

// Coordinate recursion: reset coordinates i..N to B_{i-1}, optimize the tail,
// then grow B_i while the total success is nondecreasing (plateaus continue
// the climb), stepping back once on the first strict decrease and
// re-optimizing the tail. budget caps distinct objective evaluations.
ThresholdSearchResult find_local_optimal(int num_classes, MemoizedObjective& objective,
                                         long budget = 10000);
ThresholdSearchResult find_local_optimal(const SystemConfig& cfg, const GridSpec* grid = nullptr,
                                         long budget = 10000);

// Evaluates every nondecreasing threshold vector with B_i <= caps[i]; ties
// break toward the lexicographically smallest vector. boundary_warning is set
// when the maximizer touches a cap.
ThresholdSearchResult exhaustive_search(int num_classes, MemoizedObjective& objective,
                                        const std::vector<int>& caps,
                                        long budget = 1000000);
ThresholdSearchResult exhaustive_search(const SystemConfig& cfg, const std::vector<int>& caps,
                                        const GridSpec* grid = nullptr);

}  // namespace coopsched

#endif  // COOPSCHED_OPTIMIZER_HPP
