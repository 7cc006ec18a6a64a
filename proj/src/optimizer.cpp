#include "coopsched/optimizer.hpp"

#include <optional>
#include <sstream>

namespace coopsched {

double MemoizedObjective::evaluate(const std::vector<int>& thresholds, bool* was_cached) {
  auto it = memo_.find(thresholds);
  if (it != memo_.end()) {
    if (was_cached != nullptr) *was_cached = true;
    return it->second;
  }
  if (was_cached != nullptr) *was_cached = false;
  const double value = fn_(thresholds);
  memo_.emplace(thresholds, value);
  ++evaluations_;
  return value;
}

MemoizedObjective MemoizedObjective::for_config(const SystemConfig& base, const GridSpec* grid,
                                                SolveOptions solve) {
  auto previous = std::make_shared<std::optional<AnalyticDetail>>();
  std::optional<GridSpec> grid_copy;
  if (grid != nullptr) grid_copy = *grid;
  return MemoizedObjective(
      [base, grid_copy, solve, previous](const std::vector<int>& thresholds) {
        const GridSpec* g = grid_copy.has_value() ? &*grid_copy : nullptr;
        const AnalyticDetail* warm =
            previous->has_value() ? &previous->value() : nullptr;
        AnalyticDetail detail =
            analytic_success_detailed(base.with_thresholds(thresholds), g, solve, warm);
        const double total = detail.outcome.total_success;
        *previous = std::move(detail);
        return total;
      });
}

namespace {

class LocalSearch {
 public:
  LocalSearch(int num_classes, MemoizedObjective& objective, long budget)
      : n_(num_classes),
        objective_(objective),
        budget_(budget),
        start_evals_(objective.evaluations()) {}

  ThresholdSearchResult run() {
    std::vector<int> thresholds(n_, 0);
    thresholds = optimize_from(0, std::move(thresholds));
    result_.thresholds = thresholds;
    result_.total_success = objective_.evaluate(thresholds);
    result_.evaluations = objective_.evaluations() - start_evals_;
    return std::move(result_);
  }

 private:
  double eval(const std::vector<int>& thresholds) {
    if (objective_.evaluations() - start_evals_ >= budget_) {
      result_.evaluations = objective_.evaluations() - start_evals_;
      std::ostringstream os;
      os << "threshold search exceeded its evaluation budget of " << budget_;
      throw BudgetError(os.str(), result_);
    }
    bool cached = false;
    const double value = objective_.evaluate(thresholds, &cached);
    result_.trace.push_back(SearchTraceEntry{thresholds, value, cached, false});
    return value;
  }

  void mark_accepted() {
    if (!result_.trace.empty()) result_.trace.back().accepted = true;
  }

  // One level of the recursion: reset coordinates at and beyond `coord` to
  // the value of the previous coordinate, optimize the tail, then climb this
  // coordinate while the objective does not strictly decrease.
  std::vector<int> optimize_from(int coord, std::vector<int> thresholds) {
    const int floor = coord == 0 ? 0 : thresholds[coord - 1];
    for (int k = coord; k < n_; ++k) thresholds[k] = floor;

    if (coord == n_ - 1) {
      double previous = eval(thresholds);
      double current = previous;
      while (previous <= current) {
        mark_accepted();
        ++thresholds[coord];
        previous = current;
        current = eval(thresholds);
      }
      --thresholds[coord];
      return thresholds;
    }

    thresholds = optimize_from(coord + 1, std::move(thresholds));
    double previous = eval(thresholds);
    double current = previous;
    while (previous <= current) {
      mark_accepted();
      ++thresholds[coord];
      thresholds = optimize_from(coord + 1, std::move(thresholds));
      previous = current;
      current = eval(thresholds);
    }
    --thresholds[coord];
    return optimize_from(coord + 1, std::move(thresholds));
  }

  int n_;
  MemoizedObjective& objective_;
  long budget_;
  long start_evals_;
  ThresholdSearchResult result_;
};

}  // namespace

ThresholdSearchResult find_local_optimal(int num_classes, MemoizedObjective& objective,
                                         long budget) {
  if (num_classes < 1) throw Error("find_local_optimal: need at least one class");
  return LocalSearch(num_classes, objective, budget).run();
}

ThresholdSearchResult find_local_optimal(const SystemConfig& cfg, const GridSpec* grid,
                                         long budget) {
  MemoizedObjective objective = MemoizedObjective::for_config(cfg, grid);
  return find_local_optimal(cfg.num_classes(), objective, budget);
}

ThresholdSearchResult exhaustive_search(int num_classes, MemoizedObjective& objective,
                                        const std::vector<int>& caps, long budget) {
  if (static_cast<int>(caps.size()) != num_classes)
    throw Error("exhaustive_search: caps must have one entry per class");
  ThresholdSearchResult result;
  const long start_evals = objective.evaluations();
  std::vector<int> thresholds(num_classes, 0);
  bool have_best = false;

  auto recurse = [&](auto&& self, int coord) -> void {
    if (coord == num_classes) {
      if (objective.evaluations() - start_evals >= budget) {
        result.evaluations = objective.evaluations() - start_evals;
        throw BudgetError("exhaustive search exceeded its evaluation budget", result);
      }
      bool cached = false;
      const double value = objective.evaluate(thresholds, &cached);
      result.trace.push_back(SearchTraceEntry{thresholds, value, cached, false});
      // lexicographic enumeration: strict improvement keeps the smallest tie
      if (!have_best || value > result.total_success) {
        have_best = true;
        result.total_success = value;
        result.thresholds = thresholds;
        result.trace.back().accepted = true;
      }
      return;
    }
    const int low = coord == 0 ? 0 : thresholds[coord - 1];
    for (int b = low; b <= caps[coord]; ++b) {
      thresholds[coord] = b;
      self(self, coord + 1);
    }
    thresholds[coord] = low;
  };
  recurse(recurse, 0);

  if (!have_best) throw Error("exhaustive_search: empty grid (caps below the floor)");
  for (int i = 0; i < num_classes; ++i)
    if (result.thresholds[i] == caps[i]) result.boundary_warning = true;
  result.evaluations = objective.evaluations() - start_evals;
  return result;
}

ThresholdSearchResult exhaustive_search(const SystemConfig& cfg, const std::vector<int>& caps,
                                        const GridSpec* grid) {
  MemoizedObjective objective = MemoizedObjective::for_config(cfg, grid);
  return exhaustive_search(cfg.num_classes(), objective, caps);
}

}  // namespace coopsched
