#ifndef COOPSCHED_EXPERIMENT_HPP
#define COOPSCHED_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "coopsched/optimizer.hpp"
#include "coopsched/simulator.hpp"

// Batch experiment runner: sweep the total arrival rate with a fixed class
// mix, run the analytic and simulated pipelines per policy, optimize
// thresholds, and emit plot-ready CSV files.

namespace coopsched {

struct ExperimentPlan {
  SystemConfig base;               // class mix and delay bounds come from here
  std::vector<double> load_grid;   // total arrival rates, strictly increasing
  std::vector<Policy> policies = {Policy::PriorityCooperation, Policy::LocalOnly,
                                  Policy::Greedy, Policy::FcfsCooperation, Policy::NonBuffer};
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  long tasks = 200000;
  double warmup_fraction = 0.1;
  GridSpec grid;                   // dt <= 0 or horizon <= 0 pick the defaults
  int jobs = 1;
  long optimizer_budget = 10000;
  int fcfs_max_threshold = 150;
  // The local optimum is re-checked against exhaustive search when the search
  // box (optimum plus margin) stays affordable; beyond the cap the fig7 row
  // records the check as skipped.
  int exhaustive_margin = 5;
  int exhaustive_cap = 30;
};

// points values spanning 0.2 .. 1.4 of the pooled service rate.
std::vector<double> default_load_grid(const SystemConfig& cfg, int points = 12);

struct PlanError {
  double lambda_total;
  std::string stage;
  std::string message;
};

struct PlanResult {
  std::vector<PlanError> errors;
  std::vector<std::string> files_written;
};

// Writes fig5.csv (cooperation vs. local-only), fig6.csv (priority vs.
// non-priority policies), fig7.csv (optimal thresholds per load), each only
// when the plan's policy list touches it. Files are written once, atomically,
// after every sweep point finished; per-point failures are collected and the
// remaining rows still appear.
PlanResult run_plan(const ExperimentPlan& plan);

}  // namespace coopsched

#endif  // COOPSCHED_EXPERIMENT_HPP
