#ifndef COOPSCHED_SUCCESS_HPP
#define COOPSCHED_SUCCESS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "coopsched/delay.hpp"
#include "coopsched/stationary.hpp"

// Per-class and total success probabilities: conditional sojourn success
// mixed over the stationary distribution. Poisson arrivals see time averages,
// so the stationary law is also the arrival-epoch law.

namespace coopsched {

struct PolicyOutcome {
  std::vector<double> per_class_success;
  double total_success = 0.0;             // arrival-rate-weighted average
  std::vector<double> offload_fraction;   // P(arrival of class i is diverted)
  bool simulated = false;                 // source tag: analytic or simulated
  std::vector<double> ci_half;            // 95% half-widths, simulated only
  double total_ci_half = 0.0;
};

// Carries the solved chain alongside the outcome so sweeps over neighboring
// threshold vectors can reuse the previous solution as a warm start.
struct AnalyticDetail {
  StateSpace space;
  StationaryDistribution stationary;
  PolicyOutcome outcome;
};

// A class-i arrival is diverted in states where some cumulative cap at or
// above i binds; admitted arrivals succeed with the conditional sojourn
// probability, diverted ones with the Internet CDF at their bound.
AnalyticDetail analytic_success_detailed(const SystemConfig& cfg,
                                         const GridSpec* grid = nullptr,
                                         const SolveOptions& solve = {},
                                         const AnalyticDetail* warm_from = nullptr);

PolicyOutcome analytic_success(const SystemConfig& cfg, const GridSpec* grid = nullptr,
                               const SolveOptions& solve = {});

// FCFS comparison policy: classes collapse to one aggregate stream with a
// single queue-length threshold; each original delay bound is evaluated
// against the same one-dimensional birth-death chain, with queue position =
// queue length at arrival and no higher-priority interruptions.
PolicyOutcome fcfs_analytic_success(const SystemConfig& cfg, int threshold,
                                    const GridSpec* grid = nullptr,
                                    const SolveOptions& solve = {});

struct FcfsBest {
  int threshold = 0;
  PolicyOutcome outcome;
  std::vector<std::pair<int, double>> sweep;  // (threshold, total success)
};

// Sweeps the FCFS threshold over 0..max_threshold and keeps the best total.
FcfsBest fcfs_best_threshold(const SystemConfig& cfg, int max_threshold = 150,
                             const GridSpec* grid = nullptr, const SolveOptions& solve = {});

}  // namespace coopsched

#endif  // COOPSCHED_SUCCESS_HPP
