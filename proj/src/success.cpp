#include "coopsched/success.hpp"

#include <cmath>

namespace coopsched {

namespace {

// Maps a stationary vector from one enumeration onto another by state lookup;
// states absent from the old space start at zero mass.
std::vector<double> map_onto(const StateSpace& from, const std::vector<double>& pi,
                             const StateSpace& onto) {
  std::vector<double> out(onto.size(), 0.0);
  for (std::size_t i = 0; i < from.size(); ++i) {
    const std::int32_t j = onto.index_of(from.state(static_cast<std::int32_t>(i)));
    if (j >= 0) out[j] = pi[i];
  }
  return out;
}

}  // namespace

AnalyticDetail analytic_success_detailed(const SystemConfig& cfg, const GridSpec* grid,
                                         const SolveOptions& solve,
                                         const AnalyticDetail* warm_from) {
  const SystemConfig checked_cfg = checked(cfg);
  const int n = checked_cfg.num_classes();

  AnalyticDetail detail{StateSpace::enumerate(checked_cfg), {}, {}};
  const Generator gen = Generator::build(checked_cfg, detail.space);

  if (warm_from != nullptr) {
    const std::vector<double> guess =
        map_onto(warm_from->space, warm_from->stationary.probabilities, detail.space);
    detail.stationary = solve_stationary(gen, solve, &guess);
  } else {
    detail.stationary = solve_stationary(gen, solve);
  }
  const std::vector<double>& pi = detail.stationary.probabilities;

  PolicyOutcome& out = detail.outcome;
  out.per_class_success.assign(n, 0.0);
  out.offload_fraction.assign(n, 0.0);
  out.simulated = false;

  for (int i = 0; i < n; ++i) {
    const double T = checked_cfg.classes[i].delay_bound;
    const double immediate = service_sojourn_cdf(checked_cfg.service_rate, T);
    const double diverted = internet_success(checked_cfg.internet, T);
    double success = 0.0;
    double offload = 0.0;
    for (std::size_t k = 0; k < detail.space.size(); ++k) {
      const QueueState& st = detail.space.state(static_cast<std::int32_t>(k));
      if (pi[k] == 0.0) continue;
      if (st.busy_servers < checked_cfg.servers) {
        success += pi[k] * immediate;
        continue;
      }
      bool binding = false;
      int cumulative = 0;
      for (int j = 0; j < n; ++j) {
        cumulative += st.queue_lengths[j];
        if (j >= i && cumulative == checked_cfg.thresholds[j]) {
          binding = true;
          break;
        }
      }
      if (binding) {
        success += pi[k] * diverted;
        offload += pi[k];
      } else {
        success += pi[k] * sojourn_success_given_state(checked_cfg, st, i, grid);
      }
    }
    out.per_class_success[i] = success;
    out.offload_fraction[i] = offload;
  }

  double weighted = 0.0;
  const double lambda_total = checked_cfg.total_arrival_rate();
  for (int i = 0; i < n; ++i)
    weighted += checked_cfg.classes[i].arrival_rate * out.per_class_success[i];
  out.total_success = weighted / lambda_total;
  return detail;
}

PolicyOutcome analytic_success(const SystemConfig& cfg, const GridSpec* grid,
                               const SolveOptions& solve) {
  return analytic_success_detailed(cfg, grid, solve).outcome;
}

PolicyOutcome fcfs_analytic_success(const SystemConfig& cfg, int threshold,
                                    const GridSpec* grid, const SolveOptions& solve) {
  const SystemConfig checked_cfg = checked(cfg);
  if (threshold < 0) throw Error("fcfs threshold must be >= 0");
  const int n = checked_cfg.num_classes();

  // one aggregate class; the delay bound placeholder never enters the chain
  SystemConfig reduced = checked_cfg;
  reduced.classes = {TaskClassSpec{1, checked_cfg.total_arrival_rate(),
                                   checked_cfg.classes.front().delay_bound}};
  reduced.thresholds = {threshold};

  const StateSpace space = StateSpace::enumerate(reduced);
  const Generator gen = Generator::build(reduced, space);
  const StationaryDistribution stat = solve_stationary(gen, solve);
  const std::vector<double>& pi = stat.probabilities;

  const GridSpec work{grid != nullptr ? grid->dt : 0.1,
                      checked_cfg.max_delay_bound()};

  PolicyOutcome out;
  out.per_class_success.assign(n, 0.0);
  out.offload_fraction.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double T = checked_cfg.classes[i].delay_bound;
    const double immediate = service_sojourn_cdf(checked_cfg.service_rate, T);
    const double diverted = internet_success(checked_cfg.internet, T);
    double success = 0.0;
    double offload = 0.0;
    for (std::size_t k = 0; k < space.size(); ++k) {
      const QueueState& st = space.state(static_cast<std::int32_t>(k));
      if (pi[k] == 0.0) continue;
      if (st.busy_servers < checked_cfg.servers) {
        success += pi[k] * immediate;
      } else if (st.queue_lengths[0] == threshold) {
        success += pi[k] * diverted;
        offload += pi[k];
      } else {
        success += pi[k] * sojourn_success_queued(0.0, checked_cfg.servers,
                                                  checked_cfg.service_rate, T,
                                                  st.queue_lengths[0], work);
      }
    }
    out.per_class_success[i] = success;
    out.offload_fraction[i] = offload;
  }
  double weighted = 0.0;
  for (int i = 0; i < n; ++i)
    weighted += checked_cfg.classes[i].arrival_rate * out.per_class_success[i];
  out.total_success = weighted / checked_cfg.total_arrival_rate();
  return out;
}

FcfsBest fcfs_best_threshold(const SystemConfig& cfg, int max_threshold,
                             const GridSpec* grid, const SolveOptions& solve) {
  FcfsBest best;
  best.threshold = -1;
  double best_total = -1.0;
  for (int b = 0; b <= max_threshold; ++b) {
    PolicyOutcome outcome = fcfs_analytic_success(cfg, b, grid, solve);
    best.sweep.emplace_back(b, outcome.total_success);
    if (outcome.total_success > best_total) {
      best_total = outcome.total_success;
      best.threshold = b;
      best.outcome = std::move(outcome);
    }
  }
  return best;
}

}  // namespace coopsched
