#include "coopsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

namespace coopsched {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt + 0x9e3779b97f4a7c15ull);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

struct PolicyPointOutcome {
  bool has_analytic = false;
  PolicyOutcome analytic;
  bool has_sim = false;
  SimReport sim;
  int fcfs_threshold = -1;
};

struct PointData {
  double lambda = 0.0;
  std::map<Policy, PolicyPointOutcome> per_policy;
  bool has_fig7 = false;
  ThresholdSearchResult local;
  std::string matched_exhaustive = "skipped";
  std::vector<PlanError> errors;
};

bool wants(const ExperimentPlan& plan, Policy p) {
  return std::find(plan.policies.begin(), plan.policies.end(), p) != plan.policies.end();
}

const GridSpec* plan_grid(const ExperimentPlan& plan, GridSpec& storage) {
  if (plan.grid.dt > 0.0 || plan.grid.horizon > 0.0) {
    storage = plan.grid;
    if (storage.dt <= 0.0) storage.dt = 0.1;
    return &storage;
  }
  return nullptr;
}

PointData run_point(const ExperimentPlan& plan, double lambda, std::uint64_t point_seed) {
  PointData point;
  point.lambda = lambda;
  const SystemConfig cfg = plan.base.with_total_rate(lambda);
  GridSpec grid_storage;
  const GridSpec* grid = plan_grid(plan, grid_storage);

  auto guard = [&](const char* stage, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      point.errors.push_back(PlanError{lambda, stage, e.what()});
    }
  };

  auto simulate = [&](Policy policy, const SystemConfig& sim_cfg, int fcfs_threshold) {
    SimConfig sc;
    sc.system = sim_cfg;
    sc.policy = policy;
    sc.fcfs_threshold = fcfs_threshold;
    sc.task_budget = plan.tasks;
    sc.warmup_fraction = plan.warmup_fraction;
    sc.seed = point_seed;  // shared across policies: common random numbers
    if (grid != nullptr) sc.grid = *grid;
    return run_simulation(sc);
  };

  if (wants(plan, Policy::PriorityCooperation)) {
    guard("optimize-thresholds", [&] {
      MemoizedObjective objective = MemoizedObjective::for_config(cfg, grid);
      point.local = find_local_optimal(cfg.num_classes(), objective, plan.optimizer_budget);
      point.has_fig7 = true;

      const int top = point.local.thresholds.back();
      if (top + plan.exhaustive_margin <= plan.exhaustive_cap) {
        const std::vector<int> caps(cfg.num_classes(), top + plan.exhaustive_margin);
        const ThresholdSearchResult global =
            exhaustive_search(cfg.num_classes(), objective, caps);
        point.matched_exhaustive =
            std::fabs(global.total_success - point.local.total_success) <= 1e-12 ? "true"
                                                                                 : "false";
      }

      const SystemConfig tuned = cfg.with_thresholds(point.local.thresholds);
      auto& slot = point.per_policy[Policy::PriorityCooperation];
      slot.analytic = analytic_success(tuned, grid);
      slot.has_analytic = true;
      slot.sim = simulate(Policy::PriorityCooperation, tuned, 0);
      slot.has_sim = true;
    });
  }
  if (wants(plan, Policy::LocalOnly)) {
    guard("local-only", [&] {
      auto& slot = point.per_policy[Policy::LocalOnly];
      slot.sim = simulate(Policy::LocalOnly, cfg, 0);
      slot.has_sim = true;
    });
  }
  if (wants(plan, Policy::Greedy)) {
    guard("greedy", [&] {
      auto& slot = point.per_policy[Policy::Greedy];
      slot.sim = simulate(Policy::Greedy, cfg, 0);
      slot.has_sim = true;
    });
  }
  if (wants(plan, Policy::FcfsCooperation)) {
    guard("fcfs", [&] {
      auto& slot = point.per_policy[Policy::FcfsCooperation];
      const FcfsBest best = fcfs_best_threshold(cfg, plan.fcfs_max_threshold, grid);
      slot.fcfs_threshold = best.threshold;
      slot.analytic = best.outcome;
      slot.has_analytic = true;
      slot.sim = simulate(Policy::FcfsCooperation, cfg, best.threshold);
      slot.has_sim = true;
    });
  }
  if (wants(plan, Policy::NonBuffer)) {
    guard("non-buffer", [&] {
      auto& slot = point.per_policy[Policy::NonBuffer];
      const SystemConfig closed =
          cfg.with_thresholds(std::vector<int>(cfg.num_classes(), 0));
      slot.analytic = analytic_success(closed, grid);
      slot.has_analytic = true;
      slot.sim = simulate(Policy::NonBuffer, closed, 0);
      slot.has_sim = true;
    });
  }
  return point;
}

void append_outcome_rows(std::string& out, double lambda, Policy policy,
                         const PolicyPointOutcome& slot) {
  const std::string name = policy_name(policy);
  if (slot.has_analytic) {
    const auto& a = slot.analytic;
    for (std::size_t i = 0; i < a.per_class_success.size(); ++i) {
      out += fmt(lambda) + ',' + name + ',' + std::to_string(i + 1) + ',' +
             fmt(a.per_class_success[i]) + ",0," + fmt(a.offload_fraction[i]) + ",analytic\n";
    }
    double offload_total = 0.0;  // rate-weighted like the total success
    for (std::size_t i = 0; i < a.offload_fraction.size(); ++i)
      offload_total += a.offload_fraction[i];
    offload_total /= static_cast<double>(a.offload_fraction.size());
    out += fmt(lambda) + ',' + name + ",total," + fmt(a.total_success) + ",0," +
           fmt(offload_total) + ",analytic\n";
  }
  if (slot.has_sim) {
    const auto& s = slot.sim;
    for (std::size_t i = 0; i < s.per_class_success.size(); ++i) {
      out += fmt(lambda) + ',' + name + ',' + std::to_string(i + 1) + ',' +
             fmt(s.per_class_success[i]) + ',' + fmt(s.per_class_ci[i]) + ',' +
             fmt(s.offload_fraction[i]) + ",simulated\n";
    }
    out += fmt(lambda) + ',' + name + ",total," + fmt(s.total_success) + ',' +
           fmt(s.total_ci) + ',' + fmt(s.offload_total) + ",simulated\n";
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content,
                  PlanResult& result) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
  result.files_written.push_back(path.string());
}

}  // namespace

std::vector<double> default_load_grid(const SystemConfig& cfg, int points) {
  const double pooled = cfg.pooled_service_rate();
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k)
    grid[k] = pooled * (0.2 + 1.2 * static_cast<double>(k) / (points - 1));
  return grid;
}

PlanResult run_plan(const ExperimentPlan& plan) {
  checked(plan.base);
  if (plan.load_grid.empty()) throw Error("experiment plan: empty load grid");
  for (std::size_t k = 1; k < plan.load_grid.size(); ++k)
    if (plan.load_grid[k] <= plan.load_grid[k - 1])
      throw Error("experiment plan: load grid must be strictly increasing");
  if (plan.policies.empty()) throw Error("experiment plan: no policies selected");

  std::filesystem::create_directories(plan.out_dir);

  std::vector<PointData> points(plan.load_grid.size());
  std::atomic<std::size_t> next{0};
  const int jobs = std::max(1, plan.jobs);
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= plan.load_grid.size()) return;
      points[k] = run_point(plan, plan.load_grid[k], mix_seed(plan.seed, k + 1));
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  PlanResult result;
  for (const auto& p : points)
    result.errors.insert(result.errors.end(), p.errors.begin(), p.errors.end());

  const char* header = "lambda_total,policy,class,success,ci_halfwidth,offload_fraction,source\n";

  const std::vector<Policy> fig5_set{Policy::PriorityCooperation, Policy::LocalOnly};
  const std::vector<Policy> fig6_set{Policy::PriorityCooperation, Policy::Greedy,
                                     Policy::FcfsCooperation, Policy::NonBuffer};
  const bool write_fig5 =
      wants(plan, Policy::PriorityCooperation) || wants(plan, Policy::LocalOnly);
  const bool write_fig6 = wants(plan, Policy::Greedy) ||
                          wants(plan, Policy::FcfsCooperation) ||
                          wants(plan, Policy::NonBuffer);
  const bool write_fig7 = wants(plan, Policy::PriorityCooperation);

  if (write_fig5) {
    std::string body(header);
    for (const auto& p : points)
      for (Policy policy : fig5_set)
        if (auto it = p.per_policy.find(policy); it != p.per_policy.end())
          append_outcome_rows(body, p.lambda, policy, it->second);
    write_atomic(std::filesystem::path(plan.out_dir) / "fig5.csv", body, result);
  }
  if (write_fig6) {
    std::string body(header);
    for (const auto& p : points)
      for (Policy policy : fig6_set)
        if (auto it = p.per_policy.find(policy); it != p.per_policy.end())
          append_outcome_rows(body, p.lambda, policy, it->second);
    write_atomic(std::filesystem::path(plan.out_dir) / "fig6.csv", body, result);
  }
  if (write_fig7) {
    std::string body("lambda_total");
    const int n = plan.base.num_classes();
    for (int i = 1; i <= n; ++i) body += ",B_" + std::to_string(i);
    body += ",total_success,evaluations,matched_exhaustive\n";
    for (const auto& p : points) {
      if (!p.has_fig7) continue;
      body += fmt(p.lambda);
      for (int b : p.local.thresholds) body += ',' + std::to_string(b);
      body += ',' + fmt(p.local.total_success) + ',' + std::to_string(p.local.evaluations) +
              ',' + p.matched_exhaustive + '\n';
    }
    write_atomic(std::filesystem::path(plan.out_dir) / "fig7.csv", body, result);
  }
  return result;
}

}  // namespace coopsched
