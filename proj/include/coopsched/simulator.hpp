#ifndef COOPSCHED_SIMULATOR_HPP
#define COOPSCHED_SIMULATOR_HPP

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "coopsched/delay.hpp"

// Discrete-event simulation of the local-cloud/Internet-cloud system under
// the five scheduling policies. Per-class Poisson arrivals, exponential
// services, nonpreemptive highest-priority-first dispatch on completion.

namespace coopsched {

enum class Policy {
  PriorityCooperation,  // threshold-gated priority queue, overflow to Internet
  LocalOnly,            // unbounded local queues, never offloads
  Greedy,               // each arrival picks the side with the higher estimate
  FcfsCooperation,      // single FIFO queue with a length threshold
  NonBuffer,            // offload whenever every server is busy
};

std::string policy_name(Policy p);
// Accepts the full names above or the short forms priority|local|greedy|fcfs|nonbuffer.
Policy parse_policy(const std::string& name);

struct SimConfig {
  SystemConfig system;
  Policy policy = Policy::PriorityCooperation;
  int fcfs_threshold = 0;        // FcfsCooperation only
  long task_budget = 100000;
  double warmup_fraction = 0.1;  // leading fraction of tasks excluded from stats
  std::uint64_t seed = 1;
  bool track_occupancy = false;
  GridSpec grid;                 // grid for Greedy success estimates; dt <= 0 uses defaults
};

struct OccupancyStat {
  double fraction = 0.0;
  double ci_half = 0.0;  // batch-means 95% half-width
};

struct SimReport {
  std::vector<double> per_class_success;
  std::vector<double> per_class_ci;      // binomial 95% half-widths
  std::vector<double> offload_fraction;  // fraction of class arrivals sent to the Internet
  std::vector<double> mean_sojourn;      // ms, local and Internet tasks together
  std::vector<long> per_class_counted;
  double total_success = 0.0;
  double total_ci = 0.0;
  double offload_total = 0.0;
  long counted_tasks = 0;
  bool unstable_queue_trend = false;  // queue kept growing over the run
  // time-average visit fraction per state, key = {busy, l_1, .., l_N}
  std::map<std::vector<int>, OccupancyStat> occupancy;
};

// Event-driven run. Identical seeds reproduce identical reports; the arrival
// sample path and the per-task service/Internet draws depend only on the
// seed, not on the policy, so runs that share a seed are common-random-number
// paired across policies.
SimReport run_simulation(const SimConfig& sim);

enum class Route { Local, Internet };

// Routes to the local cloud iff its conditional success estimate is at least
// the Internet's; ties go local. A saturating higher-priority load makes the
// local estimate zero.
Route greedy_decision(const SystemConfig& cfg, const QueueState& state, int class_index,
                      const GridSpec* grid = nullptr);

// One draw from the two-branch transmission-delay mixture.
double sample_internet_delay(const InternetDelayParams& params, std::mt19937_64& rng);

}  // namespace coopsched

#endif  // COOPSCHED_SIMULATOR_HPP
