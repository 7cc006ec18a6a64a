#ifndef COOPSCHED_DOMAIN_HPP
#define COOPSCHED_DOMAIN_HPP

#include <string>
#include <vector>

#include "coopsched/errors.hpp"

// Core typed model of the cooperative local-cloud / Internet-cloud system.
// Units everywhere: time in milliseconds, rates in tasks per millisecond.
// Task classes are indexed 0-based in code; class 0 has the tightest delay
// bound and therefore the highest priority.

namespace coopsched {

struct TaskClassSpec {
  int priority_index = 1;      // 1 = highest priority (display/order only)
  double arrival_rate = 0.0;   // tasks/ms, > 0
  double delay_bound = 0.0;    // ms, > 0; already net of the constant access delay
};

// Two-branch transmission-delay mixture: with weight p the delay is the
// router component alone, with weight 1-p the router and queueing components
// in series. Both components are exponential with the configured means.
struct InternetDelayParams {
  double router_weight = 0.5;  // p in (0, 1]
  double router_mean = 100.0;  // ms, mean of the router component
  double queue_mean = 200.0;   // ms, mean of the queueing component

  double queue_weight() const { return 1.0 - router_weight; }
  // p*m1 + (1-p)*(m1+m2)
  double mean() const { return router_mean + queue_weight() * queue_mean; }
};

struct SystemConfig {
  std::vector<TaskClassSpec> classes;  // sorted so delay bounds are nondecreasing
  int servers = 1;                     // C >= 1
  double service_rate = 1.0;           // mu, per ms, per server
  std::vector<int> thresholds;         // cumulative caps B, nondecreasing, >= 0
  InternetDelayParams internet;

  int num_classes() const { return static_cast<int>(classes.size()); }
  double pooled_service_rate() const { return servers * service_rate; }
  double total_arrival_rate() const;
  double max_delay_bound() const;

  SystemConfig with_thresholds(std::vector<int> b) const;
  // Scales all class rates to the given total, preserving the class mix.
  SystemConfig with_total_rate(double lambda_total) const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks every config invariant and reports all violations at once.
ValidationReport validate_config(const SystemConfig& cfg);

// Returns the config unchanged if valid, else throws ConfigError with the report.
SystemConfig checked(SystemConfig cfg);

// Lambda_i = sum of arrival rates of classes 0..i. Strictly increasing.
std::vector<double> cumulative_rates(const SystemConfig& cfg);

// Lambda_{i-1}: aggregate rate of classes strictly higher priority than
// class_index. Zero for the highest-priority class.
double cumulative_rate_above(const SystemConfig& cfg, int class_index);

// Both load definitions are exposed; stability checks use the pooled form.
double rho_single_server(const SystemConfig& cfg, int class_index);  // Lambda_i / mu
double rho_pooled(const SystemConfig& cfg, int class_index);         // Lambda_i / (C*mu)

// Markov state (s, l_1..l_N). Invariants: s in [0, C]; a server never idles
// while a task waits (s < C implies all l = 0); cumulative queue lengths obey
// the thresholds where they apply.
struct QueueState {
  int busy_servers = 0;
  std::vector<int> queue_lengths;

  // Enforces both invariants against the config's thresholds.
  static QueueState checked(const SystemConfig& cfg, int busy, std::vector<int> lengths);
  // For policies with unbounded queues: enforces everything except the caps.
  static QueueState checked_unbounded(int servers, int busy, std::vector<int> lengths);

  // L_i = sum of queue lengths of classes 0..class_index.
  int cumulative_length(int class_index) const;
  int total_queued() const;

  bool operator==(const QueueState& other) const {
    return busy_servers == other.busy_servers && queue_lengths == other.queue_lengths;
  }
};

// JSON config ingestion. Schema:
// {"servers": int, "service_rate": real,
//  "classes": [{"arrival_rate": real, "delay_bound": real}...],
//  "thresholds": [int...],
//  "internet": {"p": real, "router_mean": real, "queue_mean": real}}
SystemConfig parse_config_json(const std::string& text);
SystemConfig load_config_file(const std::string& path);
std::string config_to_json(const SystemConfig& cfg);

}  // namespace coopsched

#endif  // COOPSCHED_DOMAIN_HPP
