#include "coopsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

namespace coopsched {

namespace {

constexpr int kOccupancyBatches = 20;
constexpr double kT975Df19 = 2.093;  // two-sided 95% t quantile, 19 df

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exp_draw(std::mt19937_64& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

struct Event {
  double time;
  std::uint64_t seq;  // deterministic tie-break
  enum Kind { Arrival, Departure } kind;
  int cls;    // Arrival
  long task;  // Departure
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct Task {
  double arrival;
  int cls;
  double service;
  double internet_delay;
  bool counted;
};

double binomial_ci_half(double p, long n) {
  if (n <= 0) return 0.0;
  return 1.96 * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

}  // namespace

std::string policy_name(Policy p) {
  switch (p) {
    case Policy::PriorityCooperation: return "PriorityCooperation";
    case Policy::LocalOnly: return "LocalOnly";
    case Policy::Greedy: return "Greedy";
    case Policy::FcfsCooperation: return "FcfsCooperation";
    case Policy::NonBuffer: return "NonBuffer";
  }
  return "?";
}

Policy parse_policy(const std::string& name) {
  if (name == "PriorityCooperation" || name == "priority") return Policy::PriorityCooperation;
  if (name == "LocalOnly" || name == "local") return Policy::LocalOnly;
  if (name == "Greedy" || name == "greedy") return Policy::Greedy;
  if (name == "FcfsCooperation" || name == "fcfs") return Policy::FcfsCooperation;
  if (name == "NonBuffer" || name == "nonbuffer") return Policy::NonBuffer;
  throw Error("unknown policy: " + name);
}

double sample_internet_delay(const InternetDelayParams& params, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double delay = exp_draw(rng, 1.0 / params.router_mean);
  if (u > params.router_weight) delay += exp_draw(rng, 1.0 / params.queue_mean);
  return delay;
}

Route greedy_decision(const SystemConfig& cfg, const QueueState& state, int class_index,
                      const GridSpec* grid) {
  const double T = cfg.classes[class_index].delay_bound;
  const double internet = internet_success(cfg.internet, T);
  double local;
  if (state.busy_servers < cfg.servers) {
    local = service_sojourn_cdf(cfg.service_rate, T);
  } else if (cumulative_rate_above(cfg, class_index) >= cfg.pooled_service_rate()) {
    local = 0.0;  // higher-priority work alone saturates the pool
  } else {
    local = sojourn_success_given_state(cfg, state, class_index, grid);
  }
  return local >= internet ? Route::Local : Route::Internet;
}

SimReport run_simulation(const SimConfig& sim) {
  const SystemConfig cfg = checked(sim.system);
  if (sim.task_budget < 1) throw Error("simulation: task budget must be >= 1");
  if (sim.warmup_fraction < 0.0 || sim.warmup_fraction > 0.5)
    throw Error("simulation: warmup fraction must lie in [0, 0.5]");
  if (sim.policy == Policy::FcfsCooperation && sim.fcfs_threshold < 0)
    throw Error("simulation: fcfs threshold must be >= 0");

  const int n = cfg.num_classes();
  const int servers = cfg.servers;
  const double mu = cfg.service_rate;
  const long budget = sim.task_budget;
  const long warmup = static_cast<long>(sim.warmup_fraction * static_cast<double>(budget));
  const long counted_target = budget - warmup;

  std::vector<std::mt19937_64> arrival_rng;
  for (int j = 0; j < n; ++j) arrival_rng.push_back(make_stream(sim.seed, 100 + j));
  std::mt19937_64 service_rng = make_stream(sim.seed, 200);
  std::mt19937_64 internet_rng = make_stream(sim.seed, 300);

  std::priority_queue<Event, std::vector<Event>, EventAfter> events;
  std::uint64_t seq = 0;
  for (int j = 0; j < n; ++j)
    events.push(Event{exp_draw(arrival_rng[j], cfg.classes[j].arrival_rate), seq++,
                      Event::Arrival, j, -1});

  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(budget));

  // class_queue_len is maintained for every policy so occupancy keys and the
  // priority blocking rule share one source of truth; FCFS order lives in the
  // single deque.
  std::vector<std::deque<long>> class_queues(n);
  std::deque<long> fifo_queue;
  std::vector<int> class_queue_len(n, 0);
  int busy = 0;
  long arrivals_processed = 0;

  // statistics
  std::vector<long> counted(n, 0), succeeded(n, 0), offloaded(n, 0);
  std::vector<double> sojourn_sum(n, 0.0);

  // occupancy and queue-trend accounting over [first counted arrival, last arrival]
  const bool track = sim.track_occupancy;
  bool window_open = false;
  double last_event_time = 0.0;
  int current_batch = 0;
  std::map<std::vector<int>, std::vector<double>> state_time;  // per-batch sums
  std::vector<double> batch_duration(kOccupancyBatches, 0.0);
  std::vector<double> queue_area(kOccupancyBatches, 0.0);  // integral of total queue length
  std::vector<int> state_key(n + 1, 0);

  // greedy estimates: internet side is constant per class
  std::vector<double> greedy_internet(n, 0.0);
  for (int j = 0; j < n; ++j)
    greedy_internet[j] = internet_success(cfg.internet, cfg.classes[j].delay_bound);
  const GridSpec greedy_grid{sim.grid.dt > 0.0 ? sim.grid.dt : 0.1,
                             cfg.max_delay_bound()};

  auto total_queued = [&]() {
    int s = 0;
    for (int j = 0; j < n; ++j) s += class_queue_len[j];
    return s;
  };

  auto accumulate_interval = [&](double now) {
    if (!window_open) return;
    const double span = now - last_event_time;
    if (span > 0.0) {
      if (track) {
        state_key[0] = busy;
        for (int j = 0; j < n; ++j) state_key[j + 1] = class_queue_len[j];
        auto [it, inserted] =
            state_time.try_emplace(state_key, std::vector<double>(kOccupancyBatches, 0.0));
        it->second[current_batch] += span;
      }
      batch_duration[current_batch] += span;
      queue_area[current_batch] += span * total_queued();
    }
  };

  auto record_completion = [&](long task_id, double sojourn, bool offloaded_task) {
    const Task& t = tasks[task_id];
    if (!t.counted) return;
    ++counted[t.cls];
    if (sojourn <= cfg.classes[t.cls].delay_bound) ++succeeded[t.cls];
    if (offloaded_task) ++offloaded[t.cls];
    sojourn_sum[t.cls] += sojourn;
  };

  auto start_service = [&](long task_id, double now) {
    events.push(Event{now + tasks[task_id].service, seq++, Event::Departure, -1, task_id});
  };

  auto enqueue_class = [&](long task_id, int cls) {
    class_queues[cls].push_back(task_id);
    ++class_queue_len[cls];
  };

  // blocked iff some cumulative cap at or above the class already binds
  auto priority_blocked = [&](int cls) {
    int cumulative = 0;
    for (int j = 0; j < n; ++j) {
      cumulative += class_queue_len[j];
      if (j >= cls && cumulative == cfg.thresholds[j]) return true;
    }
    return false;
  };

  auto greedy_local = [&](int cls) {
    if (busy < servers) return service_sojourn_cdf(mu, cfg.classes[cls].delay_bound) >=
                               greedy_internet[cls];
    const double lambda_hp = cumulative_rate_above(cfg, cls);
    double local = 0.0;
    if (lambda_hp < cfg.pooled_service_rate()) {
      int queued_ahead = 0;
      for (int j = 0; j <= cls; ++j) queued_ahead += class_queue_len[j];
      local = sojourn_success_queued(lambda_hp, servers, mu, cfg.classes[cls].delay_bound,
                                     queued_ahead, greedy_grid);
    }
    return local >= greedy_internet[cls];
  };

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();

    if (ev.kind == Event::Arrival) {
      if (arrivals_processed == budget) continue;  // past the budget: ignore, stop the stream
      accumulate_interval(ev.time);
      last_event_time = ev.time;

      const long task_id = static_cast<long>(tasks.size());
      const bool is_counted = task_id >= warmup;
      tasks.push_back(Task{ev.time, ev.cls, exp_draw(service_rng, mu),
                           sample_internet_delay(cfg.internet, internet_rng), is_counted});
      ++arrivals_processed;
      events.push(Event{ev.time + exp_draw(arrival_rng[ev.cls], cfg.classes[ev.cls].arrival_rate),
                        seq++, Event::Arrival, ev.cls, -1});

      if (is_counted && !window_open) {
        window_open = true;
        current_batch = 0;
      }
      if (window_open && counted_target >= kOccupancyBatches) {
        const long counted_index = task_id - warmup;
        const int batch = std::min<long>(counted_index * kOccupancyBatches / counted_target,
                                         kOccupancyBatches - 1);
        if (batch != current_batch) current_batch = batch;
      }

      // route the arrival
      bool to_internet = false;
      switch (sim.policy) {
        case Policy::PriorityCooperation:
          if (busy < servers) {
            ++busy;
            start_service(task_id, ev.time);
          } else if (priority_blocked(ev.cls)) {
            to_internet = true;
          } else {
            enqueue_class(task_id, ev.cls);
          }
          break;
        case Policy::LocalOnly:
          if (busy < servers) {
            ++busy;
            start_service(task_id, ev.time);
          } else {
            enqueue_class(task_id, ev.cls);
          }
          break;
        case Policy::Greedy:
          if (greedy_local(ev.cls)) {
            if (busy < servers) {
              ++busy;
              start_service(task_id, ev.time);
            } else {
              enqueue_class(task_id, ev.cls);
            }
          } else {
            to_internet = true;
          }
          break;
        case Policy::FcfsCooperation:
          if (busy < servers) {
            ++busy;
            start_service(task_id, ev.time);
          } else if (static_cast<int>(fifo_queue.size()) < sim.fcfs_threshold) {
            fifo_queue.push_back(task_id);
            ++class_queue_len[ev.cls];
          } else {
            to_internet = true;
          }
          break;
        case Policy::NonBuffer:
          if (busy < servers) {
            ++busy;
            start_service(task_id, ev.time);
          } else {
            to_internet = true;
          }
          break;
      }
      if (to_internet)
        record_completion(task_id, tasks[task_id].internet_delay, true);

      if (arrivals_processed == budget) window_open = false;  // stats window closes here
      continue;
    }

    // departure from the local cloud
    accumulate_interval(ev.time);
    last_event_time = ev.time;
    record_completion(ev.task, ev.time - tasks[ev.task].arrival, false);

    long next_task = -1;
    if (sim.policy == Policy::FcfsCooperation) {
      if (!fifo_queue.empty()) {
        next_task = fifo_queue.front();
        fifo_queue.pop_front();
        --class_queue_len[tasks[next_task].cls];
      }
    } else {
      for (int j = 0; j < n; ++j) {
        if (!class_queues[j].empty()) {
          next_task = class_queues[j].front();
          class_queues[j].pop_front();
          --class_queue_len[j];
          break;
        }
      }
    }
    if (next_task >= 0) {
      start_service(next_task, ev.time);  // freed server takes it, busy unchanged
    } else {
      --busy;
    }
    if (busy < servers && total_queued() > 0)
      throw Error("work conservation violated: idle server with waiting tasks");
  }

  // assemble the report
  SimReport report;
  report.per_class_success.assign(n, 0.0);
  report.per_class_ci.assign(n, 0.0);
  report.offload_fraction.assign(n, 0.0);
  report.mean_sojourn.assign(n, 0.0);
  report.per_class_counted.assign(n, 0);
  long all = 0, all_success = 0, all_offload = 0;
  for (int j = 0; j < n; ++j) {
    report.per_class_counted[j] = counted[j];
    if (counted[j] > 0) {
      const double p = static_cast<double>(succeeded[j]) / counted[j];
      report.per_class_success[j] = p;
      report.per_class_ci[j] = binomial_ci_half(p, counted[j]);
      report.offload_fraction[j] = static_cast<double>(offloaded[j]) / counted[j];
      report.mean_sojourn[j] = sojourn_sum[j] / counted[j];
    }
    all += counted[j];
    all_success += succeeded[j];
    all_offload += offloaded[j];
  }
  report.counted_tasks = all;
  if (all > 0) {
    report.total_success = static_cast<double>(all_success) / all;
    report.total_ci = binomial_ci_half(report.total_success, all);
    report.offload_total = static_cast<double>(all_offload) / all;
  }

  double total_duration = 0.0;
  for (double d : batch_duration) total_duration += d;
  if (track && total_duration > 0.0) {
    for (const auto& [key, per_batch] : state_time) {
      OccupancyStat stat;
      double total = 0.0;
      for (double x : per_batch) total += x;
      stat.fraction = total / total_duration;
      int usable = 0;
      double mean = 0.0;
      std::vector<double> fractions;
      for (int b = 0; b < kOccupancyBatches; ++b) {
        if (batch_duration[b] > 0.0) {
          fractions.push_back(per_batch[b] / batch_duration[b]);
          mean += fractions.back();
          ++usable;
        }
      }
      if (usable >= 2) {
        mean /= usable;
        double var = 0.0;
        for (double f : fractions) var += (f - mean) * (f - mean);
        var /= (usable - 1);
        stat.ci_half = kT975Df19 * std::sqrt(var / usable);
      }
      report.occupancy.emplace(key, stat);
    }
  }

  // queue-growth trend over the halves of the measurement window
  double first_area = 0.0, first_dur = 0.0, second_area = 0.0, second_dur = 0.0;
  for (int b = 0; b < kOccupancyBatches; ++b) {
    if (b < kOccupancyBatches / 2) {
      first_area += queue_area[b];
      first_dur += batch_duration[b];
    } else {
      second_area += queue_area[b];
      second_dur += batch_duration[b];
    }
  }
  if (first_dur > 0.0 && second_dur > 0.0) {
    const double first_mean = first_area / first_dur;
    const double second_mean = second_area / second_dur;
    report.unstable_queue_trend = second_mean > 2.0 * first_mean + 5.0;
  }
  return report;
}

}  // namespace coopsched
