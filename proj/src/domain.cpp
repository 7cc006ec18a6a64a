#include "coopsched/domain.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace coopsched {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

double SystemConfig::total_arrival_rate() const {
  double sum = 0.0;
  for (const auto& c : classes) sum += c.arrival_rate;
  return sum;
}

double SystemConfig::max_delay_bound() const {
  double m = 0.0;
  for (const auto& c : classes) m = std::max(m, c.delay_bound);
  return m;
}

SystemConfig SystemConfig::with_thresholds(std::vector<int> b) const {
  SystemConfig out = *this;
  out.thresholds = std::move(b);
  return out;
}

SystemConfig SystemConfig::with_total_rate(double lambda_total) const {
  SystemConfig out = *this;
  const double current = total_arrival_rate();
  for (auto& c : out.classes) c.arrival_rate *= lambda_total / current;
  return out;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << violations.size() << " invariant violation(s)";
  for (const auto& v : violations) os << "\n  - " << v;
  return os.str();
}

ValidationReport validate_config(const SystemConfig& cfg) {
  ValidationReport report;
  auto fail = [&report](const std::string& msg) { report.violations.push_back(msg); };

  if (cfg.classes.empty()) fail("at least one task class is required");
  if (cfg.servers < 1) fail("servers must be >= 1");
  if (!finite_positive(cfg.service_rate)) fail("service_rate must be finite and > 0");

  for (std::size_t i = 0; i < cfg.classes.size(); ++i) {
    const auto& c = cfg.classes[i];
    if (!finite_positive(c.arrival_rate))
      fail("class " + std::to_string(i + 1) + ": arrival_rate must be finite and > 0");
    if (!finite_positive(c.delay_bound))
      fail("class " + std::to_string(i + 1) + ": delay_bound must be finite and > 0");
  }
  for (std::size_t i = 1; i < cfg.classes.size(); ++i) {
    if (cfg.classes[i - 1].delay_bound > cfg.classes[i].delay_bound) {
      fail("delay bounds must be nondecreasing (class " + std::to_string(i) +
           " has a tighter bound than class " + std::to_string(i + 1) + ")");
      break;
    }
  }

  if (cfg.thresholds.size() != cfg.classes.size()) {
    fail("thresholds must have one entry per class");
  } else {
    for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
      if (cfg.thresholds[i] < 0)
        fail("threshold B_" + std::to_string(i + 1) + " must be >= 0");
    }
    for (std::size_t i = 1; i < cfg.thresholds.size(); ++i) {
      if (cfg.thresholds[i - 1] > cfg.thresholds[i]) {
        fail("cumulative thresholds must be nondecreasing (B_" + std::to_string(i) +
             " > B_" + std::to_string(i + 1) + ")");
        break;
      }
    }
  }

  const auto& net = cfg.internet;
  if (!(net.router_weight > 0.0 && net.router_weight <= 1.0))
    fail("internet p must lie in (0, 1]");
  if (!finite_positive(net.router_mean)) fail("internet router_mean must be finite and > 0");
  if (!finite_positive(net.queue_mean)) fail("internet queue_mean must be finite and > 0");
  if (report.ok() && !std::isfinite(net.mean())) fail("internet mean delay must be finite");

  return report;
}

SystemConfig checked(SystemConfig cfg) {
  ValidationReport report = validate_config(cfg);
  if (!report.ok()) throw ConfigError("invalid config: " + report.to_string());
  return cfg;
}

std::vector<double> cumulative_rates(const SystemConfig& cfg) {
  std::vector<double> lambda(cfg.classes.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < cfg.classes.size(); ++i) {
    sum += cfg.classes[i].arrival_rate;
    lambda[i] = sum;
  }
  return lambda;
}

double cumulative_rate_above(const SystemConfig& cfg, int class_index) {
  double sum = 0.0;
  for (int j = 0; j < class_index; ++j) sum += cfg.classes[j].arrival_rate;
  return sum;
}

double rho_single_server(const SystemConfig& cfg, int class_index) {
  return (cumulative_rate_above(cfg, class_index) + cfg.classes[class_index].arrival_rate) /
         cfg.service_rate;
}

double rho_pooled(const SystemConfig& cfg, int class_index) {
  return rho_single_server(cfg, class_index) / cfg.servers;
}

namespace {

void check_state_common(int servers, int busy, const std::vector<int>& lengths) {
  if (busy < 0 || busy > servers)
    throw Error("queue state: busy_servers out of [0, C]");
  for (int l : lengths)
    if (l < 0) throw Error("queue state: negative queue length");
  if (busy < servers) {
    for (int l : lengths)
      if (l != 0) throw Error("queue state: server idle while a task waits");
  }
}

}  // namespace

QueueState QueueState::checked(const SystemConfig& cfg, int busy, std::vector<int> lengths) {
  check_state_common(cfg.servers, busy, lengths);
  if (lengths.size() != cfg.thresholds.size())
    throw Error("queue state: wrong number of class queues");
  int cumulative = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    cumulative += lengths[i];
    if (cumulative > cfg.thresholds[i])
      throw Error("queue state: cumulative length exceeds threshold B_" + std::to_string(i + 1));
  }
  return QueueState{busy, std::move(lengths)};
}

QueueState QueueState::checked_unbounded(int servers, int busy, std::vector<int> lengths) {
  check_state_common(servers, busy, lengths);
  return QueueState{busy, std::move(lengths)};
}

int QueueState::cumulative_length(int class_index) const {
  int sum = 0;
  for (int j = 0; j <= class_index; ++j) sum += queue_lengths[j];
  return sum;
}

int QueueState::total_queued() const {
  return std::accumulate(queue_lengths.begin(), queue_lengths.end(), 0);
}

SystemConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }
  SystemConfig cfg;
  try {
    cfg.servers = j.at("servers").get<int>();
    cfg.service_rate = j.at("service_rate").get<double>();
    int index = 1;
    for (const auto& jc : j.at("classes")) {
      TaskClassSpec c;
      c.priority_index = index++;
      c.arrival_rate = jc.at("arrival_rate").get<double>();
      c.delay_bound = jc.at("delay_bound").get<double>();
      cfg.classes.push_back(c);
    }
    if (j.contains("thresholds")) {
      cfg.thresholds = j.at("thresholds").get<std::vector<int>>();
    } else {
      cfg.thresholds.assign(cfg.classes.size(), 0);
    }
    if (j.contains("internet")) {
      const auto& ji = j.at("internet");
      cfg.internet.router_weight = ji.at("p").get<double>();
      cfg.internet.router_mean = ji.at("router_mean").get<double>();
      cfg.internet.queue_mean = ji.at("queue_mean").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON schema error: ") + e.what());
  }
  return checked(std::move(cfg));
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const SystemConfig& cfg) {
  nlohmann::json j;
  j["servers"] = cfg.servers;
  j["service_rate"] = cfg.service_rate;
  j["classes"] = nlohmann::json::array();
  for (const auto& c : cfg.classes)
    j["classes"].push_back({{"arrival_rate", c.arrival_rate}, {"delay_bound", c.delay_bound}});
  j["thresholds"] = cfg.thresholds;
  j["internet"] = {{"p", cfg.internet.router_weight},
                   {"router_mean", cfg.internet.router_mean},
                   {"queue_mean", cfg.internet.queue_mean}};
  return j.dump(2);
}

}  // namespace coopsched
