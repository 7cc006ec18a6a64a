#include "coopsched/delay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "coopsched/bessel.hpp"

namespace coopsched {

namespace {

constexpr double kMassSlack = 1e-6;
constexpr double kHorizonMassTolerance = 0.01;

double trapezoid_mass(const std::vector<double>& v, double dt) {
  if (v.size() < 2) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  sum -= 0.5 * (v.front() + v.back());
  return sum * dt;
}

}  // namespace

GridSpec default_grid(const SystemConfig& cfg) {
  GridSpec g;
  g.dt = 0.1;
  const double five_tn = 5.0 * cfg.max_delay_bound();
  double horizon = five_tn;
  if (cfg.num_classes() >= 2) {
    const double lambda_below_last = cumulative_rate_above(cfg, cfg.num_classes() - 1);
    const double slack = cfg.pooled_service_rate() - lambda_below_last;
    if (slack > 0.0) horizon = std::max(five_tn, 20.0 / slack);
  }
  g.horizon = horizon;
  return g;
}

DensityGrid::DensityGrid(double dt, std::vector<double> values)
    : dt_(dt), values_(std::move(values)) {
  if (!(dt_ > 0.0)) throw Error("density grid: dt must be > 0");
  if (values_.size() < 2) throw Error("density grid: needs at least two points");
  for (double v : values_)
    if (!(v >= 0.0)) throw Error("density grid: negative or NaN density value");
  cumulative_.resize(values_.size());
  cumulative_[0] = 0.0;
  for (std::size_t k = 1; k < values_.size(); ++k)
    cumulative_[k] = cumulative_[k - 1] + 0.5 * dt_ * (values_[k - 1] + values_[k]);
  if (cumulative_.back() > 1.0 + kMassSlack)
    throw Error("density grid: trapezoid mass exceeds 1");
}

double DensityGrid::integral() const { return cumulative_.back(); }

double DensityGrid::mean() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k)
    sum += static_cast<double>(k) * dt_ * values_[k];
  sum -= 0.5 * (0.0 + horizon() * values_.back());
  return sum * dt_;
}

double DensityGrid::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  const double pos = t / dt_;
  const auto k = static_cast<std::size_t>(pos);
  if (k >= values_.size() - 1) return cumulative_.back();
  const double frac = pos - static_cast<double>(k);
  // linear interpolation of the integrand inside the cell
  const double v_at_t = values_[k] + frac * (values_[k + 1] - values_[k]);
  return cumulative_[k] + 0.5 * frac * dt_ * (values_[k] + v_at_t);
}

double DensityGrid::laplace(double s) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double w = (k == 0 || k == values_.size() - 1) ? 0.5 : 1.0;
    sum += w * values_[k] * std::exp(-s * static_cast<double>(k) * dt_);
  }
  return sum * dt_;
}

double service_sojourn_cdf(double mu, double t) {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-mu * t);
}

DensityGrid busy_period_pdf(double lambda_hp, int servers, double mu, const GridSpec& grid) {
  const double cmu = servers * mu;
  if (lambda_hp >= cmu) {
    std::ostringstream os;
    os << "unstable busy period: higher-priority load " << lambda_hp
       << " >= pooled service rate " << cmu;
    throw UnstableBusyPeriodError(os.str());
  }
  const auto n = static_cast<std::size_t>(std::ceil(grid.horizon / grid.dt)) + 1;
  std::vector<double> v(n);
  if (lambda_hp <= 0.0) {
    for (std::size_t k = 0; k < n; ++k)
      v[k] = cmu * std::exp(-cmu * static_cast<double>(k) * grid.dt);
  } else {
    const double sqrt_rho = std::sqrt(lambda_hp / cmu);
    const double geom = 2.0 * std::sqrt(lambda_hp * cmu);       // argument slope of I1
    const double decay = std::pow(std::sqrt(cmu) - std::sqrt(lambda_hp), 2.0);
    v[0] = cmu;  // t -> 0 limit via I1(x) ~ x/2
    for (std::size_t k = 1; k < n; ++k) {
      const double t = static_cast<double>(k) * grid.dt;
      v[k] = bessel_i1_scaled(geom * t) * std::exp(-decay * t) / (t * sqrt_rho);
    }
  }
  return DensityGrid(grid.dt, std::move(v));
}

double busy_period_lst(double lambda_hp, int servers, double mu, double s) {
  const double cmu = servers * mu;
  if (lambda_hp <= 0.0) return cmu / (s + cmu);
  const double a = s + lambda_hp + cmu;
  const double disc = std::sqrt(std::max(a * a - 4.0 * cmu * lambda_hp, 0.0));
  return 2.0 * cmu / (a + disc);
}

DensityGrid convolve(const DensityGrid& a, const DensityGrid& b) {
  if (a.dt() != b.dt()) throw Error("convolve: mismatched grid steps");
  const std::size_t n = std::min(a.size(), b.size());
  const double dt = a.dt();
  const auto& x = a.values();
  const auto& y = b.values();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j <= k; ++j) sum += x[j] * y[k - j];
    sum -= 0.5 * (x[0] * y[k] + x[k] * y[0]);
    out[k] = std::max(sum * dt, 0.0);
  }
  return DensityGrid(dt, std::move(out));
}

DensityGrid waiting_time_density(const DensityGrid& f, int folds) {
  if (folds < 1) throw Error("waiting_time_density: folds must be >= 1");
  DensityGrid w = f;
  for (int k = 1; k < folds; ++k) w = convolve(w, f);
  if (w.integral() < 1.0 - kHorizonMassTolerance) {
    std::ostringstream os;
    os << "waiting-time density lost " << (1.0 - w.integral()) * 100.0
       << "% of its mass beyond the horizon " << f.horizon()
       << " ms; rebuild the base density on a larger grid";
    throw HorizonError(os.str());
  }
  return w;
}

double internet_success(const InternetDelayParams& params, double t) {
  if (t <= 0.0) return 0.0;
  const double a = 1.0 / params.router_mean;
  const double b = 1.0 / params.queue_mean;
  const double phi1 = -std::expm1(-a * t);
  double two_stage;
  if (std::fabs(a - b) <= 1e-12 * a) {
    two_stage = 1.0 - std::exp(-a * t) * (1.0 + a * t);  // Erlang-2 limit
  } else {
    two_stage = 1.0 - (b * std::exp(-a * t) - a * std::exp(-b * t)) / (b - a);
  }
  return params.router_weight * phi1 + params.queue_weight() * two_stage;
}

namespace {

struct TableKey {
  double lambda_hp;
  int servers;
  double mu;
  double dt;
  double horizon;
  bool operator<(const TableKey& o) const {
    if (lambda_hp != o.lambda_hp) return lambda_hp < o.lambda_hp;
    if (servers != o.servers) return servers < o.servers;
    if (mu != o.mu) return mu < o.mu;
    if (dt != o.dt) return dt < o.dt;
    return horizon < o.horizon;
  }
};

std::int64_t double_bits(double x) {
  std::int64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  return bits;
}

// Incrementally maintained self-convolution powers of one busy-period density,
// plus memoized success integrals. Shared across every caller that evaluates
// the same (lambda_hp, servers, mu) on the same grid, so threshold sweeps and
// simulations pay for each fold exactly once.
class SojournTable {
 public:
  SojournTable(double lambda_hp, int servers, double mu, const GridSpec& grid)
      : dt_(grid.dt) {
    base_ = busy_period_pdf(lambda_hp, servers, mu, grid).values();
    folds_.push_back(base_);
  }

  double success(double delay_bound, double mu_service, int queued_ahead) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(queued_ahead, double_bits(delay_bound));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    while (static_cast<int>(folds_.size()) <= queued_ahead) extend();
    const double value = integrate_against_service(folds_[queued_ahead], delay_bound, mu_service);
    memo_.emplace(key, value);
    return value;
  }

 private:
  void extend() {
    const auto& w = folds_.back();
    const std::size_t n = w.size();
    std::vector<double> next(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j <= k; ++j) sum += w[j] * base_[k - j];
      sum -= 0.5 * (w[0] * base_[k] + w[k] * base_[0]);
      next[k] = std::max(sum * dt_, 0.0);
    }
    folds_.push_back(std::move(next));
  }

  // integral over [0, T] of w(u) * (1 - e^{-mu (T - u)}) du, trapezoid rule
  // with a partial final cell. This is the waiting-plus-service convolution
  // already integrated up to the bound.
  double integrate_against_service(const std::vector<double>& w, double delay_bound,
                                   double mu_service) const {
    const double T = delay_bound;
    const auto last = std::min(static_cast<std::size_t>(T / dt_), w.size() - 1);
    double sum = 0.0;
    for (std::size_t j = 0; j <= last; ++j) {
      const double u = static_cast<double>(j) * dt_;
      const double g = -std::expm1(-mu_service * (T - u));
      const double weight = (j == 0 || j == last) ? 0.5 : 1.0;
      sum += weight * w[j] * g;
    }
    sum *= dt_;
    const double u_last = static_cast<double>(last) * dt_;
    if (T > u_last) {
      // partial cell [u_last, T]; the kernel vanishes at u = T
      const double g_last = -std::expm1(-mu_service * (T - u_last));
      sum += 0.5 * (T - u_last) * w[last] * g_last;
    }
    return std::min(sum, 1.0);
  }

  double dt_;
  std::vector<double> base_;
  std::vector<std::vector<double>> folds_;  // folds_[k] = f^{*(k+1)}
  std::map<std::pair<int, std::int64_t>, double> memo_;
  std::mutex mutex_;
};

std::mutex g_table_mutex;
std::map<TableKey, std::shared_ptr<SojournTable>> g_tables;

std::shared_ptr<SojournTable> table_for(double lambda_hp, int servers, double mu,
                                        const GridSpec& grid) {
  const TableKey key{lambda_hp, servers, mu, grid.dt, grid.horizon};
  std::lock_guard<std::mutex> lock(g_table_mutex);
  auto it = g_tables.find(key);
  if (it != g_tables.end()) return it->second;
  auto table = std::make_shared<SojournTable>(lambda_hp, servers, mu, grid);
  g_tables.emplace(key, table);
  return table;
}

// Folds are only ever integrated against kernels supported on [0, T]; grid
// values at u <= T depend on the base density at arguments <= T only, so the
// working horizon can stop just past the largest bound without changing any
// result.
GridSpec work_grid(double max_delay_bound, const GridSpec* grid) {
  GridSpec g;
  g.dt = (grid != nullptr && grid->dt > 0.0) ? grid->dt : 0.1;
  g.horizon = max_delay_bound + 2.0 * g.dt;
  return g;
}

}  // namespace

double sojourn_success_queued(double lambda_hp, int servers, double mu,
                              double delay_bound, int queued_ahead,
                              const GridSpec& grid) {
  if (queued_ahead < 0) throw Error("sojourn_success_queued: negative queue position");
  GridSpec g = grid;
  if (g.horizon < delay_bound + 2.0 * g.dt) g.horizon = delay_bound + 2.0 * g.dt;
  return table_for(lambda_hp, servers, mu, g)->success(delay_bound, mu, queued_ahead);
}

double sojourn_success_given_state(const SystemConfig& cfg, const QueueState& state,
                                   int class_index, const GridSpec* grid) {
  const double T = cfg.classes[class_index].delay_bound;
  const double mu = cfg.service_rate;
  if (state.busy_servers < cfg.servers) return service_sojourn_cdf(mu, T);
  const int queued_ahead = state.cumulative_length(class_index);
  const double lambda_hp = cumulative_rate_above(cfg, class_index);
  const GridSpec g = work_grid(cfg.max_delay_bound(), grid);
  return sojourn_success_queued(lambda_hp, cfg.servers, mu, T, queued_ahead, g);
}

}  // namespace coopsched
