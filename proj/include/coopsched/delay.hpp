#ifndef COOPSCHED_DELAY_HPP
#define COOPSCHED_DELAY_HPP

#include <cstddef>
#include <vector>

#include "coopsched/domain.hpp"

// Continuous-time delay distributions: exponential service sojourn, the
// busy period of the pooled server group under higher-priority load, its
// n-fold convolutions (waiting time of a queued task), the resulting
// conditional success probabilities, and the Internet transmission-delay
// mixture. All numerical densities live on a uniform time grid.

namespace coopsched {

struct GridSpec {
  double dt = 0.1;      // ms
  double horizon = 0.0; // ms; <= 0 means "derive the default for the config"
};

// dt = 0.1 ms; horizon = max(5 * T_N, 20 mean busy periods of the pool under
// the load of all classes but the last, when that load is subcritical).
GridSpec default_grid(const SystemConfig& cfg);

class DensityGrid {
 public:
  // values[k] is the density at t = k*dt. Trapezoid mass must not exceed
  // 1 + 1e-6; entries must be nonnegative.
  DensityGrid(double dt, std::vector<double> values);

  double dt() const { return dt_; }
  std::size_t size() const { return values_.size(); }
  double horizon() const { return dt_ * static_cast<double>(values_.size() - 1); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }

  double integral() const;          // trapezoid mass over [0, horizon]
  double mean() const;              // trapezoid first moment
  double cdf(double t) const;       // cached cumulative trapezoid, linear interp
  double laplace(double s) const;   // trapezoid transform of the grid density

 private:
  double dt_;
  std::vector<double> values_;
  std::vector<double> cumulative_;  // cumulative trapezoid sums
};

// P(service sojourn <= t) = 1 - e^{-mu t} for a task that starts immediately.
double service_sojourn_cdf(double mu, double t);

// Busy period of the C-server pool aggregated as one server of rate C*mu,
// fed by higher-priority arrivals at rate lambda_hp:
//   f(t) = 1/(t sqrt(rho)) e^{-(lambda+C mu) t} I1(2 t sqrt(lambda C mu)),
// rho = lambda/(C mu), with f(t) = C mu e^{-C mu t} as the lambda -> 0 limit.
// Throws UnstableBusyPeriodError when lambda_hp >= C*mu.
DensityGrid busy_period_pdf(double lambda_hp, int servers, double mu, const GridSpec& grid);

// Laplace-Stieltjes transform of the busy period, evaluated in the form
// 2 C mu / (s + lambda + C mu + sqrt((s + lambda + C mu)^2 - 4 C mu lambda)),
// which is algebraically identical to the textbook quadratic root but stays
// stable as lambda -> 0 (limit C mu / (s + C mu)).
double busy_period_lst(double lambda_hp, int servers, double mu, double s);

// Trapezoid-rule convolution of two grid densities over the shorter horizon.
DensityGrid convolve(const DensityGrid& a, const DensityGrid& b);

// folds-fold self-convolution by iterated trapezoid convolution. The result
// is never renormalized; if more than 1% of the mass has left the horizon a
// HorizonError asks for a larger grid.
DensityGrid waiting_time_density(const DensityGrid& f, int folds);

// P(Internet transmission delay <= t): p * Phi1(t) + (1-p) * (Phi1 * phi2)(t)
// with exponential components; the equal-mean branch degenerates to Erlang-2.
double internet_success(const InternetDelayParams& params, double t);

// Success probability of a class-i task admitted to the local cloud while all
// servers are busy and queued_ahead tasks of its own or higher priority wait:
// waiting time = (queued_ahead + 1)-fold busy-period convolution, then the
// exponential service, integrated up to the delay bound.
// Results are memoized behind a process-wide cache keyed by
// (lambda_hp, servers, mu, dt, horizon).
double sojourn_success_queued(double lambda_hp, int servers, double mu,
                              double delay_bound, int queued_ahead,
                              const GridSpec& grid);

// Conditional success for a class-i arrival observing `state`:
// immediate-service CDF when a server is free, the queued path above
// otherwise. grid == nullptr uses default_grid(cfg).
double sojourn_success_given_state(const SystemConfig& cfg, const QueueState& state,
                                   int class_index, const GridSpec* grid = nullptr);

}  // namespace coopsched

#endif  // COOPSCHED_DELAY_HPP
