#include "coopsched/bessel.hpp"

#include <cmath>
#include <limits>

namespace coopsched {

namespace {

constexpr double kSeriesAsymptoticCrossover = 15.0;

// I1(x) = (x/2) * sum_k (x^2/4)^k / (k! (k+1)!). All terms positive, so the
// sum is cancellation-free; it converges quickly for x below the crossover.
double i1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// e^{-x} I1(x) ~ (1/sqrt(2 pi x)) * sum_k t_k with
// t_0 = 1, t_k = -t_{k-1} * (4 - (2k-1)^2) / (8 x k).
// The series is truncated at its smallest term; at the crossover argument the
// omitted remainder is of order e^{-2x}, far inside the accuracy target.
double i1_scaled_asymptotic(double x) {
  double term = 1.0;
  double sum = term;
  double prev_mag = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(4.0 - odd * odd) / (8.0 * x * k);
    const double mag = std::fabs(term);
    if (mag >= prev_mag) break;  // asymptotic tail started to diverge
    sum += term;
    if (mag < 1e-18 * std::fabs(sum)) break;
    prev_mag = mag;
  }
  return sum / std::sqrt(2.0 * M_PI * x);
}

}  // namespace

double bessel_i1_scaled(double x) {
  if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return 0.0;
  if (x < kSeriesAsymptoticCrossover) return std::exp(-x) * i1_series(x);
  return i1_scaled_asymptotic(x);
}

double bessel_i1(double x) {
  if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x < kSeriesAsymptoticCrossover) return i1_series(x);
  return i1_scaled_asymptotic(x) * std::exp(x);
}

}  // namespace coopsched
