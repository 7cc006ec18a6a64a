#ifndef COOPSCHED_STATIONARY_HPP
#define COOPSCHED_STATIONARY_HPP

#include <vector>

#include "coopsched/statespace.hpp"

// Stationary distribution of the generator: pi Q = 0, sum(pi) = 1.

namespace coopsched {

enum class SolveMethod {
  Auto,         // dense up to the dimension cap, Gauss-Seidel beyond
  Dense,        // LU on the balance system with one row replaced by normalization
  GaussSeidel,  // sweeps on pi Q = 0 with per-sweep normalization
  Power,        // power iteration on the uniformized chain
};

struct SolveOptions {
  SolveMethod method = SolveMethod::Auto;
  int dense_dimension_cap = 2000;
  double uniformization_slack = 1.1;  // gamma = slack * max |Q_ii|
  double tol_l1 = 1e-12;              // successive-iterate L1 convergence
  long max_sweeps = 500000;
  double residual_limit = 1e-9;       // required ||pi Q||_inf after normalization
};

struct StationaryDistribution {
  std::vector<double> probabilities;
  double residual_inf = 0.0;
};

// warm_start (same dimension, any nonnegative mass) seeds the iterative
// schemes; Auto switches to Gauss-Seidel when a warm start is supplied.
// Throws NumericalError when the solve stalls or the residual stays above
// the limit.
StationaryDistribution solve_stationary(const Generator& gen, const SolveOptions& opts = {},
                                        const std::vector<double>* warm_start = nullptr);

// Erlang-B blocking probability of an M/M/C/C loss system via the standard
// stable recursion.
double erlang_b(int servers, double offered_load);

}  // namespace coopsched

#endif  // COOPSCHED_STATIONARY_HPP
