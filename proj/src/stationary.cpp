#include "coopsched/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace coopsched {

namespace {

constexpr double kClampTolerance = 1e-12;

struct Incoming {
  std::int32_t from;
  double rate;
};

std::vector<std::vector<Incoming>> incoming_lists(const Generator& gen) {
  std::vector<std::vector<Incoming>> in(gen.size());
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(gen.size()); ++i)
    for (const auto& t : gen.row(i)) in[t.to].push_back(Incoming{i, t.rate});
  return in;
}

double residual_inf_norm(const Generator& gen, const std::vector<double>& pi) {
  // ||pi Q||_inf accumulated column-wise
  std::vector<double> col(gen.size(), 0.0);
  for (std::size_t i = 0; i < gen.size(); ++i) {
    col[i] += pi[i] * gen.diagonal(static_cast<std::int32_t>(i));
    for (const auto& t : gen.row(static_cast<std::int32_t>(i))) col[t.to] += pi[i] * t.rate;
  }
  double m = 0.0;
  for (double c : col) m = std::max(m, std::fabs(c));
  return m;
}

void normalize(std::vector<double>& v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= sum;
}

StationaryDistribution finalize(const Generator& gen, std::vector<double> pi,
                                const SolveOptions& opts) {
  for (double& x : pi) {
    if (x < 0.0) {
      if (x < -kClampTolerance)
        throw NumericalError("stationary solve produced a negative probability", x);
      x = 0.0;
    }
  }
  normalize(pi);
  const double residual = residual_inf_norm(gen, pi);
  if (!(residual <= opts.residual_limit))
    throw NumericalError("stationary solve residual above limit", residual);
  return StationaryDistribution{std::move(pi), residual};
}

std::vector<double> solve_dense(const Generator& gen) {
  const auto n = static_cast<Eigen::Index>(gen.size());
  // A = Q^T with the last balance row replaced by normalization
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = gen.diagonal(static_cast<std::int32_t>(i));
    for (const auto& t : gen.row(static_cast<std::int32_t>(i))) a(t.to, i) += t.rate;
  }
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd x = a.partialPivLu().solve(b);
  if (!x.allFinite())
    throw NumericalError("dense stationary solve returned non-finite values",
                         std::numeric_limits<double>::infinity());
  return {x.data(), x.data() + n};
}

std::vector<double> initial_vector(std::size_t n, const std::vector<double>* warm_start) {
  if (warm_start != nullptr && warm_start->size() == n) {
    std::vector<double> v = *warm_start;
    double sum = 0.0;
    for (double& x : v) {
      if (!(x >= 0.0)) x = 0.0;
      sum += x;
    }
    if (sum > 0.0) {
      for (double& x : v) x /= sum;
      return v;
    }
  }
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> solve_gauss_seidel(const Generator& gen, const SolveOptions& opts,
                                       const std::vector<double>* warm_start) {
  const auto n = gen.size();
  const auto in = incoming_lists(gen);
  std::vector<double> pi = initial_vector(n, warm_start);
  std::vector<double> prev(n);
  for (long sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    prev = pi;
    for (std::size_t j = 0; j < n; ++j) {
      double flow = 0.0;
      for (const auto& e : in[j]) flow += pi[e.from] * e.rate;
      const double exit = -gen.diagonal(static_cast<std::int32_t>(j));
      pi[j] = exit > 0.0 ? flow / exit : 0.0;
    }
    normalize(pi);
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff += std::fabs(pi[j] - prev[j]);
    if (diff <= opts.tol_l1) return pi;
  }
  throw NumericalError("Gauss-Seidel stationary solve did not converge",
                       residual_inf_norm(gen, pi));
}

std::vector<double> solve_power(const Generator& gen, const SolveOptions& opts,
                                const std::vector<double>* warm_start) {
  const auto n = gen.size();
  const double gamma = opts.uniformization_slack * gen.max_exit_rate();
  if (!(gamma > 0.0)) throw NumericalError("degenerate generator: no transitions", 0.0);
  std::vector<double> pi = initial_vector(n, warm_start);
  std::vector<double> next(n);
  for (long sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    // next = pi * (I + Q/gamma)
    for (std::size_t j = 0; j < n; ++j)
      next[j] = pi[j] * (1.0 + gen.diagonal(static_cast<std::int32_t>(j)) / gamma);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& t : gen.row(static_cast<std::int32_t>(i)))
        next[t.to] += pi[i] * t.rate / gamma;
    normalize(next);
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff += std::fabs(next[j] - pi[j]);
    pi.swap(next);
    if (diff <= opts.tol_l1) return pi;
  }
  throw NumericalError("power-iteration stationary solve did not converge",
                       residual_inf_norm(gen, pi));
}

}  // namespace

StationaryDistribution solve_stationary(const Generator& gen, const SolveOptions& opts,
                                        const std::vector<double>* warm_start) {
  if (gen.size() == 0) throw NumericalError("empty generator", 0.0);
  SolveMethod method = opts.method;
  if (method == SolveMethod::Auto) {
    const bool small = gen.size() <= static_cast<std::size_t>(opts.dense_dimension_cap);
    method = (warm_start != nullptr || !small) ? SolveMethod::GaussSeidel : SolveMethod::Dense;
  }
  switch (method) {
    case SolveMethod::Dense:
      return finalize(gen, solve_dense(gen), opts);
    case SolveMethod::GaussSeidel:
      return finalize(gen, solve_gauss_seidel(gen, opts, warm_start), opts);
    case SolveMethod::Power:
      return finalize(gen, solve_power(gen, opts, warm_start), opts);
    default:
      throw Error("unknown solve method");
  }
}

double erlang_b(int servers, double offered_load) {
  if (servers < 1) throw Error("erlang_b: servers must be >= 1");
  if (!(offered_load > 0.0)) throw Error("erlang_b: offered load must be > 0");
  double b = 1.0;
  for (int c = 1; c <= servers; ++c) b = offered_load * b / (c + offered_load * b);
  return b;
}

}  // namespace coopsched
