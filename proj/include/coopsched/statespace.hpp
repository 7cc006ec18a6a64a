#ifndef COOPSCHED_STATESPACE_HPP
#define COOPSCHED_STATESPACE_HPP

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "coopsched/domain.hpp"

// Reachable states of the threshold-gated priority M/M/C chain and its
// transition-rate generator.

namespace coopsched {

// Dense bijection between enumerated states and integer ids. Order is fixed:
// busy-server count ascending, then queue vectors lexicographic, so
// stationary vectors are comparable across runs.
class StateSpace {
 public:
  static StateSpace enumerate(const SystemConfig& cfg, std::size_t max_states = 5'000'000);

  std::size_t size() const { return states_.size(); }
  const QueueState& state(std::int32_t id) const { return states_[id]; }
  const std::vector<QueueState>& states() const { return states_; }

  // -1 when the state is not part of the space.
  std::int32_t index_of(int busy_servers, const std::vector<int>& queue_lengths) const;
  std::int32_t index_of(const QueueState& s) const {
    return index_of(s.busy_servers, s.queue_lengths);
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ull;
      for (int x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b9;
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  std::vector<QueueState> states_;
  std::unordered_map<std::vector<int>, std::int32_t, KeyHash> index_;  // key = {s, l...}
};

struct Transition {
  std::int32_t to;
  double rate;
};

// Sparse transition-rate matrix Q. Off-diagonal entries are nonnegative;
// each diagonal entry is the negated row sum, so rows sum to zero.
class Generator {
 public:
  explicit Generator(std::size_t dimension);

  // Builds Q from the blocking/dispatch rules of the cooperation policy:
  // arrivals move s -> s+1 below C, append to the class queue while every
  // cumulative cap stays respected, and produce no transition when a cap
  // binds (the task leaves for the Internet cloud); service completes at
  // s*mu (C*mu at the boundary) and frees the highest-priority waiting task.
  static Generator build(const SystemConfig& cfg, const StateSpace& space);

  std::size_t size() const { return rows_.size(); }
  const std::vector<Transition>& row(std::int32_t from) const { return rows_[from]; }
  double diagonal(std::int32_t id) const { return diagonal_[id]; }
  double row_sum(std::int32_t id) const;
  double max_exit_rate() const;  // max |Q_ii|

  // Accumulates an off-diagonal rate and keeps the diagonal consistent.
  void add_edge(std::int32_t from, std::int32_t to, double rate);

  // Debug dump as CSV triples (row_id, col_id, rate), diagonal included.
  void dump_csv(std::ostream& os) const;

 private:
  std::vector<std::vector<Transition>> rows_;
  std::vector<double> diagonal_;
};

// True iff the positive-rate transition graph is strongly connected.
bool check_irreducible(const Generator& gen);

}  // namespace coopsched

#endif  // COOPSCHED_STATESPACE_HPP
