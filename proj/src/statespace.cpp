#include "coopsched/statespace.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace coopsched {

namespace {

std::vector<int> make_key(int busy, const std::vector<int>& lengths) {
  std::vector<int> key;
  key.reserve(lengths.size() + 1);
  key.push_back(busy);
  key.insert(key.end(), lengths.begin(), lengths.end());
  return key;
}

}  // namespace

StateSpace StateSpace::enumerate(const SystemConfig& cfg, std::size_t max_states) {
  StateSpace space;
  const int n = cfg.num_classes();
  auto push = [&](int busy, std::vector<int> lengths) {
    if (space.states_.size() >= max_states) {
      std::ostringstream os;
      os << "state space too large: more than " << max_states << " states";
      throw StateSpaceError(os.str());
    }
    auto id = static_cast<std::int32_t>(space.states_.size());
    space.index_.emplace(make_key(busy, lengths), id);
    space.states_.push_back(QueueState{busy, std::move(lengths)});
  };

  for (int s = 0; s < cfg.servers; ++s) push(s, std::vector<int>(n, 0));

  // all-servers-busy block: lexicographic recursion over queue vectors with
  // the running cumulative length bounded by each threshold
  std::vector<int> lengths(n, 0);
  auto recurse = [&](auto&& self, int cls, int cumulative) -> void {
    if (cls == n) {
      push(cfg.servers, lengths);
      return;
    }
    const int cap = cfg.thresholds[cls] - cumulative;
    for (int l = 0; l <= cap; ++l) {
      lengths[cls] = l;
      self(self, cls + 1, cumulative + l);
    }
    lengths[cls] = 0;
  };
  recurse(recurse, 0, 0);
  return space;
}

std::int32_t StateSpace::index_of(int busy_servers, const std::vector<int>& queue_lengths) const {
  auto it = index_.find(make_key(busy_servers, queue_lengths));
  return it == index_.end() ? -1 : it->second;
}

Generator::Generator(std::size_t dimension) : rows_(dimension), diagonal_(dimension, 0.0) {}

void Generator::add_edge(std::int32_t from, std::int32_t to, double rate) {
  if (rate <= 0.0) return;
  auto& row = rows_[from];
  auto it = std::find_if(row.begin(), row.end(),
                         [to](const Transition& t) { return t.to == to; });
  if (it == row.end()) {
    row.push_back(Transition{to, rate});
  } else {
    it->rate += rate;
  }
  diagonal_[from] -= rate;
}

double Generator::row_sum(std::int32_t id) const {
  double sum = diagonal_[id];
  for (const auto& t : rows_[id]) sum += t.rate;
  return sum;
}

double Generator::max_exit_rate() const {
  double m = 0.0;
  for (double d : diagonal_) m = std::max(m, -d);
  return m;
}

Generator Generator::build(const SystemConfig& cfg, const StateSpace& space) {
  Generator gen(space.size());
  const int n = cfg.num_classes();
  const double mu = cfg.service_rate;
  const int servers = cfg.servers;

  for (std::int32_t id = 0; id < static_cast<std::int32_t>(space.size()); ++id) {
    const QueueState& st = space.state(id);
    const int s = st.busy_servers;

    if (s < servers) {
      // below the boundary any arrival seizes a server
      const double lambda_total = cfg.total_arrival_rate();
      gen.add_edge(id, space.index_of(s + 1, st.queue_lengths), lambda_total);
      if (s > 0) gen.add_edge(id, space.index_of(s - 1, st.queue_lengths), s * mu);
      continue;
    }

    // class-j arrival joins its queue unless a cumulative cap at or above j
    // binds, in which case the task is diverted and no transition occurs
    int cumulative = 0;
    std::vector<int> binding(n);  // binding[j]: some L_i = B_i with i >= j
    for (int j = 0; j < n; ++j) {
      cumulative += st.queue_lengths[j];
      binding[j] = (cumulative == cfg.thresholds[j]) ? 1 : 0;
    }
    for (int j = n - 2; j >= 0; --j) binding[j] |= binding[j + 1];

    for (int j = 0; j < n; ++j) {
      if (binding[j]) continue;
      std::vector<int> next = st.queue_lengths;
      ++next[j];
      const std::int32_t to = space.index_of(servers, next);
      gen.add_edge(id, to, cfg.classes[j].arrival_rate);
    }

    // service completion at the pooled rate; the freed server takes the
    // highest-priority waiting task, else the busy count drops
    const double pooled = servers * mu;
    if (st.total_queued() == 0) {
      gen.add_edge(id, space.index_of(servers - 1, st.queue_lengths), pooled);
    } else {
      int head = 0;
      while (st.queue_lengths[head] == 0) ++head;
      std::vector<int> next = st.queue_lengths;
      --next[head];
      gen.add_edge(id, space.index_of(servers, next), pooled);
    }
  }
  return gen;
}

void Generator::dump_csv(std::ostream& os) const {
  os << "row_id,col_id,rate\n";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    os << i << ',' << i << ',' << diagonal_[i] << '\n';
    for (const auto& t : rows_[i]) os << i << ',' << t.to << ',' << t.rate << '\n';
  }
}

bool check_irreducible(const Generator& gen) {
  const auto n = static_cast<std::int32_t>(gen.size());
  if (n == 0) return false;
  std::vector<std::vector<std::int32_t>> reverse(n);
  for (std::int32_t i = 0; i < n; ++i)
    for (const auto& t : gen.row(i))
      if (t.rate > 0.0) reverse[t.to].push_back(i);

  auto covers_all = [n](auto&& neighbors) {
    std::vector<char> seen(n, 0);
    std::vector<std::int32_t> stack{0};
    seen[0] = 1;
    std::int32_t count = 1;
    while (!stack.empty()) {
      const std::int32_t v = stack.back();
      stack.pop_back();
      for (std::int32_t w : neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };

  const bool forward = covers_all([&gen](std::int32_t v) {
    std::vector<std::int32_t> out;
    for (const auto& t : gen.row(v))
      if (t.rate > 0.0) out.push_back(t.to);
    return out;
  });
  const bool backward = covers_all([&reverse](std::int32_t v) { return reverse[v]; });
  return forward && backward;
}

}  // namespace coopsched
