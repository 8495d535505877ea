#pragma once

#include <unordered_map>

#include "clap/loop.hpp"
#include "clap/metrics.hpp"
#include "clap/world.hpp"

namespace clap::baselines {

struct QConfig {
  double alpha = 0.3;
  double gamma = 0.9;
  double epsilon = 0.1;  // fixed exploration rate
  int horizon = 40;
  uint64_t eval_every = 100;
  int eval_traces = 10;
  uint64_t seed = 0;
};

// Tabular action values over canonical ground states; unseen entries are 0.
class QTable {
 public:
  explicit QTable(std::size_t action_count) : na_(action_count) {}

  double get(const ppddl::State& s, uint32_t a) const;
  void set(const ppddl::State& s, uint32_t a, double v);
  double max_value(const ppddl::State& s) const;
  uint32_t greedy(const ppddl::State& s) const;  // ties keep the lowest index
  std::size_t action_count() const { return na_; }

 private:
  std::unordered_map<ppddl::State, std::vector<double>, ppddl::StateHash> q_;
  std::size_t na_;
};

// Q(s,a) := (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a')); the max
// term is 0 when s' is terminal.
void q_update(QTable& q, const ppddl::State& s, uint32_t a, double r, const ppddl::State& s2,
              bool terminal, double alpha, double gamma);

// Epsilon-greedy episodic Q-learning until the budget runs out. Non-transfer:
// the table lives and dies inside this call.
metrics::RunMetrics qlearning_run(world::Simulator& sim, const QConfig& cfg);

// Plans on the true model and executes greedily; `schedule` (when given)
// mirrors the simulator's change schedule so the oracle replans at each
// transition-system change.
metrics::RunMetrics oracle_run(world::Simulator& sim, const ppddl::LiftedDomain& truth,
                               const loop::ClapConfig& cfg,
                               const world::ChangeSchedule* schedule = nullptr);

}  // namespace clap::baselines
