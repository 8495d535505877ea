#pragma once

#include "clap/learner.hpp"
#include "clap/metrics.hpp"
#include "clap/monitor.hpp"
#include "clap/solve.hpp"
#include "clap/world.hpp"

namespace clap::loop {

struct ClapConfig {
  int horizon = 40;          // H
  int beta = 10;             // consecutive-failure threshold
  double theta = 0.05;       // GoF significance
  double gamma = 0.9;
  int eta = 100;
  int walk_length = 40;      // exploration walk length
  uint64_t seed = 0;
  uint64_t eval_every = 100; // evaluation cadence in simulator steps
  int eval_traces = 10;
  bool gof_enabled = true;
  bool comprehensive = false;
  std::size_t fond_node_budget = 1000000;

  void validate() const;  // horizon >= 1, beta >= 0, theta in (0,1)
};

// Seed for off-budget evaluation forks; depends on task/step/run seed but
// never on the method, so methods sharing a policy score identically.
uint64_t eval_seed(const std::string& task, uint64_t step, uint64_t run_seed);

// One continual learning-and-planning run over the loaded task. The learner
// carries the model across calls (transfer); `truth`, when given, adds a VD
// measurement after every learner invocation.
metrics::RunMetrics run_task(world::Simulator& sim, learner::Learner& ln, monitor::Monitor& mon,
                             const ClapConfig& cfg,
                             const model::LearnedModel* truth = nullptr);

}  // namespace clap::loop
