#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "clap/ppddl.hpp"

namespace clap::world {

struct BudgetExhausted : std::runtime_error {
  BudgetExhausted() : std::runtime_error("simulator step budget exhausted") {}
};

struct ChangeEntry {
  uint64_t trigger;  // fires when steps_used reaches this value
  ppddl::LiftedDomain domain;
};

struct ChangeSchedule {
  std::vector<ChangeEntry> entries;
  void validate() const;  // triggers strictly increasing
};

struct TaskStream {
  std::vector<std::pair<ppddl::TaskSpec, ppddl::LiftedDomain>> tasks;
};

// The environment Delta. The hidden domain is never exposed through the
// stepping interface; learners observe states only.
class Simulator {
 public:
  Simulator(ppddl::LiftedDomain hidden, ppddl::TaskSpec task, uint64_t budget, uint64_t seed);

  const std::shared_ptr<const ppddl::GroundSpace>& space() const { return space_; }
  const ppddl::State& current() const { return current_; }
  const ppddl::TaskSpec& task() const { return task_; }
  uint64_t steps_used() const { return steps_; }
  uint64_t budget() const { return budget_; }
  uint64_t seed() const { return seed_; }

  ppddl::State step(uint32_t ground_action);
  ppddl::State reset();
  ppddl::State load(ppddl::TaskSpec task, ppddl::LiftedDomain domain, uint64_t budget);
  void set_schedule(ChangeSchedule schedule);

  // Evaluation clone: fresh rng, effectively unlimited budget, no schedule.
  // Steps taken on the clone never touch this simulator's budget.
  Simulator fork(uint64_t seed) const;

  bool goal_reached(const ppddl::State& s) const;

 private:
  void reground();
  void apply_schedule();

  ppddl::LiftedDomain hidden_;
  ppddl::TaskSpec task_;
  std::shared_ptr<const ppddl::GroundSpace> space_;
  std::vector<ppddl::GroundOp> ops_;
  ppddl::State current_;
  ppddl::State init_;
  uint64_t steps_ = 0;
  uint64_t budget_ = 0;
  uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  ChangeSchedule schedule_;
};

// Manifest: one "(step) (domain-file)" pair per line; '#' comments.
ChangeSchedule load_schedule_manifest(const std::string& path);

}  // namespace clap::world
