#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "clap/fond.hpp"
#include "clap/model.hpp"
#include "clap/world.hpp"

namespace clap::learner {

struct LearnerConfig {
  int eta = 100;                         // MLE sample count per action
  std::size_t fond_node_budget = 1000000;
  int walk_length = 40;                  // exploration walk length (H)
  bool comprehensive = false;            // relearn everything on invocation
};

// Newline-delimited JSON event trail consumed by the bench module.
class EventLog {
 public:
  void log(const std::string& kind, nlohmann::json fields = {});
  const std::vector<nlohmann::json>& events() const { return events_; }
  std::string dump() const;
  std::size_t count(const std::string& kind) const;

 private:
  std::vector<nlohmann::json> events_;
};

class Learner {
 public:
  Learner(model::LearnedModel m, LearnerConfig cfg = {});

  model::LearnedModel& model() { return model_; }
  const model::LearnedModel& model() const { return model_; }
  const LearnerConfig& config() const { return cfg_; }
  EventLog& log() { return log_; }
  const EventLog& log() const { return log_; }
  int invocations() const { return invocations_; }

  // Checks one observed transition. Inconsistent preconditions are marked
  // unknown; unexplained effect structure grows a new effect list when the
  // action visibly executed and no pending unknown could account for it.
  model::ConsistencyVerdict handle_transition(const model::Transition& t,
                                              const ppddl::GroundSpace& space);

  // Copies of the model with the target fixed to +, -, and absent.
  static std::array<model::LearnedModel, 3> candidates(const model::LearnedModel& m,
                                                       const model::Target& t);

  // Runs distinguishing queries for one target on the simulator. Returns
  // true when the mode was pinned down; false leaves the target dormant or
  // re-queued.
  bool resolve(const model::Target& t, world::Simulator& sim);

  // MLE over applicable executions; prefers ground instances whose effect
  // successors are pairwise distinct so attribution is unambiguous.
  void estimate_probabilities(const std::string& action, world::Simulator& sim);

  // Drains the unknown queue and refreshes stale probabilities. In
  // comprehensive mode the model is cleared first and relearned end to end,
  // interleaving random-walk data gathering with resolution.
  void learn(world::Simulator& sim);

  // Wipes the model and relearns from scratch regardless of the configured
  // mode; the escape hatch when need-based repair stalls.
  void relearn_comprehensive(world::Simulator& sim);

  // Uniform random walk feeding every observed transition through
  // handle_transition. Returns the number of inconsistent transitions seen.
  int explore(world::Simulator& sim, int steps, std::mt19937_64& rng);

  bool needs_learning() const;

 private:
  enum class DuelStatus { Solved, Unsolvable, Aborted };
  struct DuelResult {
    DuelStatus status = DuelStatus::Unsolvable;
    model::Mode winner = model::Mode::Absent;
  };
  // Compiles and executes one two-candidate query on the simulator.
  DuelResult duel(const model::Target& t, model::Mode ma, model::Mode mb, world::Simulator& sim);
  bool estimation_pending(const model::ActionModel& am, const std::string& name) const;

  model::LearnedModel model_;
  LearnerConfig cfg_;
  EventLog log_;
  int invocations_ = 0;
  bool mode_changed_ = false;  // some resolution landed on a different mode
  // consecutive aborted duels per target; repeated aborts park the target
  // dormant instead of burning the whole step budget on retries
  std::map<model::Target, int> aborts_;
  // queries already known to yield no distinguishing policy, keyed by model
  // content, start state and candidate pair. Dormant wake-ups otherwise
  // re-run the same expensive unsolvable FOND searches verbatim.
  std::set<std::tuple<std::string, ppddl::State, model::Target, model::Mode, model::Mode>>
      no_query_cache_;
};

}  // namespace clap::learner
