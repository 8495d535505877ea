#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clap/ppddl.hpp"

namespace clap::model {

enum class Mode { Positive, Negative, Absent, Unknown };

std::string to_string(Mode m);

enum class LocKind { Precondition, Effect };

struct Location {
  LocKind kind = LocKind::Precondition;
  int eff_index = -1;
  static Location pre() { return {LocKind::Precondition, -1}; }
  static Location eff(int i) { return {LocKind::Effect, i}; }
  auto operator<=>(const Location&) const = default;
};

std::string to_string(const Location& l);

// A lifted literal slot: predicate applied to a binding of action parameters.
struct LitKey {
  std::string pred;
  std::vector<std::string> args;  // action parameter names
  ppddl::Atom atom() const { return {pred, args}; }
  auto operator<=>(const LitKey&) const = default;
};

struct Target {
  std::string action;
  LitKey lit;
  Location loc;
  auto operator<=>(const Target&) const = default;
};

std::string to_string(const Target& t);

struct ActionModel {
  std::vector<ppddl::TypedVar> params;
  std::vector<LitKey> universe;  // all type-compatible literal bindings
  std::map<LitKey, Mode> pre_modes;
  struct EffectModel {
    std::map<LitKey, Mode> modes;  // Positive = add set, Negative = delete set
  };
  std::vector<EffectModel> effects;
  std::vector<double> prob;  // aligned with effects
  bool prob_stale = true;
  double prob_weight = 0;  // observations backing prob; 0 until estimated

  bool has_unknown_effect_literal() const;
  // effect structure known and probabilities estimated
  bool complete() const;
};

struct Transition {
  ppddl::State s;
  uint32_t action;  // index into GroundSpace::actions
  ppddl::State s2;
};

struct ConsistencyVerdict {
  bool consistent = false;
  std::optional<int> matched_effect;
  std::vector<Target> violations;
};

class LearnedModel {
 public:
  LearnedModel() = default;

  // Fresh model: every precondition literal unknown, no effect lists.
  static LearnedModel empty_for(const ppddl::LiftedDomain& skeleton);
  // Exact model mirroring a fully specified domain.
  static LearnedModel from_domain(const ppddl::LiftedDomain& domain);

  const ppddl::LiftedDomain& skeleton() const { return skeleton_; }
  const ActionModel& action(const std::string& name) const;
  ActionModel& action_mut(const std::string& name);
  const std::map<std::string, ActionModel>& actions() const { return actions_; }

  uint64_t version() const { return version_; }
  void bump_version() { ++version_; }

  Mode mode(const Target& t) const;
  void set_mode(const Target& t, Mode m);

  // Appends a new effect list whose add/delete sets are seeded from an
  // observed, otherwise unexplained state difference. Returns its index.
  int discover_effect_list(const std::string& action, const std::vector<LitKey>& dels,
                           const std::vector<LitKey>& adds);

  // unknown-literal bookkeeping
  const std::deque<Target>& unknown_queue() const { return queue_; }
  bool queue_empty() const { return queue_.empty(); }
  std::optional<Target> pop_target();  // FIFO, precondition targets first per action
  void enqueue(const Target& t);
  void mark_dormant(const Target& t);
  const std::set<Target>& dormant() const { return dormant_; }
  void wake_dormant();
  void remove_from_queue(const Target& t);

  // Modes ruled out for a precondition target by a directly observed
  // execution that contradicts them. Resolution never re-pins a refuted
  // mode, which keeps repeated mispins from cycling forever.
  std::set<Mode> refuted(const Target& t) const;
  void refute(const Target& t, Mode m);

  void clear_all();  // comprehensive relearning: back to empty_for state

  // Known content as a plain PPDDL domain (unknowns omitted).
  ppddl::LiftedDomain to_domain() const;
  // PPDDL text plus a comment block with mode annotations and the queue.
  std::string serialize_annotated() const;

  bool deferred(const std::string& action) const;
  void set_deferred(const std::string& action, bool v);

 private:
  ppddl::LiftedDomain skeleton_;  // types + predicates + action names/params
  std::map<std::string, ActionModel> actions_;
  std::deque<Target> queue_;
  std::set<Target> queued_;
  std::set<Target> dormant_;
  std::set<std::string> deferred_;
  std::map<Target, std::set<Mode>> refuted_;
  uint64_t version_ = 0;
};

// All type-compatible (predicate, parameter-binding) pairs for an action.
std::vector<LitKey> literal_universe(const ppddl::LiftedDomain& domain,
                                     const std::vector<ppddl::TypedVar>& params);

// Ground instantiation of an action's current model content. When
// include_zero_prob is set, effect lists with stale or zero probabilities
// are kept (candidate semantics for queries and consistency checks).
ppddl::GroundOp ground_action_model(const LearnedModel& m, uint32_t action_index,
                                    const ppddl::GroundSpace& space);

// Lift a ground atom through a ground action's binding; nullopt when some
// argument object is not bound to any parameter.
std::optional<LitKey> lift_atom(const ppddl::Atom& ground_atom, const ppddl::ActionSchema& schema,
                                const ppddl::GroundAction& ga);

ConsistencyVerdict is_consistent(const LearnedModel& m, const Transition& t,
                                 const ppddl::GroundSpace& space);

void mark_unknown(LearnedModel& m, const std::vector<Target>& violations);

double variational_distance(const LearnedModel& m1, const LearnedModel& m2,
                            const std::vector<Transition>& z, const ppddl::GroundSpace& space);

// Closed-form transition-function view over a model snapshot. Actions with
// unknown or unestimated effects are treated as inapplicable self-loops.
class PlanningView {
 public:
  PlanningView(const LearnedModel& m, std::shared_ptr<const ppddl::GroundSpace> space,
               bool incomplete_inapplicable = true);

  const ppddl::GroundSpace& space() const { return *space_; }
  std::size_t action_count() const { return space_->actions.size(); }
  bool applicable(const ppddl::State& s, uint32_t action) const;
  std::vector<std::pair<ppddl::State, double>> successors(const ppddl::State& s,
                                                          uint32_t action) const;

 private:
  std::shared_ptr<const ppddl::GroundSpace> space_;
  std::vector<ppddl::GroundOp> ops_;
  std::vector<bool> usable_;  // false -> self-loop
};

// Transition universe for VD checks: all transitions the reference model can
// generate from states reachable under it, plus the matching no-ops.
std::vector<Transition> enumerate_transitions(const LearnedModel& reference,
                                              const ppddl::GroundSpace& space,
                                              const ppddl::State& s0,
                                              std::size_t state_cap = 100000);

}  // namespace clap::model
