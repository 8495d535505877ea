#pragma once

#include <map>
#include <string>
#include <vector>

#include "clap/model.hpp"

namespace clap::fond {

// State of the two-copy query problem: where each candidate model believes
// the world to be after executing the same action sequence.
struct JointState {
  ppddl::State s1;
  ppddl::State s2;
  bool diverged() const { return !(s1 == s2); }
  auto operator<=>(const JointState&) const = default;
};

// Index-paired outcome of one ground action in the joint problem.
struct JointOutcome {
  int effect_index = -1;  // -1 when neither copy fires an effect
  JointState next;
};

// The compiled query: both candidates stepped in lockstep. An action a copy
// deems inapplicable is a no-op for that copy only.
class JointProblem {
 public:
  JointProblem(const model::LearnedModel& m1, const model::LearnedModel& m2,
               std::shared_ptr<const ppddl::GroundSpace> space);

  const ppddl::GroundSpace& space() const { return *space_; }
  const ppddl::LiftedDomain& skeleton() const { return skeleton_; }
  std::size_t action_count() const { return space_->actions.size(); }
  std::vector<JointOutcome> outcomes(const JointState& js, uint32_t action) const;

 private:
  std::shared_ptr<const ppddl::GroundSpace> space_;
  ppddl::LiftedDomain skeleton_;
  std::vector<ppddl::GroundOp> ops1_, ops2_;
  std::vector<bool> stale1_, stale2_;
};

struct Policy {
  std::map<JointState, uint32_t> choice;
  bool defined(const JointState& js) const { return choice.count(js) > 0; }
};

enum class FondStatus { Solved, Unsolvable, BudgetExhausted };

struct FondResult {
  FondStatus status = FondStatus::Unsolvable;
  Policy policy;
  std::size_t nodes_expanded = 0;
};

// Strong-cyclic solution of the joint problem with goal "copies diverged".
FondResult solve_fond(const JointProblem& problem, const ppddl::State& s0,
                      std::size_t node_budget = 1000000);

// Verifies that executing the policy from s0 forces a divergence that the
// query target can actually account for. Effect targets must flip the
// target's ground atom at the first divergence; precondition targets only
// need the copies to split at all.
bool check_distinguishing(const JointProblem& problem, const Policy& policy,
                          const ppddl::State& s0, const model::Target& target);

// Joint problem as FOND PDDL text (copy2 predicates are prefixed, paired
// outcomes rendered as oneof). Debugging aid for external FOND planners.
std::string export_pddl(const model::LearnedModel& m1, const model::LearnedModel& m2,
                        const ppddl::GroundSpace& space, const ppddl::State& s0);

}  // namespace clap::fond
