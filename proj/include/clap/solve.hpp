#pragma once

#include <functional>
#include <unordered_map>

#include "clap/model.hpp"
#include "clap/world.hpp"

namespace clap::solve {

using GoalFn = std::function<bool(const ppddl::State&)>;

struct PlanConfig {
  double gamma = 0.9;
  double epsilon = 1e-6;   // Bellman residual threshold
  std::size_t node_cap = 200000;
};

struct PlanResult {
  std::unordered_map<ppddl::State, uint32_t, ppddl::StateHash> policy;
  std::unordered_map<ppddl::State, double, ppddl::StateHash> value;
  bool goal_reachable = false;
  bool converged = false;
  double v0 = 0.0;  // converged value of the initial state
};

// Heuristic-guided envelope search: expand only greedy-reachable states,
// value-iterate the envelope to the residual threshold. Reward model is
// 0 at the goal (absorbing) and -1 per step elsewhere; the horizon is not
// applied here, only at execution time.
PlanResult plan(const model::PlanningView& view, const ppddl::State& s0, const GoalFn& is_goal,
                const PlanConfig& cfg = {});

// Exhaustive value iteration over every state reachable from s0. Oracle /
// fallback path; throws ValidationError when the reachable set exceeds cap.
std::unordered_map<ppddl::State, double, ppddl::StateHash> dense_value_iteration(
    const model::PlanningView& view, const ppddl::State& s0, const GoalFn& is_goal,
    const PlanConfig& cfg = {});

struct EvalStats {
  double mean_return = 0.0;   // discounted
  double success_rate = 0.0;  // episodes that reached the goal within horizon
  double mean_steps = 0.0;    // over successful episodes; horizon otherwise
};

// Executes the policy on a simulator clone for the given number of episodes.
// States without a policy entry idle in place (counted as a -1 step).
EvalStats evaluate_policy(world::Simulator sim, const PlanResult& plan, int episodes);

// Same protocol but sampling from the model's own transition function.
EvalStats evaluate_policy_model(const model::PlanningView& view, const ppddl::State& s0,
                                const PlanResult& plan, const GoalFn& is_goal, double gamma,
                                int horizon, int episodes, uint64_t seed);

}  // namespace clap::solve
