#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <deque>

#include "clap/solve.hpp"
#include "doctest.h"

using namespace clap;
using model::LearnedModel;

namespace {

struct Micro {
  ppddl::LiftedDomain d;
  ppddl::TaskSpec task;
  std::shared_ptr<ppddl::GroundSpace> space;
  ppddl::State s0;
  solve::GoalFn goal;
};

Micro load(const std::string& dom, const std::string& prob) {
  Micro m;
  m.d = ppddl::parse_domain_file(dom);
  m.task = ppddl::parse_problem_file(prob, m.d);
  m.space = std::make_shared<ppddl::GroundSpace>(ppddl::ground(m.d, m.task.objects));
  m.s0 = m.space->state_of(m.task.init);
  auto space = m.space;
  auto goal = m.task.goal;
  auto types = m.d.types;
  m.goal = [space, goal, types](const ppddl::State& s) {
    return ppddl::holds(s, goal, *space, types);
  };
  return m;
}

// states reachable from s0 under the greedy policy (full outcome support)
std::vector<ppddl::State> policy_closure(const model::PlanningView& view,
                                         const solve::PlanResult& plan, const ppddl::State& s0,
                                         const solve::GoalFn& goal) {
  std::vector<ppddl::State> out;
  std::deque<ppddl::State> work{s0};
  std::set<std::vector<uint32_t>> seen{s0.atoms};
  while (!work.empty()) {
    ppddl::State s = work.front();
    work.pop_front();
    out.push_back(s);
    if (goal(s)) continue;
    auto it = plan.policy.find(s);
    if (it == plan.policy.end()) continue;
    for (const auto& [s2, p] : view.successors(s, it->second))
      if (p > 0 && seen.insert(s2.atoms).second) work.push_back(s2);
  }
  return out;
}

void check_against_dense(const Micro& m, double* v0_out = nullptr) {
  LearnedModel lm = LearnedModel::from_domain(m.d);
  model::PlanningView view(lm, m.space, false);
  auto plan = solve::plan(view, m.s0, m.goal);
  auto dense = solve::dense_value_iteration(view, m.s0, m.goal);
  REQUIRE(plan.goal_reachable);
  REQUIRE(plan.converged);
  double sup = 0.0;
  for (const auto& s : policy_closure(view, plan, m.s0, m.goal)) {
    REQUIRE(dense.count(s));
    REQUIRE(plan.value.count(s));
    sup = std::max(sup, std::fabs(dense.at(s) - plan.value.at(s)));
  }
  CHECK(sup <= 1e-6);
  CHECK(std::fabs(plan.v0 - dense.at(m.s0)) <= 2e-6);
  if (v0_out) *v0_out = plan.v0;
}

}  // namespace

TEST_CASE("plan matches dense value iteration on five micro MDPs") {
  check_against_dense(load("domains/warehouse.ppddl", "domains/warehouse_p1.ppddl"));
  check_against_dense(load("domains/blocksworld.ppddl", "domains/blocksworld_p1.ppddl"));
  check_against_dense(load("domains/tireworld.ppddl", "domains/tireworld_p1.ppddl"));
  check_against_dense(load("domains/bandit_b.ppddl", "domains/bandit_p1.ppddl"));
  double v0 = 0.0;
  check_against_dense(load("domains/bandit_a.ppddl", "domains/bandit_p1.ppddl"), &v0);
  // analytic fixed point: V = -1 + 0.9 * 0.2 * V  =>  V = -1 / (1 - 0.18)
  CHECK(v0 == doctest::Approx(-1.0 / (1.0 - 0.18)).epsilon(1e-6));
}

TEST_CASE("bandit policy pulls the better lever") {
  auto m = load("domains/bandit_a.ppddl", "domains/bandit_p1.ppddl");
  LearnedModel lm = LearnedModel::from_domain(m.d);
  model::PlanningView view(lm, m.space, false);
  auto plan = solve::plan(view, m.s0, m.goal);
  REQUIRE(plan.policy.count(m.s0));
  CHECK(m.space->actions[plan.policy.at(m.s0)].schema == "pull-lever-1");
}

TEST_CASE("unreachable goal is reported") {
  auto m = load("domains/warehouse.ppddl", "domains/warehouse_p1.ppddl");
  // an empty-effect model can never move anything
  LearnedModel lm = LearnedModel::empty_for(m.d);
  model::PlanningView view(lm, m.space, true);
  auto plan = solve::plan(view, m.s0, m.goal);
  CHECK(!plan.goal_reachable);
}

TEST_CASE("greedy ties break toward the lowest action index") {
  // both levers identical: the plan must pick the first ground action
  auto d = ppddl::parse_domain(R"((define (domain twin)
    (:requirements :probabilistic-effects)
    (:predicates (goal-reached))
    (:action a1 :parameters () :precondition (and)
      :effect (probabilistic 0.5 (goal-reached) 0.5 (and)))
    (:action a2 :parameters () :precondition (and)
      :effect (probabilistic 0.5 (goal-reached) 0.5 (and)))))");
  auto task = ppddl::parse_problem(
      "(define (problem twin-p) (:domain twin) (:objects) (:init) (:goal (and (goal-reached))))",
      d);
  auto space = std::make_shared<ppddl::GroundSpace>(ppddl::ground(d, task.objects));
  LearnedModel lm = LearnedModel::from_domain(d);
  model::PlanningView view(lm, space, false);
  ppddl::State s0;
  auto plan = solve::plan(view, s0, [&](const ppddl::State& s) {
    return s.contains(space->id_of({"goal-reached", {}}));
  });
  REQUIRE(plan.policy.count(s0));
  CHECK(plan.policy.at(s0) == 0);
}

TEST_CASE("evaluate_policy returns discounted returns in range") {
  auto m = load("domains/bandit_a.ppddl", "domains/bandit_p1.ppddl");
  LearnedModel lm = LearnedModel::from_domain(m.d);
  model::PlanningView view(lm, m.space, false);
  auto plan = solve::plan(view, m.s0, m.goal);
  world::Simulator sim(m.d, m.task, 10, 1);
  auto st = solve::evaluate_policy(sim.fork(77), plan, 200);
  // expected discounted return is plan.v0 up to Monte-Carlo error
  CHECK(st.mean_return == doctest::Approx(plan.v0).epsilon(0.1));
  CHECK(st.success_rate > 0.95);
  CHECK(sim.steps_used() == 0);
}

TEST_CASE("dense value iteration throws when the space exceeds the cap") {
  auto m = load("domains/blocksworld.ppddl", "domains/blocksworld_p1.ppddl");
  LearnedModel lm = LearnedModel::from_domain(m.d);
  model::PlanningView view(lm, m.space, false);
  solve::PlanConfig cfg;
  cfg.node_cap = 2;
  CHECK_THROWS_AS(solve::dense_value_iteration(view, m.s0, m.goal, cfg),
                  ppddl::ValidationError);
}
