#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "clap/baselines.hpp"
#include "clap/loop.hpp"
#include "doctest.h"

using namespace clap;
using model::LearnedModel;

namespace {

loop::ClapConfig small_cfg(uint64_t seed) {
  loop::ClapConfig cfg;
  cfg.eta = 10;
  cfg.seed = seed;
  cfg.eval_every = 500;
  cfg.eval_traces = 5;
  return cfg;
}

}  // namespace

TEST_CASE("eval_seed is deterministic and sensitive to every input") {
  CHECK(loop::eval_seed("t", 1, 2) == loop::eval_seed("t", 1, 2));
  CHECK(loop::eval_seed("t", 1, 2) != loop::eval_seed("t", 1, 3));
  CHECK(loop::eval_seed("t", 2, 2) != loop::eval_seed("t", 1, 2));
  CHECK(loop::eval_seed("u", 1, 2) != loop::eval_seed("t", 1, 2));
}

TEST_CASE("config validation") {
  loop::ClapConfig cfg;
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), ppddl::ValidationError);
  cfg = {};
  cfg.theta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ppddl::ValidationError);
}

TEST_CASE("run_task learns the bandit and the vd trace hits zero") {
  auto d = ppddl::parse_domain_file("domains/bandit_a.ppddl");
  auto task = ppddl::parse_problem_file("domains/bandit_p1.ppddl", d);
  world::Simulator sim(d, task, 8000, 3);
  learner::LearnerConfig lc;
  lc.eta = 10;
  learner::Learner ln(LearnedModel::empty_for(d), lc);
  monitor::Monitor mon;
  LearnedModel truth = LearnedModel::from_domain(d);
  auto m = loop::run_task(sim, ln, mon, small_cfg(3), &truth);

  REQUIRE(!m.vd_series.empty());
  CHECK(m.vd_series.back() == doctest::Approx(0.0));
  CHECK(m.learner_invocations >= 1);
  CHECK(m.goals_total > 0);
  CHECK(m.steps_used == 8000);
  // cumulative goal curve is non-decreasing with non-decreasing steps
  for (std::size_t i = 1; i < m.goals.size(); ++i) {
    CHECK(m.goals[i].step >= m.goals[i - 1].step);
    CHECK(m.goals[i].goals == m.goals[i - 1].goals + 1);
  }
  // evaluation cadence
  REQUIRE(m.evals.size() >= 2);
  for (std::size_t i = 1; i + 1 < m.evals.size(); ++i)
    CHECK(m.evals[i].step == m.evals[i - 1].step + 500);
  // converged policy pulls lever 1
  CHECK(m.policy_at_start == "pull-lever-1()");
}

TEST_CASE("exact model means zero learner invocations and oracle-equal evals") {
  auto d = ppddl::parse_domain_file("domains/warehouse.ppddl");
  auto task = ppddl::parse_problem_file("domains/warehouse_p1.ppddl", d);

  world::Simulator sim(d, task, 3000, 8);
  learner::Learner ln(LearnedModel::from_domain(d), {});
  monitor::Monitor mon;
  auto m = loop::run_task(sim, ln, mon, small_cfg(8));
  CHECK(m.learner_invocations == 0);

  // the oracle over the same seeds produces identical evaluation points
  world::Simulator sim2(d, task, 3000, 8);
  loop::ClapConfig cfg = small_cfg(8);
  auto mo = baselines::oracle_run(sim2, d, cfg);
  REQUIRE(m.evals.size() == mo.evals.size());
  for (std::size_t i = 0; i < m.evals.size(); ++i) {
    CHECK(m.evals[i].step == mo.evals[i].step);
    CHECK(m.evals[i].avg_reward == doctest::Approx(mo.evals[i].avg_reward));
  }
}

TEST_CASE("gof monitor adapts the loop to a probability drift") {
  auto d = ppddl::parse_domain_file("domains/bandit_a.ppddl");
  auto task = ppddl::parse_problem_file("domains/bandit_p1.ppddl", d);
  world::Simulator sim(d, task, 6000, 21);
  world::ChangeSchedule sched;
  sched.entries.push_back({1500, ppddl::parse_domain_file("domains/bandit_b.ppddl")});
  sim.set_schedule(sched);

  learner::Learner ln(LearnedModel::from_domain(d), {});
  monitor::Monitor mon;
  auto m = loop::run_task(sim, ln, mon, small_cfg(21));
  CHECK(mon.failures() >= 1);
  CHECK(m.policy_at_start == "pull-lever-2()");
  CHECK(m.replans >= 2);
}

TEST_CASE("metrics json round trip") {
  metrics::RunMetrics m;
  m.method = "clap";
  m.task = "t";
  m.seed = 9;
  m.goals = {{10, 1}, {20, 2}};
  m.evals = {{0, -3.5, 0.4}};
  m.episodes = {{10, -10.0, true}};
  m.vd_series = {1.0, 0.5, 0.0};
  m.steps_used = 123;
  m.goals_total = 2;
  m.learner_invocations = 4;
  m.replans = 5;
  m.policy_at_start = "a()";
  m.adaptive_delay = 100.0;
  m.events.push_back({{"event", "x"}});
  auto m2 = metrics::RunMetrics::from_json(m.to_json());
  CHECK(m2.method == m.method);
  CHECK(m2.seed == m.seed);
  CHECK(m2.goals.size() == 2);
  CHECK(m2.goals[1].goals == 2);
  CHECK(m2.evals[0].avg_reward == doctest::Approx(-3.5));
  CHECK(m2.episodes[0].goal);
  CHECK(m2.vd_series == m.vd_series);
  CHECK(m2.steps_used == 123);
  CHECK(m2.adaptive_delay == doctest::Approx(100.0));
  CHECK(m2.events.size() == 1);
}
