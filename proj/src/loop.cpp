#include "clap/loop.hpp"

#include <memory>
#include <random>
#include <unordered_set>

namespace clap::metrics {

nlohmann::json RunMetrics::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["task"] = task;
  j["seed"] = seed;
  j["steps_used"] = steps_used;
  j["goals_total"] = goals_total;
  j["learner_invocations"] = learner_invocations;
  j["replans"] = replans;
  j["policy_at_start"] = policy_at_start;
  j["adaptive_delay"] = adaptive_delay;
  j["vd_series"] = vd_series;
  auto& jg = j["goals"] = nlohmann::json::array();
  for (const auto& g : goals) jg.push_back({{"step", g.step}, {"goals", g.goals}});
  auto& je = j["evals"] = nlohmann::json::array();
  for (const auto& e : evals)
    je.push_back({{"step", e.step}, {"avg_reward", e.avg_reward}, {"success", e.success_rate}});
  auto& jp = j["episodes"] = nlohmann::json::array();
  for (const auto& e : episodes)
    jp.push_back({{"step", e.step}, {"reward", e.reward}, {"goal", e.goal}});
  j["events"] = events;
  return j;
}

RunMetrics RunMetrics::from_json(const nlohmann::json& j) {
  RunMetrics m;
  m.method = j.value("method", "");
  m.task = j.value("task", "");
  m.seed = j.value("seed", uint64_t{0});
  m.steps_used = j.value("steps_used", uint64_t{0});
  m.goals_total = j.value("goals_total", uint64_t{0});
  m.learner_invocations = j.value("learner_invocations", 0);
  m.replans = j.value("replans", 0);
  m.policy_at_start = j.value("policy_at_start", "");
  m.adaptive_delay = j.value("adaptive_delay", -1.0);
  m.vd_series = j.value("vd_series", std::vector<double>{});
  for (const auto& g : j.value("goals", nlohmann::json::array()))
    m.goals.push_back({g.value("step", uint64_t{0}), g.value("goals", uint64_t{0})});
  for (const auto& e : j.value("evals", nlohmann::json::array()))
    m.evals.push_back(
        {e.value("step", uint64_t{0}), e.value("avg_reward", 0.0), e.value("success", 0.0)});
  for (const auto& e : j.value("episodes", nlohmann::json::array()))
    m.episodes.push_back(
        {e.value("step", uint64_t{0}), e.value("reward", 0.0), e.value("goal", false)});
  for (const auto& e : j.value("events", nlohmann::json::array())) m.events.push_back(e);
  return m;
}

}  // namespace clap::metrics

namespace clap::loop {

void ClapConfig::validate() const {
  if (horizon < 1) throw ppddl::ValidationError("config: horizon must be >= 1");
  if (beta < 0) throw ppddl::ValidationError("config: beta must be >= 0");
  if (theta <= 0.0 || theta >= 1.0) throw ppddl::ValidationError("config: theta must be in (0,1)");
}

uint64_t eval_seed(const std::string& task, uint64_t step, uint64_t run_seed) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 1099511628211ull;
  };
  for (char c : task) mix(static_cast<uint64_t>(static_cast<unsigned char>(c)));
  mix(step);
  mix(run_seed);
  return h;
}

metrics::RunMetrics run_task(world::Simulator& sim, learner::Learner& ln, monitor::Monitor& mon,
                             const ClapConfig& cfg, const model::LearnedModel* truth) {
  cfg.validate();
  metrics::RunMetrics m;
  m.seed = cfg.seed;
  m.task = sim.task().name;

  auto goal_fn = [&sim](const ppddl::State& s) { return sim.goal_reached(s); };
  solve::PlanConfig pcfg;
  pcfg.gamma = cfg.gamma;

  ppddl::State s0 = sim.reset();
  std::mt19937_64 rng(cfg.seed ^ eval_seed(m.task, 0x5151, cfg.seed));

  // fixed transition universe for the VD trace
  std::vector<model::Transition> z_truth;
  if (truth) z_truth = model::enumerate_transitions(*truth, *sim.space(), s0);
  uint64_t vd_version = 0;
  auto record_vd = [&] {
    if (truth) m.vd_series.push_back(
        model::variational_distance(ln.model(), *truth, z_truth, *sim.space()));
    vd_version = ln.model().version();
  };
  record_vd();

  auto view = std::make_unique<model::PlanningView>(ln.model(), sim.space(), true);
  solve::PlanResult plan = solve::plan(*view, s0, goal_fn, pcfg);
  ++m.replans;
  uint64_t last_version = ln.model().version();
  int last_invocations = ln.invocations();

  auto note_start_action = [&] {
    auto it = plan.policy.find(s0);
    m.policy_at_start =
        it == plan.policy.end() ? "" : sim.space()->actions[it->second].name();
  };
  note_start_action();

  // states the widening pass already failed to cover at this model version;
  // re-planning from them every step would dominate the run
  std::unordered_set<ppddl::State, ppddl::StateHash> aux_missing;

  auto replan_full = [&] {
    view = std::make_unique<model::PlanningView>(ln.model(), sim.space(), true);
    plan = solve::plan(*view, s0, goal_fn, pcfg);
    ++m.replans;
    last_version = ln.model().version();
    aux_missing.clear();
    note_start_action();
  };

  uint64_t next_eval = 0;
  auto maybe_eval = [&] {
    while (next_eval <= sim.steps_used()) {
      auto st = solve::evaluate_policy(sim.fork(eval_seed(m.task, next_eval, cfg.seed)), plan,
                                       cfg.eval_traces);
      m.evals.push_back({next_eval, st.mean_return, st.success_rate});
      next_eval += cfg.eval_every;
    }
  };

  int h = 0, f = 0;
  double ep_reward = 0.0;
  // consecutive explore/learn rounds without reaching the goal once; if
  // local repair keeps cycling without restoring progress, fall back to
  // relearning from scratch (threshold doubles per escalation)
  int stalled_rounds = 0;
  int escalate_at = 8;
  auto end_episode = [&](bool goal) {
    m.episodes.push_back({sim.steps_used(), ep_reward, goal});
    if (goal) {
      ++m.goals_total;
      m.goals.push_back({sim.steps_used(), m.goals_total});
      f = 0;
      stalled_rounds = 0;
    }
    sim.reset();
    h = 0;
    ep_reward = 0.0;
  };

  // read-only consistency probe for the comprehensive baseline's walks
  auto walk_finds_inconsistency = [&]() {
    std::uniform_int_distribution<uint32_t> pick(
        0, static_cast<uint32_t>(sim.space()->actions.size()) - 1);
    bool bad = false;
    for (int i = 0; i < cfg.walk_length; ++i) {
      if (sim.goal_reached(sim.current())) sim.reset();
      ppddl::State s = sim.current();
      uint32_t a = pick(rng);
      ppddl::State sobs = sim.step(a);
      if (!model::is_consistent(ln.model(), {s, a, sobs}, *sim.space()).consistent) bad = true;
    }
    return bad;
  };

  try {
    for (;;) {
      if (sim.steps_used() >= sim.budget()) break;

      if (f > cfg.beta || !plan.goal_reachable) {
        bool relearn = false;
        if (cfg.comprehensive) {
          relearn = walk_finds_inconsistency();
        } else if (++stalled_rounds >= escalate_at) {
          ln.relearn_comprehensive(sim);
          stalled_rounds = 0;
          escalate_at *= 2;
        } else {
          ln.explore(sim, cfg.walk_length, rng);
        }
        f = 0;
        sim.reset();
        h = 0;
        ep_reward = 0.0;
        if (relearn && !ln.needs_learning()) ln.learn(sim);
      }

      if (ln.needs_learning()) {
        uint64_t before = sim.steps_used();
        ln.learn(sim);
        if (sim.steps_used() != before) {
          sim.reset();
          h = 0;
          ep_reward = 0.0;
        }
      }
      if (ln.invocations() != last_invocations) {
        record_vd();
        last_invocations = ln.invocations();
      }
      if (ln.model().version() != last_version) replan_full();
      maybe_eval();
      if (sim.steps_used() >= sim.budget()) break;

      ppddl::State s = sim.current();
      uint32_t a;
      auto it = plan.policy.find(s);
      if (it != plan.policy.end()) {
        a = it->second;
      } else if (!aux_missing.count(s)) {
        // stochastic drift off the planned envelope: widen the plan from here
        auto aux = solve::plan(*view, s, goal_fn, pcfg);
        for (const auto& [st, act] : aux.policy) plan.policy.emplace(st, act);
        auto it2 = plan.policy.find(s);
        if (it2 != plan.policy.end()) {
          a = it2->second;
        } else {
          aux_missing.insert(s);
          std::uniform_int_distribution<uint32_t> pick(
              0, static_cast<uint32_t>(sim.space()->actions.size()) - 1);
          a = pick(rng);
        }
      } else {
        std::uniform_int_distribution<uint32_t> pick(
            0, static_cast<uint32_t>(sim.space()->actions.size()) - 1);
        a = pick(rng);
      }
      ppddl::State sobs = sim.step(a);
      ++h;
      ep_reward += -1.0;

      if (cfg.comprehensive) {
        auto verdict = model::is_consistent(ln.model(), {s, a, sobs}, *sim.space());
        if (!verdict.consistent) ln.learn(sim);  // wholesale relearn
      } else {
        auto verdict = ln.handle_transition({s, a, sobs}, *sim.space());
        if (verdict.consistent && verdict.matched_effect && cfg.gof_enabled)
          mon.observe(ln.model(), sim.space()->actions[a].schema, *verdict.matched_effect);
      }

      if (sim.goal_reached(sobs))
        end_episode(true);
      else if (h >= cfg.horizon) {
        ++f;
        end_episode(false);
      }
    }
  } catch (const world::BudgetExhausted&) {
    // budget spent mid-operation: wrap up normally
  }

  // monitor refits can change the model after the last learner invocation
  if (ln.invocations() != last_invocations || ln.model().version() != vd_version) record_vd();
  if (ln.model().version() != last_version) replan_full();
  next_eval = std::min(next_eval, sim.steps_used());
  maybe_eval();
  m.steps_used = sim.steps_used();
  m.learner_invocations = ln.invocations();
  m.events = ln.log().events();
  return m;
}

}  // namespace clap::loop
