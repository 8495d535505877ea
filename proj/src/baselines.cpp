#include "clap/baselines.hpp"

#include <algorithm>
#include <memory>
#include <random>

#include "clap/solve.hpp"

namespace clap::baselines {

double QTable::get(const ppddl::State& s, uint32_t a) const {
  auto it = q_.find(s);
  return it == q_.end() ? 0.0 : it->second[a];
}

void QTable::set(const ppddl::State& s, uint32_t a, double v) {
  auto [it, fresh] = q_.try_emplace(s, std::vector<double>(na_, 0.0));
  it->second[a] = v;
}

double QTable::max_value(const ppddl::State& s) const {
  auto it = q_.find(s);
  if (it == q_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

uint32_t QTable::greedy(const ppddl::State& s) const {
  auto it = q_.find(s);
  if (it == q_.end()) return 0;
  uint32_t best = 0;
  for (uint32_t a = 1; a < na_; ++a)
    if (it->second[a] > it->second[best]) best = a;
  return best;
}

void q_update(QTable& q, const ppddl::State& s, uint32_t a, double r, const ppddl::State& s2,
              bool terminal, double alpha, double gamma) {
  double target = r + (terminal ? 0.0 : gamma * q.max_value(s2));
  q.set(s, a, (1.0 - alpha) * q.get(s, a) + alpha * target);
}

namespace {

// discounted greedy rollouts on a fork, mirroring solve::evaluate_policy
metrics::EvalPoint evaluate_q(const world::Simulator& sim, const QTable& q, uint64_t at_step,
                              const QConfig& cfg, const std::string& task) {
  world::Simulator clone = sim.fork(loop::eval_seed(task, at_step, cfg.seed));
  double total = 0.0;
  int succ = 0;
  for (int ep = 0; ep < cfg.eval_traces; ++ep) {
    ppddl::State s = clone.reset();
    double ret = 0.0, disc = 1.0;
    bool done = clone.goal_reached(s);
    for (int t = 0; t < cfg.horizon && !done; ++t) {
      s = clone.step(q.greedy(s));
      ret += disc * -1.0;
      disc *= cfg.gamma;
      done = clone.goal_reached(s);
    }
    total += ret;
    if (done) ++succ;
  }
  return {at_step, total / cfg.eval_traces,
          static_cast<double>(succ) / cfg.eval_traces};
}

}  // namespace

metrics::RunMetrics qlearning_run(world::Simulator& sim, const QConfig& cfg) {
  metrics::RunMetrics m;
  m.method = "qlearning";
  m.task = sim.task().name;
  m.seed = cfg.seed;

  std::size_t na = sim.space()->actions.size();
  QTable q(na);
  std::mt19937_64 rng(cfg.seed ^ loop::eval_seed(m.task, 0x71ull, cfg.seed));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<uint32_t> pick(0, static_cast<uint32_t>(na) - 1);

  uint64_t next_eval = 0;
  auto maybe_eval = [&] {
    while (next_eval <= sim.steps_used()) {
      m.evals.push_back(evaluate_q(sim, q, next_eval, cfg, m.task));
      next_eval += cfg.eval_every;
    }
  };

  int h = 0;
  double ep_reward = 0.0;
  try {
    sim.reset();
    for (;;) {
      if (sim.steps_used() >= sim.budget()) break;
      maybe_eval();
      ppddl::State s = sim.current();
      uint32_t a = coin(rng) < cfg.epsilon ? pick(rng) : q.greedy(s);
      ppddl::State sobs = sim.step(a);
      bool terminal = sim.goal_reached(sobs);
      q_update(q, s, a, -1.0, sobs, terminal, cfg.alpha, cfg.gamma);
      ++h;
      ep_reward += -1.0;
      if (terminal) {
        ++m.goals_total;
        m.goals.push_back({sim.steps_used(), m.goals_total});
        m.episodes.push_back({sim.steps_used(), ep_reward, true});
        sim.reset();
        h = 0;
        ep_reward = 0.0;
      } else if (h >= cfg.horizon) {
        m.episodes.push_back({sim.steps_used(), ep_reward, false});
        sim.reset();
        h = 0;
        ep_reward = 0.0;
      }
    }
  } catch (const world::BudgetExhausted&) {
  }
  next_eval = std::min(next_eval, sim.steps_used());
  maybe_eval();
  m.steps_used = sim.steps_used();
  return m;
}

metrics::RunMetrics oracle_run(world::Simulator& sim, const ppddl::LiftedDomain& truth,
                               const loop::ClapConfig& cfg, const world::ChangeSchedule* schedule) {
  metrics::RunMetrics m;
  m.method = "oracle";
  m.task = sim.task().name;
  m.seed = cfg.seed;

  auto goal_fn = [&sim](const ppddl::State& s) { return sim.goal_reached(s); };
  solve::PlanConfig pcfg;
  pcfg.gamma = cfg.gamma;

  ppddl::State s0 = sim.reset();
  ppddl::LiftedDomain current_truth = truth;
  std::size_t next_change = 0;

  auto model = model::LearnedModel::from_domain(current_truth);
  auto view = std::make_unique<model::PlanningView>(model, sim.space(), false);
  solve::PlanResult plan = solve::plan(*view, s0, goal_fn, pcfg);
  ++m.replans;
  {
    auto it = plan.policy.find(s0);
    m.policy_at_start = it == plan.policy.end() ? "" : sim.space()->actions[it->second].name();
  }

  auto replan = [&] {
    model = model::LearnedModel::from_domain(current_truth);
    view = std::make_unique<model::PlanningView>(model, sim.space(), false);
    plan = solve::plan(*view, s0, goal_fn, pcfg);
    ++m.replans;
    auto it = plan.policy.find(s0);
    m.policy_at_start = it == plan.policy.end() ? "" : sim.space()->actions[it->second].name();
  };

  uint64_t next_eval = 0;
  auto maybe_eval = [&] {
    while (next_eval <= sim.steps_used()) {
      auto st = solve::evaluate_policy(sim.fork(loop::eval_seed(m.task, next_eval, cfg.seed)),
                                       plan, cfg.eval_traces);
      m.evals.push_back({next_eval, st.mean_return, st.success_rate});
      next_eval += cfg.eval_every;
    }
  };

  int h = 0;
  double ep_reward = 0.0;
  try {
    for (;;) {
      if (sim.steps_used() >= sim.budget()) break;
      if (schedule && next_change < schedule->entries.size() &&
          sim.steps_used() >= schedule->entries[next_change].trigger) {
        current_truth = schedule->entries[next_change].domain;
        ++next_change;
        replan();
      }
      maybe_eval();
      ppddl::State s = sim.current();
      uint32_t a;
      auto it = plan.policy.find(s);
      if (it != plan.policy.end()) {
        a = it->second;
      } else {
        auto aux = solve::plan(*view, s, goal_fn, pcfg);
        for (const auto& [st, act] : aux.policy) plan.policy.emplace(st, act);
        auto it2 = plan.policy.find(s);
        a = it2 == plan.policy.end() ? 0 : it2->second;
      }
      ppddl::State sobs = sim.step(a);
      ++h;
      ep_reward += -1.0;
      if (sim.goal_reached(sobs)) {
        ++m.goals_total;
        m.goals.push_back({sim.steps_used(), m.goals_total});
        m.episodes.push_back({sim.steps_used(), ep_reward, true});
        sim.reset();
        h = 0;
        ep_reward = 0.0;
      } else if (h >= cfg.horizon) {
        m.episodes.push_back({sim.steps_used(), ep_reward, false});
        sim.reset();
        h = 0;
        ep_reward = 0.0;
      }
    }
  } catch (const world::BudgetExhausted&) {
  }
  next_eval = std::min(next_eval, sim.steps_used());
  maybe_eval();
  m.steps_used = sim.steps_used();
  return m;
}

}  // namespace clap::baselines
