#include "clap/solve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace clap::solve {

namespace {

using Succ = std::vector<std::pair<ppddl::State, double>>;

struct Node {
  bool goal = false;
  std::vector<Succ> succ;  // per action, empty until expanded
  bool expanded = false;
};

using NodeMap = std::unordered_map<ppddl::State, Node, ppddl::StateHash>;
using ValueMap = std::unordered_map<ppddl::State, double, ppddl::StateHash>;

double heuristic(bool goal) { return goal ? 0.0 : -1.0; }

double value_of(const ValueMap& v, const ppddl::State& s, const NodeMap& nodes,
                const GoalFn& is_goal) {
  auto it = v.find(s);
  if (it != v.end()) return it->second;
  auto nit = nodes.find(s);
  bool g = nit != nodes.end() ? nit->second.goal : is_goal(s);
  return heuristic(g);
}

}  // namespace

PlanResult plan(const model::PlanningView& view, const ppddl::State& s0, const GoalFn& is_goal,
                const PlanConfig& cfg) {
  PlanResult res;
  NodeMap nodes;
  ValueMap value;
  std::size_t na = view.action_count();

  auto touch = [&](const ppddl::State& s) -> Node& {
    auto [it, fresh] = nodes.try_emplace(s);
    if (fresh) {
      it->second.goal = is_goal(s);
      value[s] = heuristic(it->second.goal);
    }
    return it->second;
  };

  auto expand = [&](const ppddl::State& s) {
    Node& n = touch(s);
    if (n.expanded || n.goal) return;
    n.succ.resize(na);
    for (uint32_t a = 0; a < na; ++a) n.succ[a] = view.successors(s, a);
    n.expanded = true;
    for (const auto& sv : n.succ)
      for (const auto& [s2, p] : sv) touch(s2);
  };

  auto q_value = [&](const Node& n, uint32_t a) {
    double q = -1.0;
    double exp = 0.0;
    for (const auto& [s2, p] : n.succ[a]) exp += p * value_of(value, s2, nodes, is_goal);
    return q + cfg.gamma * exp;
  };

  auto greedy = [&](const Node& n) -> uint32_t {
    uint32_t best = 0;
    double bq = q_value(n, 0);
    for (uint32_t a = 1; a < na; ++a) {
      double q = q_value(n, a);
      if (q > bq + 1e-12) {  // ties keep the lexicographically first action
        bq = q;
        best = a;
      }
    }
    return best;
  };

  expand(s0);
  bool capped = false;
  for (;;) {
    // grow the envelope along the greedy policy until closed
    for (;;) {
      std::vector<ppddl::State> fringe;
      std::unordered_map<ppddl::State, bool, ppddl::StateHash> seen;
      std::deque<ppddl::State> work{s0};
      seen[s0] = true;
      while (!work.empty()) {
        ppddl::State s = work.front();
        work.pop_front();
        Node& n = touch(s);
        if (n.goal) continue;
        if (!n.expanded) {
          fringe.push_back(s);
          continue;
        }
        for (const auto& [s2, p] : n.succ[greedy(n)])
          if (!seen[s2]) {
            seen[s2] = true;
            work.push_back(s2);
          }
      }
      if (fringe.empty()) break;
      for (const auto& s : fringe) {
        if (nodes.size() >= cfg.node_cap) {
          capped = true;
          break;
        }
        expand(s);
      }
      if (capped) break;
    }

    // value-iterate the expanded envelope
    double residual;
    do {
      residual = 0.0;
      for (auto& [s, n] : nodes) {
        if (!n.expanded || n.goal) continue;
        double best = q_value(n, 0);
        for (uint32_t a = 1; a < na; ++a) best = std::max(best, q_value(n, a));
        residual = std::max(residual, std::fabs(best - value[s]));
        value[s] = best;
      }
    } while (residual > cfg.epsilon);

    if (capped) break;
    // converged values may redirect the greedy policy into fresh territory
    bool open = false;
    {
      std::unordered_map<ppddl::State, bool, ppddl::StateHash> seen;
      std::deque<ppddl::State> work{s0};
      seen[s0] = true;
      while (!work.empty() && !open) {
        ppddl::State s = work.front();
        work.pop_front();
        Node& n = nodes.at(s);
        if (n.goal) continue;
        if (!n.expanded) {
          open = true;
          break;
        }
        for (const auto& [s2, p] : n.succ[greedy(n)])
          if (!seen[s2]) {
            seen[s2] = true;
            work.push_back(s2);
          }
      }
    }
    if (!open) break;
  }

  res.converged = !capped;
  for (auto& [s, n] : nodes) {
    if (!n.expanded || n.goal) continue;
    res.policy[s] = greedy(n);
  }
  res.value = value;
  res.v0 = value_of(value, s0, nodes, is_goal);

  // reachability under full action support, independent of the policy
  {
    std::unordered_map<ppddl::State, bool, ppddl::StateHash> seen;
    std::deque<ppddl::State> work{s0};
    seen[s0] = true;
    while (!work.empty() && !res.goal_reachable) {
      ppddl::State s = work.front();
      work.pop_front();
      if (is_goal(s)) {
        res.goal_reachable = true;
        break;
      }
      if (seen.size() > cfg.node_cap) break;
      for (uint32_t a = 0; a < na; ++a) {
        if (!view.applicable(s, a)) continue;
        for (const auto& [s2, p] : view.successors(s, a))
          if (!seen[s2]) {
            seen[s2] = true;
            work.push_back(s2);
          }
      }
    }
  }
  return res;
}

std::unordered_map<ppddl::State, double, ppddl::StateHash> dense_value_iteration(
    const model::PlanningView& view, const ppddl::State& s0, const GoalFn& is_goal,
    const PlanConfig& cfg) {
  std::vector<ppddl::State> states{s0};
  std::unordered_map<ppddl::State, std::size_t, ppddl::StateHash> index{{s0, 0}};
  std::size_t na = view.action_count();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states.size() > cfg.node_cap)
      throw ppddl::ValidationError("dense_value_iteration: reachable set exceeds node cap");
    for (uint32_t a = 0; a < na; ++a)
      for (const auto& [s2, p] : view.successors(states[i], a))
        if (index.try_emplace(s2, states.size()).second) states.push_back(s2);
  }

  std::vector<double> v(states.size());
  std::vector<bool> goal(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    goal[i] = is_goal(states[i]);
    v[i] = goal[i] ? 0.0 : -1.0;
  }
  double residual;
  do {
    residual = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (goal[i]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (uint32_t a = 0; a < na; ++a) {
        double exp = 0.0;
        for (const auto& [s2, p] : view.successors(states[i], a)) exp += p * v[index.at(s2)];
        best = std::max(best, -1.0 + cfg.gamma * exp);
      }
      residual = std::max(residual, std::fabs(best - v[i]));
      v[i] = best;
    }
  } while (residual > cfg.epsilon);

  std::unordered_map<ppddl::State, double, ppddl::StateHash> out;
  for (std::size_t i = 0; i < states.size(); ++i) out[states[i]] = v[i];
  return out;
}

EvalStats evaluate_policy(world::Simulator sim, const PlanResult& plan, int episodes) {
  EvalStats st;
  double gamma = sim.task().gamma;
  int horizon = sim.task().horizon;
  double total_return = 0.0, total_steps = 0.0;
  int successes = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    ppddl::State s = sim.reset();
    double ret = 0.0, disc = 1.0;
    int t = 0;
    bool done = sim.goal_reached(s);
    for (; t < horizon && !done; ++t) {
      auto it = plan.policy.find(s);
      if (it != plan.policy.end())
        s = sim.step(it->second);
      // no policy entry: idle in place, still paying the step cost
      ret += disc * -1.0;
      disc *= gamma;
      done = sim.goal_reached(s);
    }
    total_return += ret;
    total_steps += t;
    if (done) ++successes;
  }
  st.mean_return = total_return / episodes;
  st.mean_steps = total_steps / episodes;
  st.success_rate = static_cast<double>(successes) / episodes;
  return st;
}

EvalStats evaluate_policy_model(const model::PlanningView& view, const ppddl::State& s0,
                                const PlanResult& plan, const GoalFn& is_goal, double gamma,
                                int horizon, int episodes, uint64_t seed) {
  EvalStats st;
  std::mt19937_64 rng(seed);
  double total_return = 0.0, total_steps = 0.0;
  int successes = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    ppddl::State s = s0;
    double ret = 0.0, disc = 1.0;
    int t = 0;
    bool done = is_goal(s);
    for (; t < horizon && !done; ++t) {
      auto it = plan.policy.find(s);
      if (it != plan.policy.end()) {
        auto succ = view.successors(s, it->second);
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double acc = 0.0;
        for (const auto& [s2, p] : succ) {
          acc += p;
          if (u < acc) {
            s = s2;
            break;
          }
        }
      }
      ret += disc * -1.0;
      disc *= gamma;
      done = is_goal(s);
    }
    total_return += ret;
    total_steps += t;
    if (done) ++successes;
  }
  st.mean_return = total_return / episodes;
  st.mean_steps = total_steps / episodes;
  st.success_rate = static_cast<double>(successes) / episodes;
  return st;
}

}  // namespace clap::solve
