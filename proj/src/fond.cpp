#include "clap/fond.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace clap::fond {

namespace {

ppddl::Atom ground_litkey(const model::LitKey& k,
                          const std::map<std::string, std::string>& binding) {
  ppddl::Atom a;
  a.pred = k.pred;
  for (const auto& v : k.args) a.args.push_back(binding.at(v));
  return a;
}

}  // namespace

JointProblem::JointProblem(const model::LearnedModel& m1, const model::LearnedModel& m2,
                           std::shared_ptr<const ppddl::GroundSpace> space)
    : space_(std::move(space)), skeleton_(m1.skeleton()) {
  for (uint32_t i = 0; i < space_->actions.size(); ++i) {
    ops1_.push_back(model::ground_action_model(m1, i, *space_));
    ops2_.push_back(model::ground_action_model(m2, i, *space_));
    stale1_.push_back(m1.action(space_->actions[i].schema).prob_stale);
    stale2_.push_back(m2.action(space_->actions[i].schema).prob_stale);
  }
}

std::vector<JointOutcome> JointProblem::outcomes(const JointState& js, uint32_t action) const {
  const ppddl::GroundOp& op1 = ops1_[action];
  const ppddl::GroundOp& op2 = ops2_[action];
  bool app1 = ppddl::holds(js.s1, op1.pre);
  bool app2 = ppddl::holds(js.s2, op2.pre);

  auto pos = [](const ppddl::GroundOp& op, bool stale, std::size_t i) {
    if (i >= op.eff.size()) return false;
    return stale || (i < op.prob.size() && op.prob[i] > 0.0);
  };

  std::size_t n = std::max(op1.eff.size(), op2.eff.size());
  std::vector<JointOutcome> out;
  std::set<JointState> seen;
  for (std::size_t i = 0; i < n; ++i) {
    bool fire1 = app1 && pos(op1, stale1_[action], i);
    bool fire2 = app2 && pos(op2, stale2_[action], i);
    if (!fire1 && !fire2) continue;
    JointState next;
    next.s1 = fire1 ? ppddl::apply_effect(js.s1, op1.eff[i]) : js.s1;
    next.s2 = fire2 ? ppddl::apply_effect(js.s2, op2.eff[i]) : js.s2;
    if (seen.insert(next).second) out.push_back({static_cast<int>(i), std::move(next)});
  }
  if (out.empty()) out.push_back({-1, js});
  return out;
}

FondResult solve_fond_capped(const JointProblem& problem, const ppddl::State& s0,
                             std::size_t node_budget);

FondResult solve_fond(const JointProblem& problem, const ppddl::State& s0,
                      std::size_t node_budget) {
  // A solution found on a partially expanded graph is valid: the fixpoint
  // prunes every action edge with an outcome on an unexpanded leaf, so the
  // returned policy is closed within the explored region. Only Unsolvable
  // needs the fully expanded graph. Expansion therefore escalates a node
  // cap instead of always exhausting the (often enormous) joint space.
  for (std::size_t cap = std::min<std::size_t>(4096, node_budget);;
       cap = std::min(cap * 4, node_budget)) {
    FondResult res = solve_fond_capped(problem, s0, cap);
    if (res.status == FondStatus::BudgetExhausted && cap < node_budget) continue;
    return res;
  }
}

FondResult solve_fond_capped(const JointProblem& problem, const ppddl::State& s0,
                             std::size_t node_budget) {
  FondResult res;
  JointState start{s0, s0};

  // forward reachability graph
  std::map<JointState, uint32_t> index;
  std::vector<JointState> nodes;
  std::vector<bool> goal;
  // edges[node] = list of (action, outcome node indices)
  std::vector<std::vector<std::pair<uint32_t, std::vector<uint32_t>>>> edges;

  auto intern = [&](const JointState& js) -> uint32_t {
    auto it = index.find(js);
    if (it != index.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(nodes.size());
    index.emplace(js, id);
    nodes.push_back(js);
    goal.push_back(js.diverged());
    edges.emplace_back();
    return id;
  };

  std::deque<uint32_t> frontier{intern(start)};
  std::set<uint32_t> expanded;
  bool capped = false;
  while (!frontier.empty()) {
    if (nodes.size() >= node_budget) {
      // stop expanding; pending frontier nodes stay as edge-less leaves
      capped = true;
      break;
    }
    uint32_t u = frontier.front();
    frontier.pop_front();
    if (goal[u] || expanded.count(u)) continue;
    expanded.insert(u);
    ++res.nodes_expanded;
    for (uint32_t a = 0; a < problem.action_count(); ++a) {
      auto outs = problem.outcomes(nodes[u], a);
      // a pure self-loop can never contribute to a solution
      if (outs.size() == 1 && outs[0].next == nodes[u]) continue;
      std::vector<uint32_t> succ;
      for (auto& o : outs) {
        uint32_t v = intern(o.next);
        succ.push_back(v);
        if (!goal[v] && !expanded.count(v)) frontier.push_back(v);
      }
      edges[u].push_back({a, std::move(succ)});
    }
  }

  // strong-cyclic fixpoint: prune (state, action) pairs with an outcome
  // outside the set from which the goal stays reachable
  std::size_t n = nodes.size();
  std::vector<std::vector<bool>> allowed(n);
  for (std::size_t u = 0; u < n; ++u) allowed[u].assign(edges[u].size(), true);

  // reverse adjacency: which (state, action-edge) pairs can land on a node
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> rev(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t e = 0; e < edges[u].size(); ++e) {
      std::set<uint32_t> uniq(edges[u][e].second.begin(), edges[u][e].second.end());
      for (uint32_t v : uniq)
        rev[v].push_back({static_cast<uint32_t>(u), static_cast<uint32_t>(e)});
    }

  std::vector<bool> reach(n, false);
  for (;;) {
    std::fill(reach.begin(), reach.end(), false);
    std::deque<uint32_t> work;
    for (std::size_t u = 0; u < n; ++u)
      if (goal[u]) {
        reach[u] = true;
        work.push_back(static_cast<uint32_t>(u));
      }
    // weak backward reachability under the allowed pairs
    while (!work.empty()) {
      uint32_t v = work.front();
      work.pop_front();
      for (const auto& [u, e] : rev[v])
        if (allowed[u][e] && !reach[u]) {
          reach[u] = true;
          work.push_back(u);
        }
    }
    bool pruned = false;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t e = 0; e < edges[u].size(); ++e) {
        if (!allowed[u][e]) continue;
        for (uint32_t v : edges[u][e].second)
          if (!reach[v]) {
            allowed[u][e] = false;
            pruned = true;
            break;
          }
      }
    }
    if (!pruned) break;
  }

  if (!reach[index[start]]) {
    // a truncated graph can prove solvability but never unsolvability
    res.status = capped ? FondStatus::BudgetExhausted : FondStatus::Unsolvable;
    return res;
  }

  // extract a policy that always has an outcome strictly closer to the goal
  constexpr uint32_t kInf = std::numeric_limits<uint32_t>::max();
  std::vector<uint32_t> dist(n, kInf);
  std::vector<uint32_t> pick(n, kInf);
  for (std::size_t u = 0; u < n; ++u)
    if (goal[u]) dist[u] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (goal[u] || !reach[u]) continue;
      for (std::size_t e = 0; e < edges[u].size(); ++e) {
        if (!allowed[u][e]) continue;
        uint32_t best = kInf;
        for (uint32_t v : edges[u][e].second) best = std::min(best, dist[v]);
        if (best != kInf && best + 1 < dist[u]) {
          dist[u] = best + 1;
          pick[u] = static_cast<uint32_t>(e);
          changed = true;
        }
      }
    }
  }

  res.status = FondStatus::Solved;
  for (std::size_t u = 0; u < n; ++u)
    if (!goal[u] && pick[u] != kInf) res.policy.choice[nodes[u]] = edges[u][pick[u]].first;
  return res;
}

bool check_distinguishing(const JointProblem& problem, const Policy& policy,
                          const ppddl::State& s0, const model::Target& target) {
  JointState start{s0, s0};
  std::set<JointState> seen{start};
  std::deque<JointState> work{start};
  bool diverged_somewhere = false;

  while (!work.empty()) {
    JointState js = work.front();
    work.pop_front();
    if (js.diverged()) continue;
    if (!policy.defined(js)) return false;  // execution can stall
    uint32_t a = policy.choice.at(js);
    for (const auto& o : problem.outcomes(js, a)) {
      if (o.next.diverged()) {
        diverged_somewhere = true;
        if (target.loc.kind == model::LocKind::Effect) {
          const ppddl::GroundAction& ga = problem.space().actions[a];
          if (ga.schema != target.action) return false;
          const ppddl::ActionSchema* schema = problem.skeleton().find_action(ga.schema);
          uint32_t id = problem.space().id_of(ground_litkey(target.lit, ga.binding(*schema)));
          if (o.next.s1.contains(id) == o.next.s2.contains(id)) return false;
        }
      } else if (seen.insert(o.next).second) {
        work.push_back(o.next);
      }
    }
  }
  return diverged_somewhere;
}

std::string export_pddl(const model::LearnedModel& m1, const model::LearnedModel& m2,
                        const ppddl::GroundSpace& space, const ppddl::State& s0) {
  std::ostringstream os;
  ppddl::LiftedDomain d1 = m1.to_domain();
  ppddl::LiftedDomain d2 = m2.to_domain();
  os << ";; two-copy query problem; copy-2 predicates carry the c2- prefix\n";
  os << ";; goal: reach a state where some atom p differs from its c2-p twin\n";
  os << "(define (domain " << d1.name << "-query)\n  (:predicates";
  for (const auto& p : d1.predicates) {
    for (int copy = 0; copy < 2; ++copy) {
      os << "\n    (" << (copy ? "c2-" : "") << p.name;
      for (const auto& v : p.params) os << " ?" << v.name << " - " << v.type;
      os << ")";
    }
  }
  os << ")\n";
  for (const auto& a1 : d1.actions) {
    const ppddl::ActionSchema* a2 = d2.find_action(a1.name);
    os << "  (:action " << a1.name << "\n    :parameters (";
    for (std::size_t i = 0; i < a1.params.size(); ++i)
      os << (i ? " " : "") << "?" << a1.params[i].name << " - " << a1.params[i].type;
    os << ")\n    :precondition (and";
    for (const auto& l : a1.pre) {
      os << " " << (l.positive ? "" : "(not ") << ppddl::to_string(l.atom)
         << (l.positive ? "" : ")");
    }
    if (a2)
      for (const auto& l : a2->pre) {
        ppddl::Atom at = l.atom;
        at.pred = "c2-" + at.pred;
        os << " " << (l.positive ? "" : "(not ") << ppddl::to_string(at)
           << (l.positive ? "" : ")");
      }
    os << ")\n    :effect (oneof";
    std::size_t n = std::max(a1.eff.size(), a2 ? a2->eff.size() : 0);
    for (std::size_t i = 0; i < n; ++i) {
      os << "\n      (and";
      if (i < a1.eff.size()) {
        for (const auto& at : a1.eff[i].del) os << " (not " << ppddl::to_string(at) << ")";
        for (const auto& at : a1.eff[i].add) os << " " << ppddl::to_string(at);
      }
      if (a2 && i < a2->eff.size()) {
        for (auto at : a2->eff[i].del) {
          at.pred = "c2-" + at.pred;
          os << " (not " << ppddl::to_string(at) << ")";
        }
        for (auto at : a2->eff[i].add) {
          at.pred = "c2-" + at.pred;
          os << " " << ppddl::to_string(at);
        }
      }
      os << ")";
    }
    os << "))\n";
  }
  os << ")\n;; init:";
  for (const auto& at : space.atoms_of(s0)) {
    os << " " << ppddl::to_string(at);
    ppddl::Atom twin = at;
    twin.pred = "c2-" + twin.pred;
    os << " " << ppddl::to_string(twin);
  }
  os << "\n";
  return os.str();
}

}  // namespace clap::fond
