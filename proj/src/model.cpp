#include "clap/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace clap::model {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Positive: return "+";
    case Mode::Negative: return "-";
    case Mode::Absent: return "x";
    case Mode::Unknown: return "?";
  }
  return "?";
}

std::string to_string(const Location& l) {
  if (l.kind == LocKind::Precondition) return "pre";
  return "eff[" + std::to_string(l.eff_index) + "]";
}

std::string to_string(const Target& t) {
  return t.action + "/" + ppddl::to_string(t.lit.atom()) + "/" + to_string(t.loc);
}

bool ActionModel::has_unknown_effect_literal() const {
  for (const auto& e : effects)
    for (const auto& [k, m] : e.modes)
      if (m == Mode::Unknown) return true;
  return false;
}

bool ActionModel::complete() const {
  return !prob_stale && !effects.empty() && !has_unknown_effect_literal();
}

std::vector<LitKey> literal_universe(const ppddl::LiftedDomain& domain,
                                     const std::vector<ppddl::TypedVar>& params) {
  std::vector<LitKey> out;
  for (const auto& pred : domain.predicates) {
    std::vector<std::vector<std::string>> choices;
    for (const auto& pp : pred.params) {
      std::vector<std::string> c;
      for (const auto& ap : params)
        if (domain.types.is_subtype(ap.type, pp.type)) c.push_back(ap.name);
      choices.push_back(std::move(c));
    }
    std::vector<std::string> cur(pred.params.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == cur.size()) {
        out.push_back({pred.name, cur});
        return;
      }
      for (const auto& name : choices[i]) {
        cur[i] = name;
        rec(i + 1);
      }
    };
    rec(0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

LearnedModel LearnedModel::empty_for(const ppddl::LiftedDomain& skeleton) {
  LearnedModel m;
  m.skeleton_ = skeleton;
  for (auto& a : m.skeleton_.actions) {
    a.pre.clear();
    a.eff.clear();
    a.prob.clear();
  }
  for (const auto& a : skeleton.actions) {
    ActionModel am;
    am.params = a.params;
    am.universe = literal_universe(skeleton, a.params);
    for (const auto& k : am.universe) am.pre_modes[k] = Mode::Unknown;
    am.prob_stale = true;
    m.actions_[a.name] = std::move(am);
  }
  // queue every unknown precondition literal
  for (const auto& a : skeleton.actions)
    for (const auto& k : m.actions_[a.name].universe)
      m.enqueue({a.name, k, Location::pre()});
  return m;
}

LearnedModel LearnedModel::from_domain(const ppddl::LiftedDomain& domain) {
  LearnedModel m = empty_for(domain);
  m.queue_.clear();
  m.queued_.clear();
  for (const auto& a : domain.actions) {
    ActionModel& am = m.actions_[a.name];
    for (const auto& k : am.universe) am.pre_modes[k] = Mode::Absent;
    for (const auto& l : a.pre) {
      LitKey k{l.atom.pred, l.atom.args};
      am.pre_modes[k] = l.positive ? Mode::Positive : Mode::Negative;
    }
    am.effects.clear();
    for (const auto& e : a.eff) {
      ActionModel::EffectModel em;
      for (const auto& k : am.universe) em.modes[k] = Mode::Absent;
      for (const auto& at : e.del) em.modes[{at.pred, at.args}] = Mode::Negative;
      for (const auto& at : e.add) em.modes[{at.pred, at.args}] = Mode::Positive;
      am.effects.push_back(std::move(em));
    }
    am.prob = a.prob;
    am.prob_stale = false;
  }
  return m;
}

const ActionModel& LearnedModel::action(const std::string& name) const {
  auto it = actions_.find(name);
  if (it == actions_.end()) throw ppddl::ValidationError("unknown action model " + name);
  return it->second;
}

ActionModel& LearnedModel::action_mut(const std::string& name) {
  auto it = actions_.find(name);
  if (it == actions_.end()) throw ppddl::ValidationError("unknown action model " + name);
  return it->second;
}

Mode LearnedModel::mode(const Target& t) const {
  const ActionModel& am = action(t.action);
  if (t.loc.kind == LocKind::Precondition) {
    auto it = am.pre_modes.find(t.lit);
    return it == am.pre_modes.end() ? Mode::Absent : it->second;
  }
  if (t.loc.eff_index < 0 || t.loc.eff_index >= static_cast<int>(am.effects.size()))
    throw ppddl::ValidationError("effect index out of range for " + to_string(t));
  const auto& modes = am.effects[t.loc.eff_index].modes;
  auto it = modes.find(t.lit);
  return it == modes.end() ? Mode::Absent : it->second;
}

void LearnedModel::set_mode(const Target& t, Mode m) {
  ActionModel& am = action_mut(t.action);
  if (t.loc.kind == LocKind::Precondition) {
    am.pre_modes[t.lit] = m;
  } else {
    if (t.loc.eff_index < 0 || t.loc.eff_index >= static_cast<int>(am.effects.size()))
      throw ppddl::ValidationError("effect index out of range for " + to_string(t));
    am.effects[t.loc.eff_index].modes[t.lit] = m;
    if (m != Mode::Unknown) am.prob_stale = true;
  }
  deferred_.erase(t.action);
  ++version_;
}

int LearnedModel::discover_effect_list(const std::string& action,
                                       const std::vector<LitKey>& dels,
                                       const std::vector<LitKey>& adds) {
  ActionModel& am = action_mut(action);
  ActionModel::EffectModel em;
  for (const auto& k : am.universe) em.modes[k] = Mode::Absent;
  for (const auto& k : dels) em.modes[k] = Mode::Negative;
  for (const auto& k : adds) em.modes[k] = Mode::Positive;
  am.effects.push_back(std::move(em));
  am.prob.resize(am.effects.size(), 0.0);
  am.prob_stale = true;
  deferred_.clear();
  ++version_;
  wake_dormant();
  return static_cast<int>(am.effects.size()) - 1;
}

void LearnedModel::enqueue(const Target& t) {
  if (queued_.count(t)) return;
  queue_.push_back(t);
  queued_.insert(t);
  dormant_.erase(t);
}

std::optional<Target> LearnedModel::pop_target() {
  if (queue_.empty()) return std::nullopt;
  // preconditions of the front element's action take priority over effects
  std::size_t best = 0;
  const std::string& act = queue_.front().action;
  if (queue_.front().loc.kind == LocKind::Effect) {
    for (std::size_t i = 1; i < queue_.size(); ++i) {
      if (queue_[i].action == act && queue_[i].loc.kind == LocKind::Precondition) {
        best = i;
        break;
      }
    }
  }
  Target t = queue_[best];
  queue_.erase(queue_.begin() + static_cast<long>(best));
  queued_.erase(t);
  return t;
}

void LearnedModel::remove_from_queue(const Target& t) {
  auto it = std::find(queue_.begin(), queue_.end(), t);
  if (it != queue_.end()) queue_.erase(it);
  queued_.erase(t);
}

void LearnedModel::mark_dormant(const Target& t) {
  remove_from_queue(t);
  dormant_.insert(t);
}

void LearnedModel::wake_dormant() {
  auto sleeping = dormant_;
  dormant_.clear();
  for (const auto& t : sleeping) enqueue(t);
}

std::set<Mode> LearnedModel::refuted(const Target& t) const {
  auto it = refuted_.find(t);
  return it == refuted_.end() ? std::set<Mode>{} : it->second;
}

void LearnedModel::refute(const Target& t, Mode m) { refuted_[t].insert(m); }

void LearnedModel::clear_all() {
  LearnedModel fresh = empty_for(skeleton_);
  actions_ = std::move(fresh.actions_);
  queue_ = std::move(fresh.queue_);
  queued_ = std::move(fresh.queued_);
  dormant_.clear();
  deferred_.clear();
  refuted_.clear();
  ++version_;
}

bool LearnedModel::deferred(const std::string& action) const { return deferred_.count(action); }

void LearnedModel::set_deferred(const std::string& action, bool v) {
  if (v)
    deferred_.insert(action);
  else
    deferred_.erase(action);
}

ppddl::LiftedDomain LearnedModel::to_domain() const {
  ppddl::LiftedDomain d;
  d.name = skeleton_.name;
  d.types = skeleton_.types;
  d.predicates = skeleton_.predicates;
  for (const auto& sa : skeleton_.actions) {
    const ActionModel& am = action(sa.name);
    ppddl::ActionSchema out;
    out.name = sa.name;
    out.params = am.params;
    for (const auto& [k, m] : am.pre_modes) {
      if (m == Mode::Positive) out.pre.push_back({k.atom(), true});
      if (m == Mode::Negative) out.pre.push_back({k.atom(), false});
    }
    for (std::size_t i = 0; i < am.effects.size(); ++i) {
      ppddl::Effect e;
      for (const auto& [k, m] : am.effects[i].modes) {
        if (m == Mode::Positive) e.add.push_back(k.atom());
        if (m == Mode::Negative) e.del.push_back(k.atom());
      }
      out.eff.push_back(std::move(e));
      out.prob.push_back(i < am.prob.size() ? am.prob[i] : 0.0);
    }
    for (auto& e : out.eff) e.normalize();
    std::sort(out.pre.begin(), out.pre.end());
    d.actions.push_back(std::move(out));
  }
  return d;
}

std::string LearnedModel::serialize_annotated() const {
  std::ostringstream os;
  os << ppddl::serialize_domain(to_domain());
  os << ";; --- model annotations ---\n";
  for (const auto& [name, am] : actions_) {
    os << ";; action " << name << (am.prob_stale ? " (probabilities stale)" : "") << "\n";
    for (const auto& [k, m] : am.pre_modes)
      os << ";;   pre " << ppddl::to_string(k.atom()) << " " << to_string(m) << "\n";
    for (std::size_t i = 0; i < am.effects.size(); ++i)
      for (const auto& [k, m] : am.effects[i].modes)
        if (m != Mode::Absent)
          os << ";;   eff[" << i << "] " << ppddl::to_string(k.atom()) << " " << to_string(m)
             << "\n";
  }
  os << ";; unknown queue:\n";
  for (const auto& t : queue_) os << ";;   " << to_string(t) << "\n";
  for (const auto& t : dormant_) os << ";;   " << to_string(t) << " (dormant)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Grounding and consistency
// ---------------------------------------------------------------------------

namespace {

ppddl::Atom ground_litkey(const LitKey& k, const std::map<std::string, std::string>& binding) {
  ppddl::Atom a;
  a.pred = k.pred;
  a.args.reserve(k.args.size());
  for (const auto& v : k.args) a.args.push_back(binding.at(v));
  return a;
}

const ppddl::ActionSchema& schema_of(const LearnedModel& m, const std::string& name) {
  const ppddl::ActionSchema* s = m.skeleton().find_action(name);
  if (!s) throw ppddl::ValidationError("no schema for action " + name);
  return *s;
}

}  // namespace

ppddl::GroundOp ground_action_model(const LearnedModel& m, uint32_t action_index,
                                    const ppddl::GroundSpace& space) {
  const ppddl::GroundAction& ga = space.actions.at(action_index);
  const ActionModel& am = m.action(ga.schema);
  const ppddl::ActionSchema& schema = schema_of(m, ga.schema);
  auto binding = ga.binding(schema);

  ppddl::GroundOp op;
  op.action_index = action_index;
  for (const auto& [k, mode] : am.pre_modes) {
    if (mode == Mode::Positive || mode == Mode::Negative)
      op.pre.push_back({space.id_of(ground_litkey(k, binding)), mode == Mode::Positive});
  }
  op.prob = am.prob;
  op.prob.resize(am.effects.size(), 0.0);
  for (const auto& e : am.effects) {
    ppddl::GroundEffect ge;
    for (const auto& [k, mode] : e.modes) {
      if (mode == Mode::Positive) ge.add.push_back(space.id_of(ground_litkey(k, binding)));
      if (mode == Mode::Negative) ge.del.push_back(space.id_of(ground_litkey(k, binding)));
    }
    std::sort(ge.add.begin(), ge.add.end());
    ge.add.erase(std::unique(ge.add.begin(), ge.add.end()), ge.add.end());
    std::sort(ge.del.begin(), ge.del.end());
    ge.del.erase(std::unique(ge.del.begin(), ge.del.end()), ge.del.end());
    op.eff.push_back(std::move(ge));
  }
  return op;
}

std::optional<LitKey> lift_atom(const ppddl::Atom& ground_atom, const ppddl::ActionSchema& schema,
                                const ppddl::GroundAction& ga) {
  LitKey k;
  k.pred = ground_atom.pred;
  for (const auto& obj : ground_atom.args) {
    std::string param;
    for (std::size_t i = 0; i < ga.args.size(); ++i) {
      if (ga.args[i] == obj) {
        param = schema.params[i].name;
        break;
      }
    }
    if (param.empty()) return std::nullopt;
    k.args.push_back(param);
  }
  return k;
}

ConsistencyVerdict is_consistent(const LearnedModel& m, const Transition& t,
                                 const ppddl::GroundSpace& space) {
  ConsistencyVerdict v;
  const ppddl::GroundAction& ga = space.actions.at(t.action);
  const ActionModel& am = m.action(ga.schema);
  const ppddl::ActionSchema& schema = schema_of(m, ga.schema);
  ppddl::GroundOp op = ground_action_model(m, t.action, space);

  auto positive_prob = [&](std::size_t i) {
    return am.prob_stale || (i < op.prob.size() && op.prob[i] > 0.0);
  };

  if (!ppddl::holds(t.s, op.pre)) {
    if (t.s2 == t.s) {
      v.consistent = true;
      return v;
    }
    // action visibly executed while the model deems it inapplicable:
    // implicate every precondition literal whose sign contradicts s
    for (const auto& [k, mode] : am.pre_modes) {
      if (mode != Mode::Positive && mode != Mode::Negative) continue;
      uint32_t id = space.id_of(ground_litkey(k, ga.binding(schema)));
      bool present = t.s.contains(id);
      if (present != (mode == Mode::Positive)) v.violations.push_back({ga.schema, k, Location::pre()});
    }
    return v;
  }

  for (std::size_t i = 0; i < op.eff.size(); ++i) {
    if (!positive_prob(i)) continue;
    if (ppddl::apply_effect(t.s, op.eff[i]) == t.s2) {
      v.consistent = true;
      v.matched_effect = static_cast<int>(i);
      return v;
    }
  }

  // mismatch: attribute unexplained atom changes to every effect list
  auto unknown_somewhere = [&](const LitKey& k) {
    for (const auto& e : am.effects) {
      auto it = e.modes.find(k);
      if (it != e.modes.end() && it->second == Mode::Unknown) return true;
    }
    return false;
  };

  std::vector<std::pair<uint32_t, bool>> changed;  // (atom, added?)
  for (uint32_t id : t.s2.atoms)
    if (!t.s.contains(id)) changed.push_back({id, true});
  for (uint32_t id : t.s.atoms)
    if (!t.s2.contains(id)) changed.push_back({id, false});

  auto explained = [&](uint32_t id, bool added) {
    for (std::size_t i = 0; i < op.eff.size(); ++i) {
      if (!positive_prob(i)) continue;
      const auto& set = added ? op.eff[i].add : op.eff[i].del;
      if (std::binary_search(set.begin(), set.end(), id)) return true;
    }
    return false;
  };

  auto push_violations = [&](uint32_t id) {
    auto k = lift_atom(space.atoms.at(id), schema, ga);
    if (!k || unknown_somewhere(*k)) return;
    for (std::size_t i = 0; i < am.effects.size(); ++i) {
      auto it = am.effects[i].modes.find(*k);
      if (it != am.effects[i].modes.end() && it->second == Mode::Unknown) continue;
      v.violations.push_back({ga.schema, *k, Location::eff(static_cast<int>(i))});
    }
  };

  // only changes no positive-probability effect accounts for are violations;
  // an inconsistent verdict with zero violations signals a candidate new
  // effect list rather than a contradicted annotation
  for (auto [id, added] : changed)
    if (!explained(id, added)) push_violations(id);
  std::sort(v.violations.begin(), v.violations.end());
  v.violations.erase(std::unique(v.violations.begin(), v.violations.end()), v.violations.end());
  return v;
}

void mark_unknown(LearnedModel& m, const std::vector<Target>& violations) {
  if (violations.empty())
    throw ppddl::ValidationError("mark_unknown requires a nonempty violation list");
  for (const auto& t : violations) {
    Mode cur = m.mode(t);
    if (cur == Mode::Unknown && !m.dormant().count(t)) {
      m.enqueue(t);  // idempotent
      continue;
    }
    // a precondition violation comes from a visible execution, which is
    // direct evidence against the currently pinned sign
    if (t.loc.kind == LocKind::Precondition && (cur == Mode::Positive || cur == Mode::Negative))
      m.refute(t, cur);
    m.set_mode(t, Mode::Unknown);
    m.enqueue(t);
    if (t.loc.kind == LocKind::Effect) m.action_mut(t.action).prob_stale = true;
  }
  m.wake_dormant();
  m.bump_version();
}

double variational_distance(const LearnedModel& m1, const LearnedModel& m2,
                            const std::vector<Transition>& z, const ppddl::GroundSpace& space) {
  if (z.empty()) throw ppddl::ValidationError("variational distance needs a nonempty set");
  std::size_t diff = 0;
  for (const auto& t : z) {
    bool a = is_consistent(m1, t, space).consistent;
    bool b = is_consistent(m2, t, space).consistent;
    if (a != b) ++diff;
  }
  return static_cast<double>(diff) / static_cast<double>(z.size());
}

// ---------------------------------------------------------------------------
// Planning view
// ---------------------------------------------------------------------------

PlanningView::PlanningView(const LearnedModel& m, std::shared_ptr<const ppddl::GroundSpace> space,
                           bool incomplete_inapplicable)
    : space_(std::move(space)) {
  ops_.reserve(space_->actions.size());
  usable_.reserve(space_->actions.size());
  for (uint32_t i = 0; i < space_->actions.size(); ++i) {
    ops_.push_back(ground_action_model(m, i, *space_));
    const ActionModel& am = m.action(space_->actions[i].schema);
    usable_.push_back(!incomplete_inapplicable || am.complete());
  }
}

bool PlanningView::applicable(const ppddl::State& s, uint32_t action) const {
  return usable_[action] && ppddl::holds(s, ops_[action].pre);
}

std::vector<std::pair<ppddl::State, double>> PlanningView::successors(const ppddl::State& s,
                                                                      uint32_t action) const {
  if (!applicable(s, action)) return {{s, 1.0}};
  const ppddl::GroundOp& op = ops_[action];
  std::map<ppddl::State, double> agg;
  if (op.eff.empty()) {
    agg[s] = 1.0;
  } else {
    for (std::size_t i = 0; i < op.eff.size(); ++i) {
      double p = i < op.prob.size() ? op.prob[i] : 0.0;
      if (p <= 0.0) continue;
      agg[ppddl::apply_effect(s, op.eff[i])] += p;
    }
  }
  std::vector<std::pair<ppddl::State, double>> out(agg.begin(), agg.end());
  return out;
}

std::vector<Transition> enumerate_transitions(const LearnedModel& reference,
                                              const ppddl::GroundSpace& space,
                                              const ppddl::State& s0, std::size_t state_cap) {
  // ground ops under the reference model
  std::vector<ppddl::GroundOp> ops;
  for (uint32_t i = 0; i < space.actions.size(); ++i)
    ops.push_back(ground_action_model(reference, i, space));

  std::set<ppddl::State> reachable;
  std::deque<ppddl::State> frontier{s0};
  reachable.insert(s0);
  while (!frontier.empty() && reachable.size() < state_cap) {
    ppddl::State s = frontier.front();
    frontier.pop_front();
    for (const auto& op : ops) {
      if (!ppddl::holds(s, op.pre)) continue;
      for (std::size_t i = 0; i < op.eff.size(); ++i) {
        if (i < op.prob.size() && op.prob[i] <= 0.0) continue;
        ppddl::State s2 = ppddl::apply_effect(s, op.eff[i]);
        if (reachable.insert(s2).second) frontier.push_back(s2);
      }
    }
  }

  std::vector<Transition> z;
  for (const auto& s : reachable) {
    for (uint32_t a = 0; a < space.actions.size(); ++a) {
      std::set<ppddl::State> succs;
      succs.insert(s);  // the no-op transition
      if (ppddl::holds(s, ops[a].pre)) {
        for (std::size_t i = 0; i < ops[a].eff.size(); ++i) {
          if (i < ops[a].prob.size() && ops[a].prob[i] <= 0.0) continue;
          succs.insert(ppddl::apply_effect(s, ops[a].eff[i]));
        }
      }
      for (const auto& s2 : succs) z.push_back({s, a, s2});
    }
  }
  return z;
}

}  // namespace clap::model
