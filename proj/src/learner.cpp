#include "clap/learner.hpp"

#include <algorithm>
#include <random>

namespace clap::learner {

using model::LitKey;
using model::Mode;
using model::Target;

void EventLog::log(const std::string& kind, nlohmann::json fields) {
  fields["event"] = kind;
  events_.push_back(std::move(fields));
}

std::string EventLog::dump() const {
  std::string out;
  for (const auto& e : events_) {
    out += e.dump();
    out += '\n';
  }
  return out;
}

std::size_t EventLog::count(const std::string& kind) const {
  std::size_t n = 0;
  for (const auto& e : events_)
    if (e.value("event", "") == kind) ++n;
  return n;
}

Learner::Learner(model::LearnedModel m, LearnerConfig cfg) : model_(std::move(m)), cfg_(cfg) {}

namespace {

// lifted (del, add) sets of the state difference; nullopt when some changed
// atom mentions an object outside the action's binding
std::optional<std::pair<std::vector<LitKey>, std::vector<LitKey>>> lift_diff(
    const model::Transition& t, const ppddl::GroundSpace& space,
    const ppddl::ActionSchema& schema) {
  const ppddl::GroundAction& ga = space.actions[t.action];
  std::vector<LitKey> dels, adds;
  for (uint32_t id : t.s.atoms)
    if (!t.s2.contains(id)) {
      auto k = model::lift_atom(space.atoms[id], schema, ga);
      if (!k) return std::nullopt;
      dels.push_back(*k);
    }
  for (uint32_t id : t.s2.atoms)
    if (!t.s.contains(id)) {
      auto k = model::lift_atom(space.atoms[id], schema, ga);
      if (!k) return std::nullopt;
      adds.push_back(*k);
    }
  std::sort(dels.begin(), dels.end());
  std::sort(adds.begin(), adds.end());
  return std::make_pair(std::move(dels), std::move(adds));
}

bool unknown_in_effects(const model::ActionModel& am, const LitKey& k) {
  for (const auto& e : am.effects) {
    auto it = e.modes.find(k);
    if (it != e.modes.end() && it->second == Mode::Unknown) return true;
  }
  return false;
}

// everything a joint query compilation depends on: literal modes plus which
// effect lists count as possible (stale or positive probability)
std::string model_fingerprint(const model::LearnedModel& m) {
  std::string s;
  auto put_modes = [&s](const std::map<LitKey, Mode>& modes) {
    for (const auto& [k, md] : modes) {
      s += ppddl::to_string(k.atom());
      s += static_cast<char>('0' + static_cast<int>(md));
    }
  };
  for (const auto& [name, am] : m.actions()) {
    s += name;
    s += '{';
    put_modes(am.pre_modes);
    for (std::size_t i = 0; i < am.effects.size(); ++i) {
      s += '|';
      put_modes(am.effects[i].modes);
      s += (am.prob_stale || (i < am.prob.size() && am.prob[i] > 0.0)) ? '+' : '-';
    }
    s += '}';
  }
  return s;
}

nlohmann::json target_json(const Target& t) {
  return {{"action", t.action},
          {"literal", ppddl::to_string(t.lit.atom())},
          {"location", model::to_string(t.loc)}};
}

}  // namespace

model::ConsistencyVerdict Learner::handle_transition(const model::Transition& t,
                                                     const ppddl::GroundSpace& space) {
  auto verdict = model::is_consistent(model_, t, space);
  if (verdict.consistent) return verdict;

  const ppddl::GroundAction& ga = space.actions[t.action];
  const ppddl::ActionSchema* schema = model_.skeleton().find_action(ga.schema);
  ppddl::GroundOp op = model::ground_action_model(model_, t.action, space);

  if (!ppddl::holds(t.s, op.pre)) {
    // the action visibly executed although the model deems it inapplicable
    if (!verdict.violations.empty()) {
      nlohmann::json vios = nlohmann::json::array();
      for (const auto& v : verdict.violations) vios.push_back(target_json(v));
      log_.log("mark_unknown", {{"action", ga.schema}, {"violations", vios}});
      model::mark_unknown(model_, verdict.violations);
      // fresh evidence reopens the targets; give their duels full retries
      for (const auto& v : verdict.violations) aborts_.erase(v);
    }
    return verdict;
  }

  auto diff = lift_diff(t, space, *schema);
  if (!diff) {
    log_.log("unliftable_diff", {{"action", ga.name()}});
    return verdict;
  }
  const auto& [dels, adds] = *diff;
  const model::ActionModel& am = model_.action(ga.schema);

  // changes covered by a pending unknown literal are that query's business
  for (const auto& k : dels)
    if (unknown_in_effects(am, k)) return verdict;
  for (const auto& k : adds)
    if (unknown_in_effects(am, k)) return verdict;

  if (dels.empty() && adds.empty()) {
    // an unexpected no-op only proves a failure branch once the
    // preconditions are settled; earlier it may just be inapplicability
    for (const auto& [k, m] : am.pre_modes)
      if (m == Mode::Unknown) return verdict;
    model_.discover_effect_list(ga.schema, {}, {});
    log_.log("discover_effect", {{"action", ga.schema}, {"dels", 0}, {"adds", 0}});
    return verdict;
  }

  // an exact structural match means the transition landed on an effect the
  // estimates currently rule out: re-estimate instead of duplicating it
  for (std::size_t i = 0; i < am.effects.size(); ++i) {
    std::vector<LitKey> edels, eadds;
    for (const auto& [k, m] : am.effects[i].modes) {
      if (m == Mode::Negative) edels.push_back(k);
      if (m == Mode::Positive) eadds.push_back(k);
    }
    if (edels == dels && eadds == adds) {
      model::ActionModel& amm = model_.action_mut(ga.schema);
      if (!amm.prob_stale && amm.prob_weight > 0 && amm.prob.size() == amm.effects.size()) {
        // fold the observation into the running estimate: a full
        // re-estimation at small sample sizes keeps missing rare lists and
        // the restale would loop forever
        for (std::size_t j = 0; j < amm.prob.size(); ++j)
          amm.prob[j] = (amm.prob[j] * amm.prob_weight + (j == i ? 1.0 : 0.0)) /
                        (amm.prob_weight + 1.0);
        amm.prob_weight += 1.0;
        model_.bump_version();
        log_.log("probabilities_updated", {{"action", ga.schema}, {"effect", i}});
      } else {
        amm.prob_stale = true;
        model_.bump_version();
        log_.log("stale_probabilities", {{"action", ga.schema}, {"effect", i}});
      }
      return verdict;
    }
  }

  nlohmann::json jd = nlohmann::json::array(), ja = nlohmann::json::array();
  for (const auto& k : dels) jd.push_back(ppddl::to_string(k.atom()));
  for (const auto& k : adds) ja.push_back(ppddl::to_string(k.atom()));
  int idx = model_.discover_effect_list(ga.schema, dels, adds);
  log_.log("discover_effect",
           {{"action", ga.schema}, {"index", idx}, {"del", jd}, {"add", ja}});
  return verdict;
}

std::array<model::LearnedModel, 3> Learner::candidates(const model::LearnedModel& m,
                                                       const Target& t) {
  if (m.mode(t) != Mode::Unknown)
    throw ppddl::ValidationError("candidates: target " + model::to_string(t) + " is not unknown");
  std::array<model::LearnedModel, 3> out{m, m, m};
  out[0].set_mode(t, Mode::Positive);
  out[1].set_mode(t, Mode::Negative);
  out[2].set_mode(t, Mode::Absent);
  return out;
}

Learner::DuelResult Learner::duel(const Target& t, Mode ma, Mode mb, world::Simulator& sim) {
  auto cache_key = std::make_tuple(model_fingerprint(model_), sim.current(), t, ma, mb);
  if (no_query_cache_.count(cache_key)) return {DuelStatus::Unsolvable};
  model::LearnedModel a = model_, b = model_;
  a.set_mode(t, ma);
  b.set_mode(t, mb);
  fond::JointProblem jp(a, b, sim.space());
  auto solve_from_here = [&]() -> std::optional<fond::FondResult> {
    auto res = fond::solve_fond(jp, sim.current(), cfg_.fond_node_budget);
    const char* status = res.status == fond::FondStatus::Solved       ? "solved"
                         : res.status == fond::FondStatus::Unsolvable ? "unsolvable"
                                                                      : "budget";
    log_.log("query", {{"target", target_json(t)},
                       {"pair", model::to_string(ma) + " vs " + model::to_string(mb)},
                       {"status", status},
                       {"nodes", res.nodes_expanded}});
    if (res.status != fond::FondStatus::Solved) return std::nullopt;
    if (!fond::check_distinguishing(jp, res.policy, sim.current(), t)) {
      log_.log("query_not_distinguishing", {{"target", target_json(t)}});
      return std::nullopt;
    }
    return res;
  };
  auto first = solve_from_here();
  if (!first) {
    no_query_cache_.insert(std::move(cache_key));
    return {DuelStatus::Unsolvable};
  }
  fond::FondResult res = std::move(*first);

  fond::JointState js{sim.current(), sim.current()};
  int cap = std::max(cfg_.walk_length * 6, 120);
  // A lone decisive observation can be a not-yet-discovered outcome of the
  // surviving candidate, so elimination needs repeated confirmation.
  const int kConfirmStrikes = 3;
  const int kMaxReplans = 8;
  int strikes_a = 0, strikes_b = 0, replans = 0;
  // fairness evidence: repeatedly observing only shared outcomes while one
  // candidate predicts a strict superset of next states condemns the
  // superset candidate (its extra outcomes should have fired by now)
  const int kFairnessTrials = 40;
  int against_a = 0, against_b = 0;
  for (int step = 0; step < cap; ++step) {
    if (!res.policy.defined(js)) {
      // the execution drifted off the planned states: re-query from here,
      // falling back to an episode reset when stuck in an absorbing state
      if (++replans > kMaxReplans) return {DuelStatus::Aborted};
      auto again = solve_from_here();
      if (!again && sim.goal_reached(sim.current())) {
        sim.reset();
        again = solve_from_here();
      }
      if (!again) return {DuelStatus::Aborted};
      res = std::move(*again);
      js = {sim.current(), sim.current()};
      if (!res.policy.defined(js)) return {DuelStatus::Aborted};
    }
    uint32_t act = res.policy.choice.at(js);
    ppddl::State sprev = sim.current();
    ppddl::State sobs = sim.step(act);
    auto outs = jp.outcomes(js, act);
    bool sa = false, sb = false;
    const fond::JointOutcome* both = nullptr;
    std::set<ppddl::State> p1, p2;
    for (const auto& o : outs) {
      p1.insert(o.next.s1);
      p2.insert(o.next.s2);
      bool m1 = o.next.s1 == sobs, m2 = o.next.s2 == sobs;
      sa = sa || m1;
      sb = sb || m2;
      if (m1 && m2) both = &o;
    }
    if (sa && sb && p1 != p2) {
      if (std::includes(p2.begin(), p2.end(), p1.begin(), p1.end())) ++against_b;
      else if (std::includes(p1.begin(), p1.end(), p2.begin(), p2.end())) ++against_a;
      if (against_b >= kFairnessTrials) {
        log_.log("candidate_eliminated", {{"target", target_json(t)},
                                          {"loser", model::to_string(mb)},
                                          {"reason", "fairness"}});
        return {DuelStatus::Solved, ma};
      }
      if (against_a >= kFairnessTrials) {
        log_.log("candidate_eliminated", {{"target", target_json(t)},
                                          {"loser", model::to_string(ma)},
                                          {"reason", "fairness"}});
        return {DuelStatus::Solved, mb};
      }
    }
    if (sa && !sb) {
      if (++strikes_b >= kConfirmStrikes) {
        log_.log("candidate_eliminated",
                 {{"target", target_json(t)}, {"loser", model::to_string(mb)}});
        return {DuelStatus::Solved, ma};
      }
      js = {sobs, sobs};
      continue;
    }
    if (sb && !sa) {
      if (++strikes_a >= kConfirmStrikes) {
        log_.log("candidate_eliminated",
                 {{"target", target_json(t)}, {"loser", model::to_string(ma)}});
        return {DuelStatus::Solved, mb};
      }
      js = {sobs, sobs};
      continue;
    }
    if (both) {
      js = both->next;
      continue;
    }
    if (sa && sb) {
      js = {sobs, sobs};
      continue;
    }
    // neither candidate explains the observation: the base model is wrong
    // somewhere else, update it and retry the target later
    log_.log("mid_resolution_inconsistency", {{"target", target_json(t)}});
    handle_transition({sprev, act, sobs}, *sim.space());
    return {DuelStatus::Aborted};
  }
  return {DuelStatus::Aborted};
}

bool Learner::resolve(const Target& t, world::Simulator& sim) {
  std::vector<Mode> alive{Mode::Positive, Mode::Absent, Mode::Negative};
  for (Mode rm : model_.refuted(t))
    alive.erase(std::remove(alive.begin(), alive.end(), rm), alive.end());
  Mode before = model_.mode(t);
  if (before != Mode::Unknown) model_.set_mode(t, Mode::Unknown);
  // a precondition change invalidates probabilities estimated under the old
  // applicability region
  auto restale_on_change = [&](Mode chosen) {
    if (chosen == before) return;
    mode_changed_ = true;
    if (t.loc.kind != model::LocKind::Precondition) return;
    model::ActionModel& am = model_.action_mut(t.action);
    if (!am.prob_stale && !am.effects.empty()) {
      am.prob_stale = true;
      model_.bump_version();
      log_.log("stale_probabilities", {{"action", t.action}, {"cause", "precondition"}});
    }
  };

  const std::pair<Mode, Mode> pairs[] = {{Mode::Positive, Mode::Absent},
                                         {Mode::Negative, Mode::Absent},
                                         {Mode::Positive, Mode::Negative}};
  for (const auto& [ma, mb] : pairs) {
    if (alive.size() == 1) break;
    if (std::find(alive.begin(), alive.end(), ma) == alive.end()) continue;
    if (std::find(alive.begin(), alive.end(), mb) == alive.end()) continue;
    auto r = duel(t, ma, mb, sim);
    if (r.status == DuelStatus::Aborted) {
      // one retry from a fresh queue pass; after that the target is parked
      // dormant so repeated hopeless executions cannot drain the step budget
      constexpr int kMaxConsecutiveAborts = 2;
      if (++aborts_[t] < kMaxConsecutiveAborts) {
        // keep the previous mode while the retry is pending; leaving the
        // target Unknown would make the eventual re-park look like a mode
        // change and restale the action's probabilities for nothing
        if (before != Mode::Unknown) model_.set_mode(t, before);
        model_.enqueue(t);
        return false;
      }
      break;
    }
    if (r.status == DuelStatus::Solved) {
      aborts_.erase(t);
      Mode loser = r.winner == ma ? mb : ma;
      alive.erase(std::remove(alive.begin(), alive.end(), loser), alive.end());
    }
  }

  if (alive.size() == 1) {
    aborts_.erase(t);
    model_.set_mode(t, alive.front());
    model_.remove_from_queue(t);
    restale_on_change(alive.front());
    log_.log("literal_fixed",
             {{"target", target_json(t)}, {"mode", model::to_string(alive.front())}});
    return true;
  }
  // not fully distinguishable from here: park with a provisional mode
  Mode provisional =
      std::find(alive.begin(), alive.end(), Mode::Absent) != alive.end() ? Mode::Absent
                                                                         : alive.front();
  model_.set_mode(t, provisional);
  model_.mark_dormant(t);
  restale_on_change(provisional);
  log_.log("target_dormant",
           {{"target", target_json(t)}, {"provisional", model::to_string(provisional)}});
  return false;
}

void Learner::estimate_probabilities(const std::string& action, world::Simulator& sim) {
  {
    const model::ActionModel& am = model_.action(action);
    if (am.effects.empty() || am.has_unknown_effect_literal()) return;
  }
  const ppddl::GroundSpace& space = *sim.space();
  std::mt19937_64 walk_rng(sim.seed() ^ 0x9e3779b97f4a7c15ull);

  std::size_t n_effects = model_.action(action).effects.size();
  std::vector<uint64_t> counts(n_effects, 0);
  uint64_t samples = 0;
  uint64_t version = model_.version();

  auto find_instance = [&](const ppddl::State& s, bool require_distinct)
      -> std::optional<std::pair<uint32_t, ppddl::GroundOp>> {
    // uniform over the applicable instances so one ground binding cannot
    // monopolize the sample
    std::vector<std::pair<uint32_t, ppddl::GroundOp>> usable;
    for (uint32_t i = 0; i < space.actions.size(); ++i) {
      if (space.actions[i].schema != action) continue;
      ppddl::GroundOp op = model::ground_action_model(model_, i, space);
      if (!ppddl::holds(s, op.pre)) continue;
      if (require_distinct) {
        std::vector<ppddl::State> succ;
        for (const auto& e : op.eff) succ.push_back(ppddl::apply_effect(s, e));
        std::sort(succ.begin(), succ.end());
        if (std::adjacent_find(succ.begin(), succ.end()) != succ.end()) continue;
      }
      usable.emplace_back(i, std::move(op));
    }
    if (usable.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
    return std::move(usable[pick(walk_rng)]);
  };

  int phase1 = cfg_.eta * 20 + 40;
  int phase2 = phase1 + cfg_.eta * 10 + 20;
  int barren = 0;  // roam steps since the action was last applicable
  for (int step = 0; step < phase2 && samples < static_cast<uint64_t>(cfg_.eta); ++step) {
    if (sim.goal_reached(sim.current())) sim.reset();
    // a long barren roam means this region cannot reach an applicable
    // state (e.g. an absorbing trap); start a fresh episode
    if (barren >= cfg_.walk_length) {
      sim.reset();
      barren = 0;
    }
    ppddl::State s = sim.current();
    auto inst = find_instance(s, step < phase1);
    if (inst) {
      barren = 0;
      ppddl::State sobs = sim.step(inst->first);
      const auto& op = inst->second;
      int matched = -1;
      for (std::size_t i = 0; i < op.eff.size(); ++i)
        if (ppddl::apply_effect(s, op.eff[i]) == sobs) {
          matched = static_cast<int>(i);
          break;
        }
      if (matched < 0) {
        handle_transition({s, inst->first, sobs}, space);
        return;  // structure changed under us; retry on the next invocation
      }
      ++counts[matched];
      ++samples;
    } else {
      ++barren;
      // roam to reach an applicable state
      std::uniform_int_distribution<uint32_t> pick(0,
                                                   static_cast<uint32_t>(space.actions.size()) - 1);
      uint32_t a = pick(walk_rng);
      ppddl::State sobs = sim.step(a);
      handle_transition({s, a, sobs}, space);
      if (model_.version() != version) {
        if (model_.action(action).effects.size() != n_effects ||
            model_.action(action).has_unknown_effect_literal())
          return;
        version = model_.version();
      }
    }
  }

  model::ActionModel& am = model_.action_mut(action);
  if (samples == 0) {
    model_.set_deferred(action, true);
    log_.log("estimation_deferred", {{"action", action}});
    return;
  }
  am.prob.assign(am.effects.size(), 0.0);
  for (std::size_t i = 0; i < counts.size() && i < am.prob.size(); ++i)
    am.prob[i] = static_cast<double>(counts[i]) / static_cast<double>(samples);
  am.prob_stale = false;
  am.prob_weight = static_cast<double>(samples);
  model_.bump_version();
  log_.log("probabilities_estimated",
           {{"action", action}, {"samples", samples}, {"prob", am.prob}});
}

bool Learner::estimation_pending(const model::ActionModel& am, const std::string& name) const {
  return am.prob_stale && !am.effects.empty() && !am.has_unknown_effect_literal() &&
         !model_.deferred(name);
}

bool Learner::needs_learning() const {
  if (!model_.queue_empty()) return true;
  for (const auto& [name, am] : model_.actions())
    if (estimation_pending(am, name)) return true;
  return false;
}

int Learner::explore(world::Simulator& sim, int steps, std::mt19937_64& rng) {
  const ppddl::GroundSpace& space = *sim.space();
  std::uniform_int_distribution<uint32_t> pick(0,
                                               static_cast<uint32_t>(space.actions.size()) - 1);
  int inconsistent = 0;
  for (int i = 0; i < steps; ++i) {
    if (sim.goal_reached(sim.current())) sim.reset();
    ppddl::State s = sim.current();
    uint32_t a = pick(rng);
    ppddl::State sobs = sim.step(a);
    if (!handle_transition({s, a, sobs}, space).consistent) ++inconsistent;
  }
  return inconsistent;
}

namespace {
// drain the unknown queue, then refresh any estimable probabilities
void learn_pass(Learner& self, model::LearnedModel& m, world::Simulator& sim) {
  std::size_t guard = m.unknown_queue().size() * 6 + 64;
  while (auto t = m.pop_target()) {
    self.resolve(*t, sim);
    if (--guard == 0) break;
  }
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::string> pending;
    for (const auto& [name, am] : m.actions())
      if (am.prob_stale && !am.effects.empty() && !am.has_unknown_effect_literal() &&
          !m.deferred(name))
        pending.push_back(name);
    if (pending.empty()) break;
    for (const auto& name : pending) self.estimate_probabilities(name, sim);
  }
}
}  // namespace

void Learner::learn(world::Simulator& sim) {
  if (!cfg_.comprehensive) {
    if (!needs_learning()) return;
    ++invocations_;
    log_.log("learn", {{"comprehensive", false}, {"version", model_.version()}});
    // deferred estimations get a fresh chance on every invocation
    for (const auto& [name, am] : model_.actions()) model_.set_deferred(name, false);
    // Resolutions can change preconditions other duels depended on; parked
    // targets may have become distinguishable. Iterate to a mode fixpoint.
    constexpr int kNeedRounds = 6;
    for (int round = 0; round < kNeedRounds; ++round) {
      mode_changed_ = false;
      learn_pass(*this, model_, sim);
      if (!mode_changed_) break;
      if (!model_.dormant().empty()) model_.wake_dormant();
      else if (model_.queue_empty() && !needs_learning()) break;
    }
    return;
  }
  relearn_comprehensive(sim);
}

// comprehensive relearning: wipe everything and run active learning to
// quiescence, gathering fresh data by random walks between passes
void Learner::relearn_comprehensive(world::Simulator& sim) {
  ++invocations_;
  log_.log("learn", {{"comprehensive", true}, {"version", model_.version()}});
  model_.clear_all();
  aborts_.clear();
  log_.log("clear_all");
  std::mt19937_64 rng(sim.seed() ^ 0xa5a5a5a5deadbeefull ^ sim.steps_used());
  constexpr int kMaxRounds = 100;
  for (int round = 0; round < kMaxRounds; ++round) {
    mode_changed_ = false;
    learn_pass(*this, model_, sim);
    if (mode_changed_ && !model_.dormant().empty()) {
      model_.wake_dormant();
      continue;
    }
    if (!needs_learning() && model_.dormant().empty()) break;
    uint64_t v = model_.version();
    explore(sim, cfg_.walk_length, rng);
    if (model_.version() == v && model_.queue_empty() && !needs_learning()) break;
  }
}

}  // namespace clap::learner
