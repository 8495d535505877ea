#include "clap/bench.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "clap/baselines.hpp"
#include "clap/learner.hpp"
#include "clap/loop.hpp"
#include "clap/model.hpp"

namespace clap::bench {

nlohmann::json MutationSpec::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["action"] = action;
  auto& je = j["edits"] = nlohmann::json::array();
  for (const auto& e : edits)
    je.push_back({{"kind", e.kind}, {"where", e.where}, {"literal", e.literal}});
  return j;
}

namespace {

ppddl::Atom key_atom(const model::LitKey& k) { return k.atom(); }

// pick a uniformly random element
template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

bool contains_atom(const std::vector<ppddl::Atom>& v, const ppddl::Atom& a) {
  return std::find(v.begin(), v.end(), a) != v.end();
}

// rebinding one argument to another type-compatible parameter
std::optional<ppddl::Atom> rebind(const ppddl::Atom& atom, const ppddl::ActionSchema& schema,
                                  const ppddl::LiftedDomain& d, std::mt19937_64& rng) {
  const ppddl::PredicateSchema* p = d.find_predicate(atom.pred);
  if (!p || atom.args.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> di(0, atom.args.size() - 1);
  std::size_t slot = di(rng);
  std::vector<std::string> options;
  for (const auto& ap : schema.params)
    if (ap.name != atom.args[slot] && d.types.is_subtype(ap.type, p->params[slot].type))
      options.push_back(ap.name);
  if (options.empty()) return std::nullopt;
  ppddl::Atom out = atom;
  out.args[slot] = pick(options, rng);
  return out;
}

}  // namespace

std::pair<ppddl::LiftedDomain, MutationSpec> mutate_domain(const ppddl::LiftedDomain& domain,
                                                           std::mt19937_64& rng) {
  if (domain.actions.empty()) throw ppddl::ValidationError("mutate_domain: no actions");
  for (int attempt = 0; attempt < 200; ++attempt) {
    ppddl::LiftedDomain d = domain;
    std::uniform_int_distribution<std::size_t> da(0, d.actions.size() - 1);
    ppddl::ActionSchema& a = d.actions[da(rng)];
    MutationSpec spec;
    spec.action = a.name;
    auto universe = model::literal_universe(d, a.params);
    if (universe.empty()) continue;

    std::uniform_int_distribution<int> dn(0, 3);
    int n_pre = dn(rng), n_eff = dn(rng);
    if (n_pre + n_eff == 0) continue;
    std::uniform_int_distribution<int> dk(0, 2);

    for (int e = 0; e < n_pre; ++e) {
      int kind = dk(rng);
      if ((kind == 1 || kind == 2) && a.pre.empty()) kind = 0;
      if (kind == 0) {  // add
        std::vector<ppddl::Literal> cands;
        for (const auto& k : universe) {
          ppddl::Atom at = key_atom(k);
          bool used = false;
          for (const auto& l : a.pre)
            if (l.atom == at) used = true;
          if (used) continue;
          cands.push_back({at, true});
          cands.push_back({at, false});
        }
        if (cands.empty()) continue;
        ppddl::Literal l = pick(cands, rng);
        a.pre.push_back(l);
        spec.edits.push_back({"add", "pre", (l.positive ? "" : "!") + ppddl::to_string(l.atom)});
      } else if (kind == 1) {  // delete
        std::uniform_int_distribution<std::size_t> di(0, a.pre.size() - 1);
        std::size_t i = di(rng);
        spec.edits.push_back(
            {"delete", "pre",
             (a.pre[i].positive ? "" : "!") + ppddl::to_string(a.pre[i].atom)});
        a.pre.erase(a.pre.begin() + static_cast<long>(i));
      } else {  // modify: re-sign or rebind
        std::uniform_int_distribution<std::size_t> di(0, a.pre.size() - 1);
        ppddl::Literal& l = a.pre[di(rng)];
        std::string before = (l.positive ? "" : "!") + ppddl::to_string(l.atom);
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
          l.positive = !l.positive;
        } else if (auto r = rebind(l.atom, a, d, rng)) {
          l.atom = *r;
        } else {
          l.positive = !l.positive;
        }
        spec.edits.push_back({"modify", "pre", before});
      }
    }

    for (int e = 0; e < n_eff && !a.eff.empty(); ++e) {
      std::uniform_int_distribution<std::size_t> dl(0, a.eff.size() - 1);
      std::size_t li = dl(rng);
      ppddl::Effect& eff = a.eff[li];
      std::string where = "eff[" + std::to_string(li) + "]";
      int kind = dk(rng);
      bool has_atoms = !eff.add.empty() || !eff.del.empty();
      if ((kind == 1 || kind == 2) && !has_atoms) kind = 0;
      if (kind == 0) {  // add an atom to the add or delete set
        std::vector<ppddl::Atom> cands;
        for (const auto& k : universe) {
          ppddl::Atom at = key_atom(k);
          if (!contains_atom(eff.add, at) && !contains_atom(eff.del, at)) cands.push_back(at);
        }
        if (cands.empty()) continue;
        ppddl::Atom at = pick(cands, rng);
        bool to_add = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
        (to_add ? eff.add : eff.del).push_back(at);
        spec.edits.push_back({"add", where, (to_add ? "" : "!") + ppddl::to_string(at)});
      } else if (kind == 1) {  // delete an atom
        std::vector<std::pair<bool, std::size_t>> slots;
        for (std::size_t i = 0; i < eff.add.size(); ++i) slots.push_back({true, i});
        for (std::size_t i = 0; i < eff.del.size(); ++i) slots.push_back({false, i});
        auto [in_add, i] = pick(slots, rng);
        auto& v = in_add ? eff.add : eff.del;
        spec.edits.push_back({"delete", where, (in_add ? "" : "!") + ppddl::to_string(v[i])});
        v.erase(v.begin() + static_cast<long>(i));
      } else {  // modify: move between sets or rebind
        std::vector<std::pair<bool, std::size_t>> slots;
        for (std::size_t i = 0; i < eff.add.size(); ++i) slots.push_back({true, i});
        for (std::size_t i = 0; i < eff.del.size(); ++i) slots.push_back({false, i});
        auto [in_add, i] = pick(slots, rng);
        auto& from = in_add ? eff.add : eff.del;
        auto& to = in_add ? eff.del : eff.add;
        ppddl::Atom at = from[i];
        std::string before = (in_add ? "" : "!") + ppddl::to_string(at);
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
          if (contains_atom(to, at)) continue;
          from.erase(from.begin() + static_cast<long>(i));
          to.push_back(at);
        } else {
          auto r = rebind(at, a, d, rng);
          if (!r || contains_atom(eff.add, *r) || contains_atom(eff.del, *r)) continue;
          from[i] = *r;
        }
        spec.edits.push_back({"modify", where, before});
      }
    }

    if (spec.edits.empty()) continue;
    try {
      a.normalize();
      d.validate();
    } catch (const std::exception&) {
      continue;  // the sampled edit combination broke the schema; resample
    }
    return {std::move(d), std::move(spec)};
  }
  throw ppddl::ValidationError("mutate_domain: no valid mutation found");
}

std::vector<ppddl::TaskSpec> generate_tasks(const ppddl::LiftedDomain& domain,
                                            const ppddl::TaskSpec& base, int count,
                                            std::mt19937_64& rng, int depth) {
  std::vector<ppddl::TaskSpec> out{base};
  if (count <= 1) return out;

  ppddl::GroundSpace space = ppddl::ground(domain, base.objects);
  auto ops = ppddl::ground_operators(domain, space);
  constexpr std::size_t kCap = 20000;

  auto bfs = [&](const ppddl::State& s0) {
    std::map<ppddl::State, int> depth_of{{s0, 0}};
    std::deque<ppddl::State> work{s0};
    while (!work.empty() && depth_of.size() < kCap) {
      ppddl::State s = work.front();
      work.pop_front();
      for (const auto& op : ops) {
        if (!ppddl::holds(s, op.pre)) continue;
        for (std::size_t i = 0; i < op.eff.size(); ++i) {
          if (i < op.prob.size() && op.prob[i] <= 0.0) continue;
          ppddl::State s2 = ppddl::apply_effect(s, op.eff[i]);
          if (depth_of.emplace(s2, depth_of.at(s) + 1).second) work.push_back(s2);
        }
      }
    }
    return depth_of;
  };

  auto base_reach = bfs(space.state_of(base.init));
  std::vector<ppddl::State> pool;
  for (const auto& [s, d] : base_reach) pool.push_back(s);

  for (int i = 1; i < count; ++i) {
    bool made = false;
    for (int attempt = 0; attempt < 50 && !made; ++attempt) {
      ppddl::State init = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      auto reach = bfs(init);
      int maxd = 0;
      for (const auto& [s, d] : reach) maxd = std::max(maxd, d);
      int want = std::min(depth, maxd);
      std::vector<ppddl::State> goals;
      for (const auto& [s, d] : reach)
        if (d >= want && !(s == init)) goals.push_back(s);
      if (goals.empty()) continue;
      ppddl::State g = goals[std::uniform_int_distribution<std::size_t>(0, goals.size() - 1)(rng)];

      ppddl::TaskSpec t = base;
      t.name = base.name + "-g" + std::to_string(i);
      t.init = space.atoms_of(init);
      t.goal.exists.clear();
      t.goal.literals.clear();
      for (const auto& at : space.atoms_of(g)) t.goal.literals.push_back({at, true});
      const ppddl::TaskSpec& prev = out.back();
      if (t.init == prev.init && t.goal == prev.goal) continue;
      out.push_back(std::move(t));
      made = true;
    }
    if (!made) break;  // frontier exhausted: fewer tasks than requested
  }
  return out;
}

double adaptive_delay(const std::vector<metrics::EvalPoint>& evals,
                      const std::vector<double>& oracle_mean,
                      const std::vector<double>& oracle_std) {
  if (evals.empty() || oracle_mean.empty())
    throw ppddl::ValidationError("adaptive_delay: empty series");
  std::size_t n = std::min({evals.size(), oracle_mean.size(), oracle_std.size()});
  std::size_t first_ok = n;  // index from which everything stays in band
  for (std::size_t i = n; i-- > 0;) {
    double band = 2.0 * oracle_std[i] + 1e-9;
    if (std::fabs(evals[i].avg_reward - oracle_mean[i]) <= band)
      first_ok = i;
    else
      break;
  }
  if (first_ok == n) return std::numeric_limits<double>::infinity();
  return static_cast<double>(evals[first_ok].step);
}

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      while (!item.empty() && item.front() == ' ') item.erase(item.begin());
      while (!item.empty() && item.back() == ' ') item.pop_back();
      if (!item.empty()) out.push_back(item);
    }
    return out;
  };
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (!blank)
        throw ppddl::ValidationError("manifest line " + std::to_string(lineno) +
                                     ": expected key=value");
      continue;
    }
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    };
    trim(key);
    trim(val);
    if (key == "domain") m.domain = val;
    else if (key == "problem") m.problem = val;
    else if (key == "tasks") m.tasks = std::stoi(val);
    else if (key == "budget") m.budget = std::stoull(val);
    else if (key == "methods") m.methods = split(val);
    else if (key == "seeds") {
      m.seeds.clear();
      for (const auto& s : split(val)) m.seeds.push_back(std::stoull(s));
    } else if (key == "eta") m.eta = std::stoi(val);
    else if (key == "beta") m.beta = std::stoi(val);
    else if (key == "theta") m.theta = std::stod(val);
    else if (key == "gamma") m.gamma = std::stod(val);
    else if (key == "horizon") m.horizon = std::stoi(val);
    else if (key == "eval_every") m.eval_every = std::stoull(val);
    else if (key == "eval_traces") m.eval_traces = std::stoi(val);
    else if (key == "mutation_seed") m.mutation_seed = std::stoull(val);
    else if (key == "bfs_depth") m.bfs_depth = std::stoi(val);
    else if (key == "out") m.out = val;
    else if (key == "task_domains") m.task_domains = split(val);
    else
      throw ppddl::ValidationError("manifest line " + std::to_string(lineno) +
                                   ": unknown key '" + key + "'");
  }
  if (m.domain.empty() || m.problem.empty())
    throw ppddl::ValidationError("manifest: domain and problem are required");
  if (m.methods.empty()) m.methods = {"clap"};
  if (m.seeds.empty()) m.seeds = {0};
  return m;
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ppddl::ValidationError("cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void write_metrics(const std::vector<metrics::RunMetrics>& runs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ppddl::ValidationError("cannot write " + path);
  for (const auto& r : runs) out << r.to_json().dump() << "\n";
}

std::vector<metrics::RunMetrics> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ppddl::ValidationError("cannot open " + path);
  std::vector<metrics::RunMetrics> runs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    runs.push_back(metrics::RunMetrics::from_json(nlohmann::json::parse(line)));
  }
  return runs;
}

namespace {

uint64_t run_seed_mix(int task_index, uint64_t seed) {
  return loop::eval_seed("run", static_cast<uint64_t>(task_index) * 7919 + 13, seed);
}

uint64_t goals_at(const metrics::RunMetrics& r, uint64_t step) {
  uint64_t g = 0;
  for (const auto& p : r.goals)
    if (p.step <= step) g = p.goals;
  return g;
}

}  // namespace

ExperimentResult run_experiment(const Manifest& mf) {
  ppddl::LiftedDomain base_domain = ppddl::parse_domain_file(mf.domain);
  ppddl::TaskSpec base_task = ppddl::parse_problem_file(mf.problem, base_domain);
  base_task.horizon = mf.horizon;
  base_task.gamma = mf.gamma;

  // per-task hidden domains: explicit list or a mutation chain
  std::vector<ppddl::LiftedDomain> doms;
  std::vector<ppddl::TaskSpec> tasks;
  std::mt19937_64 mrng(mf.mutation_seed);
  if (!mf.task_domains.empty()) {
    if (static_cast<int>(mf.task_domains.size()) != mf.tasks)
      throw ppddl::ValidationError("manifest: task_domains must list one file per task");
    for (const auto& p : mf.task_domains) doms.push_back(ppddl::parse_domain_file(p));
    for (int i = 0; i < mf.tasks; ++i) {
      ppddl::TaskSpec t = base_task;
      t.name = base_task.name + "-t" + std::to_string(i);
      tasks.push_back(t);
    }
  } else {
    doms.push_back(base_domain);
    for (int i = 1; i < mf.tasks; ++i) doms.push_back(mutate_domain(doms.back(), mrng).first);
    for (int i = 0; i < mf.tasks; ++i) {
      auto gen = generate_tasks(doms[i], base_task, i == 0 ? 1 : 2, mrng, mf.bfs_depth);
      ppddl::TaskSpec t = gen.back();
      t.name = base_task.name + "-t" + std::to_string(i);
      tasks.push_back(t);
    }
  }

  ExperimentResult result;
  for (const auto& method : mf.methods) {
    for (uint64_t seed : mf.seeds) {
      try {
        if (method == "qlearning") {
          for (int i = 0; i < mf.tasks; ++i) {
            world::Simulator sim(doms[i], tasks[i], mf.budget, run_seed_mix(i, seed));
            baselines::QConfig qc;
            qc.gamma = mf.gamma;
            qc.horizon = mf.horizon;
            qc.eval_every = mf.eval_every;
            qc.eval_traces = mf.eval_traces;
            qc.seed = seed;
            auto r = qlearning_run(sim, qc);
            r.task = tasks[i].name;
            result.runs.push_back(std::move(r));
          }
        } else if (method == "oracle") {
          for (int i = 0; i < mf.tasks; ++i) {
            world::Simulator sim(doms[i], tasks[i], mf.budget, run_seed_mix(i, seed));
            loop::ClapConfig cc;
            cc.horizon = mf.horizon;
            cc.gamma = mf.gamma;
            cc.eval_every = mf.eval_every;
            cc.eval_traces = mf.eval_traces;
            cc.seed = seed;
            auto r = baselines::oracle_run(sim, doms[i], cc);
            r.task = tasks[i].name;
            result.runs.push_back(std::move(r));
          }
        } else if (method == "clap" || method == "comprehensive") {
          learner::LearnerConfig lc;
          lc.eta = mf.eta;
          lc.walk_length = mf.horizon;
          lc.comprehensive = method == "comprehensive";
          learner::Learner ln(model::LearnedModel::empty_for(doms[0]), lc);
          monitor::Monitor mon({mf.theta, 100});
          for (int i = 0; i < mf.tasks; ++i) {
            world::Simulator sim(doms[i], tasks[i], mf.budget, run_seed_mix(i, seed));
            mon.reset_all();
            loop::ClapConfig cc;
            cc.horizon = mf.horizon;
            cc.beta = mf.beta;
            cc.theta = mf.theta;
            cc.gamma = mf.gamma;
            cc.eta = mf.eta;
            cc.walk_length = mf.horizon;
            cc.seed = seed;
            cc.eval_every = mf.eval_every;
            cc.eval_traces = mf.eval_traces;
            cc.gof_enabled = method == "clap";
            cc.comprehensive = method == "comprehensive";
            auto r = loop::run_task(sim, ln, mon, cc);
            r.method = method;
            r.task = tasks[i].name;
            r.seed = seed;
            result.runs.push_back(std::move(r));
          }
        } else {
          throw ppddl::ValidationError("unknown method '" + method + "'");
        }
      } catch (const std::exception& e) {
        // isolate per-run failures; the aggregate still gets produced
        metrics::RunMetrics r;
        r.method = method;
        r.seed = seed;
        r.task = "(failed)";
        r.events.push_back({{"event", "run_failed"}, {"error", e.what()}});
        result.runs.push_back(std::move(r));
      }
    }
  }

  // adaptive delay against the oracle batch, per task and eval index
  std::map<std::string, std::vector<std::vector<double>>> oracle_by_task;
  for (const auto& r : result.runs) {
    if (r.method != "oracle") continue;
    auto& cols = oracle_by_task[r.task];
    if (cols.size() < r.evals.size()) cols.resize(r.evals.size());
    for (std::size_t i = 0; i < r.evals.size(); ++i) cols[i].push_back(r.evals[i].avg_reward);
  }
  for (auto& r : result.runs) {
    auto it = oracle_by_task.find(r.task);
    if (it == oracle_by_task.end() || r.evals.empty()) continue;
    std::vector<double> mean, sd;
    for (const auto& col : it->second) {
      double mu = 0.0;
      for (double v : col) mu += v;
      mu /= col.size();
      double var = 0.0;
      for (double v : col) var += (v - mu) * (v - mu);
      mean.push_back(mu);
      sd.push_back(std::sqrt(var / col.size()));
    }
    r.adaptive_delay = adaptive_delay(r.evals, mean, sd);
  }

  std::filesystem::create_directories(mf.out);
  write_metrics(result.runs, mf.out + "/metrics.jsonl");
  report(result.runs, mf.out + "/aggregate.csv");
  plot(result.runs, mf.out + "/curves.svg");
  return result;
}

void report(const std::vector<metrics::RunMetrics>& runs, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw ppddl::ValidationError("cannot write " + csv_path);
  out << "method,task,step,n,mean_reward,std_reward,mean_goals,std_goals\n";

  std::map<std::pair<std::string, std::string>, std::vector<const metrics::RunMetrics*>> groups;
  for (const auto& r : runs) groups[{r.method, r.task}].push_back(&r);
  for (const auto& [key, members] : groups) {
    std::set<uint64_t> steps;
    for (const auto* r : members)
      for (const auto& e : r->evals) steps.insert(e.step);
    for (uint64_t step : steps) {
      std::vector<double> rewards, goals;
      for (const auto* r : members) {
        for (const auto& e : r->evals)
          if (e.step == step) rewards.push_back(e.avg_reward);
        goals.push_back(static_cast<double>(goals_at(*r, step)));
      }
      auto stats = [](const std::vector<double>& v) {
        double mu = 0.0;
        for (double x : v) mu += x;
        mu /= v.empty() ? 1 : v.size();
        double var = 0.0;
        for (double x : v) var += (x - mu) * (x - mu);
        return std::make_pair(mu, v.empty() ? 0.0 : std::sqrt(var / v.size()));
      };
      auto [mr, sr] = stats(rewards);
      auto [mg, sg] = stats(goals);
      out << key.first << "," << key.second << "," << step << "," << rewards.size() << "," << mr
          << "," << sr << "," << mg << "," << sg << "\n";
    }
  }
}

void plot(const std::vector<metrics::RunMetrics>& runs, const std::string& svg_path) {
  // average reward and cumulative goals per method, tasks laid end to end
  std::map<std::string, std::map<uint64_t, std::vector<double>>> reward, goals;
  std::map<std::string, uint64_t> task_offset;
  uint64_t span = 0;
  {
    std::set<std::string> tasks;
    for (const auto& r : runs) tasks.insert(r.task);
    uint64_t per_task = 0;
    for (const auto& r : runs) per_task = std::max(per_task, r.steps_used);
    per_task = std::max<uint64_t>(per_task, 1);
    uint64_t off = 0;
    for (const auto& t : tasks) {
      task_offset[t] = off;
      off += per_task;
    }
    span = std::max<uint64_t>(off, 1);
  }
  for (const auto& r : runs) {
    uint64_t off = task_offset[r.task];
    for (const auto& e : r.evals) {
      reward[r.method][off + e.step].push_back(e.avg_reward);
      goals[r.method][off + e.step].push_back(static_cast<double>(goals_at(r, e.step)));
    }
  }

  const int W = 900, H = 320, pad = 50;
  const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ofstream out(svg_path);
  if (!out) throw ppddl::ValidationError("cannot write " + svg_path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << 2 * H
      << "'>\n";

  auto panel = [&](const std::map<std::string, std::map<uint64_t, std::vector<double>>>& series,
                   int top, const std::string& title) {
    double lo = 1e300, hi = -1e300;
    for (const auto& [method, pts] : series)
      for (const auto& [x, ys] : pts)
        for (double y : ys) {
          lo = std::min(lo, y);
          hi = std::max(hi, y);
        }
    if (lo > hi) {
      lo = 0;
      hi = 1;
    }
    if (hi - lo < 1e-12) hi = lo + 1;
    auto sx = [&](uint64_t x) {
      return pad + (W - 2.0 * pad) * static_cast<double>(x) / static_cast<double>(span);
    };
    auto sy = [&](double y) { return top + H - pad - (H - 2.0 * pad) * (y - lo) / (hi - lo); };
    out << "<rect x='" << pad << "' y='" << top + pad << "' width='" << W - 2 * pad
        << "' height='" << H - 2 * pad << "' fill='none' stroke='#999'/>\n";
    out << "<text x='" << pad << "' y='" << top + pad - 10 << "' font-size='14'>" << title
        << "</text>\n";
    int ci = 0;
    for (const auto& [method, pts] : series) {
      out << "<polyline fill='none' stroke='" << colors[ci % 6] << "' stroke-width='1.5' points='";
      for (const auto& [x, ys] : pts) {
        double mu = 0;
        for (double y : ys) mu += y;
        mu /= ys.size();
        out << sx(x) << "," << sy(mu) << " ";
      }
      out << "'/>\n";
      out << "<text x='" << W - pad + 4 << "' y='" << top + pad + 16 * (ci + 1)
          << "' font-size='11' fill='" << colors[ci % 6] << "'>" << method << "</text>\n";
      ++ci;
    }
  };
  panel(reward, 0, "average reward (10 traces)");
  panel(goals, H, "cumulative goals");
  out << "</svg>\n";
}

}  // namespace clap::bench
