#pragma once

#include <random>
#include <string>
#include <vector>

#include "clap/metrics.hpp"
#include "clap/ppddl.hpp"
#include "clap/world.hpp"

namespace clap::bench {

struct MutationEdit {
  std::string kind;     // add | delete | modify
  std::string where;    // "pre" or "eff[i]"
  std::string literal;  // human-readable literal text
};

struct MutationSpec {
  uint64_t seed = 0;
  std::string action;
  std::vector<MutationEdit> edits;  // 1..6 total
  nlohmann::json to_json() const;
};

// One random action, 0-3 precondition edits plus 0-3 effect edits, at least
// one change overall. The result always re-validates.
std::pair<ppddl::LiftedDomain, MutationSpec> mutate_domain(const ppddl::LiftedDomain& domain,
                                                           std::mt19937_64& rng);

// Fresh init/goal pairs via breadth-first search: init is a random reachable
// state, the goal conjunction is a state at least `depth` steps further on.
// Consecutive tasks are guaranteed to differ. May return fewer than `count`
// tasks when the reachable space is too small.
std::vector<ppddl::TaskSpec> generate_tasks(const ppddl::LiftedDomain& domain,
                                            const ppddl::TaskSpec& base, int count,
                                            std::mt19937_64& rng, int depth = 4);

// Smallest evaluation step index from which the method's reward stays within
// two oracle standard deviations of the oracle mean; +infinity when it never
// settles. Series are aligned by evaluation index.
double adaptive_delay(const std::vector<metrics::EvalPoint>& evals,
                      const std::vector<double>& oracle_mean,
                      const std::vector<double>& oracle_std);

struct Manifest {
  std::string domain;   // path
  std::string problem;  // path
  int tasks = 1;
  uint64_t budget = 1000;
  std::vector<std::string> methods;  // clap | comprehensive | qlearning | oracle
  std::vector<uint64_t> seeds;
  int eta = 100;
  int beta = 10;
  double theta = 0.05;
  double gamma = 0.9;
  int horizon = 40;
  uint64_t eval_every = 100;
  int eval_traces = 10;
  uint64_t mutation_seed = 0;
  int bfs_depth = 4;
  std::string out = "bench_out";
  std::vector<std::string> task_domains;  // optional explicit per-task domains

  static Manifest parse(const std::string& text);
  static Manifest load(const std::string& path);
};

struct ExperimentResult {
  std::vector<metrics::RunMetrics> runs;
};

// Runs every (method x seed x task) cell, computes adaptive delays against
// the oracle batch, and writes <out>/metrics.jsonl plus <out>/aggregate.csv.
ExperimentResult run_experiment(const Manifest& manifest);

void write_metrics(const std::vector<metrics::RunMetrics>& runs, const std::string& path);
std::vector<metrics::RunMetrics> read_metrics(const std::string& path);

// Aggregate CSV: per (method, task, step) mean and std of reward and
// cumulative goals across seeds.
void report(const std::vector<metrics::RunMetrics>& runs, const std::string& csv_path);

// Line charts (reward curves and cumulative goals) as a standalone SVG.
void plot(const std::vector<metrics::RunMetrics>& runs, const std::string& svg_path);

}  // namespace clap::bench
