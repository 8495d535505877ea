#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace clap::metrics {

struct GoalPoint {
  uint64_t step = 0;
  uint64_t goals = 0;  // cumulative
};

struct EvalPoint {
  uint64_t step = 0;
  double avg_reward = 0.0;
  double success_rate = 0.0;
};

struct EpisodePoint {
  uint64_t step = 0;  // step count at episode end
  double reward = 0.0;
  bool goal = false;
};

struct RunMetrics {
  std::string method;
  std::string task;
  uint64_t seed = 0;

  std::vector<GoalPoint> goals;      // learning curve
  std::vector<EvalPoint> evals;      // frozen-policy evaluations
  std::vector<EpisodePoint> episodes;
  std::vector<nlohmann::json> events;  // learner event trail
  std::vector<double> vd_series;       // VD after each learner invocation

  uint64_t steps_used = 0;
  uint64_t goals_total = 0;
  int learner_invocations = 0;
  int replans = 0;
  std::string policy_at_start;  // ground action chosen at s0 by the last plan
  double adaptive_delay = -1.0; // filled by bench; -1 = not computed

  nlohmann::json to_json() const;
  static RunMetrics from_json(const nlohmann::json& j);
};

}  // namespace clap::metrics
