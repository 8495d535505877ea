#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clap/model.hpp"

namespace clap::monitor {

struct GofConfig {
  double theta = 0.05;        // significance level
  uint64_t min_samples = 100; // a window closes once the count exceeds this
};

struct GofEvent {
  std::string action;
  double statistic = 0.0;
  double pvalue = 1.0;
  bool failed = false;
  uint64_t samples = 0;
};

// Windowed goodness-of-fit watchdog over matched effect outcomes. Each
// lifted action accumulates a frequency table; once a window fills, the
// table is tested against the model's current effect distribution. A
// failure refits the probabilities from the window and clears it; any
// model edit invalidates all tables.
class Monitor {
 public:
  explicit Monitor(GofConfig cfg = {}) : cfg_(cfg) {}

  const GofConfig& config() const { return cfg_; }

  // Record one matched effect for the action; runs the test if the window
  // just closed. May refit the model's probabilities on failure.
  std::optional<GofEvent> observe(model::LearnedModel& m, const std::string& action,
                                  int effect_index);

  void reset(const std::string& action);
  void reset_all();

  uint64_t total(const std::string& action) const;
  const std::vector<uint64_t>* table(const std::string& action) const;

  int tests_run() const { return tests_; }
  int failures() const { return fails_; }

 private:
  GofConfig cfg_;
  std::map<std::string, std::vector<uint64_t>> freq_;
  uint64_t model_version_ = 0;
  bool version_seen_ = false;
  int tests_ = 0;
  int fails_ = 0;
};

// The raw statistic: sum over cells of (freq - total*prob)^2 / (total*prob).
// Cells with zero probability and zero frequency are skipped; a zero-
// probability cell with observations yields +infinity.
double gof_statistic(const std::vector<uint64_t>& freq, const std::vector<double>& prob);

enum class GofOutcome { Skipped, Pass, Fail };

struct GofTestResult {
  GofOutcome outcome = GofOutcome::Skipped;
  double statistic = 0.0;
  double pvalue = 1.0;
  int df = 1;
};

// Pearson test of a frequency table against a probability list. Skipped
// unless the total count exceeds min_samples; df = max(1, cells - 1).
GofTestResult gof_test(const std::vector<uint64_t>& freq, const std::vector<double>& prob,
                       double theta, uint64_t min_samples = 100);

// Prob := Freq / F for the action, then the table is zeroed. Throws on an
// empty table.
void refit(model::LearnedModel& m, std::vector<uint64_t>& freq, const std::string& action);

}  // namespace clap::monitor
