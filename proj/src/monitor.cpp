#include "clap/monitor.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "clap/stats.hpp"

namespace clap::monitor {

double gof_statistic(const std::vector<uint64_t>& freq, const std::vector<double>& prob) {
  uint64_t total = std::accumulate(freq.begin(), freq.end(), uint64_t{0});
  double stat = 0.0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    double p = i < prob.size() ? prob[i] : 0.0;
    if (p <= 0.0) {
      if (freq[i] > 0) return std::numeric_limits<double>::infinity();
      continue;
    }
    double expected = static_cast<double>(total) * p;
    double diff = static_cast<double>(freq[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

GofTestResult gof_test(const std::vector<uint64_t>& freq, const std::vector<double>& prob,
                       double theta, uint64_t min_samples) {
  GofTestResult r;
  uint64_t total = std::accumulate(freq.begin(), freq.end(), uint64_t{0});
  if (total <= min_samples) return r;
  r.statistic = gof_statistic(freq, prob);
  int cells = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    double p = i < prob.size() ? prob[i] : 0.0;
    if (p > 0.0 || freq[i] > 0) ++cells;
  }
  r.df = std::max(1, cells - 1);
  r.pvalue = std::isinf(r.statistic) ? 0.0 : stats::chi_square_tail(r.statistic, r.df);
  r.outcome = r.pvalue < theta ? GofOutcome::Fail : GofOutcome::Pass;
  return r;
}

void refit(model::LearnedModel& m, std::vector<uint64_t>& freq, const std::string& action) {
  uint64_t total = std::accumulate(freq.begin(), freq.end(), uint64_t{0});
  if (total == 0) throw ppddl::ValidationError("refit: empty frequency table");
  model::ActionModel& am = m.action_mut(action);
  am.prob.assign(am.effects.size(), 0.0);
  for (std::size_t i = 0; i < freq.size() && i < am.prob.size(); ++i)
    am.prob[i] = static_cast<double>(freq[i]) / static_cast<double>(total);
  am.prob_stale = false;
  am.prob_weight = static_cast<double>(total);
  std::fill(freq.begin(), freq.end(), 0);
  m.bump_version();
}

std::optional<GofEvent> Monitor::observe(model::LearnedModel& m, const std::string& action,
                                         int effect_index) {
  if (!version_seen_ || m.version() != model_version_) {
    reset_all();
    model_version_ = m.version();
    version_seen_ = true;
  }
  model::ActionModel& am = m.action_mut(action);
  if (am.prob_stale) return std::nullopt;  // nothing trustworthy to test against
  auto& table = freq_[action];
  table.resize(am.effects.size(), 0);
  if (effect_index < 0 || effect_index >= static_cast<int>(table.size())) return std::nullopt;
  ++table[effect_index];

  uint64_t total = std::accumulate(table.begin(), table.end(), uint64_t{0});
  auto r = gof_test(table, am.prob, cfg_.theta, cfg_.min_samples);
  if (r.outcome == GofOutcome::Skipped) return std::nullopt;

  GofEvent ev;
  ev.action = action;
  ev.samples = total;
  ev.statistic = r.statistic;
  ev.pvalue = r.pvalue;
  ev.failed = r.outcome == GofOutcome::Fail;
  ++tests_;
  if (ev.failed) {
    ++fails_;
    refit(m, table, action);
  }
  // the window is spent either way; a refit only invalidates this action
  reset(action);
  model_version_ = m.version();
  return ev;
}

void Monitor::reset(const std::string& action) { freq_.erase(action); }

void Monitor::reset_all() { freq_.clear(); }

uint64_t Monitor::total(const std::string& action) const {
  auto it = freq_.find(action);
  if (it == freq_.end()) return 0;
  return std::accumulate(it->second.begin(), it->second.end(), uint64_t{0});
}

const std::vector<uint64_t>* Monitor::table(const std::string& action) const {
  auto it = freq_.find(action);
  return it == freq_.end() ? nullptr : &it->second;
}

}  // namespace clap::monitor
