#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "clap/monitor.hpp"
#include "clap/stats.hpp"
#include "doctest.h"

using namespace clap;
using model::LearnedModel;

namespace {

// closed forms for even/one degrees of freedom, independent of the
// incomplete-gamma implementation under test
double sf_df1(double x) { return std::erfc(std::sqrt(x / 2.0)); }
double sf_df2(double x) { return std::exp(-x / 2.0); }
double sf_df4(double x) { return std::exp(-x / 2.0) * (1.0 + x / 2.0); }
double sf_df6(double x) { return std::exp(-x / 2.0) * (1.0 + x / 2.0 + x * x / 8.0); }

LearnedModel bandit_model() {
  return LearnedModel::from_domain(ppddl::parse_domain_file("domains/bandit_a.ppddl"));
}

}  // namespace

TEST_CASE("chi-square tails match closed forms to 1e-6") {
  for (double x : {0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 3.841458820694124, 5.0, 10.0, 25.0, 60.0}) {
    CHECK(stats::chi_square_tail(x, 1) == doctest::Approx(sf_df1(x)).epsilon(1e-9));
    CHECK(std::fabs(stats::chi_square_tail(x, 1) - sf_df1(x)) <= 1e-6);
    CHECK(std::fabs(stats::chi_square_tail(x, 2) - sf_df2(x)) <= 1e-6);
    CHECK(std::fabs(stats::chi_square_tail(x, 4) - sf_df4(x)) <= 1e-6);
    CHECK(std::fabs(stats::chi_square_tail(x, 6) - sf_df6(x)) <= 1e-6);
  }
  // published critical values at alpha = 0.05
  CHECK(std::fabs(stats::chi_square_tail(3.841458820694124, 1) - 0.05) <= 1e-6);
  CHECK(std::fabs(stats::chi_square_tail(5.991464547107979, 2) - 0.05) <= 1e-6);
  CHECK(std::fabs(stats::chi_square_tail(7.814727903251179, 3) - 0.05) <= 1e-6);
  CHECK(std::fabs(stats::chi_square_tail(9.487729036781154, 4) - 0.05) <= 1e-6);
  // and at alpha = 0.01
  CHECK(std::fabs(stats::chi_square_tail(6.634896601021213, 1) - 0.01) <= 1e-6);
}

TEST_CASE("chi-square critical inverts the tail") {
  for (int df : {1, 2, 3, 5, 10})
    for (double a : {0.01, 0.05, 0.5}) {
      double x = stats::chi_square_critical(a, df);
      CHECK(stats::chi_square_tail(x, df) == doctest::Approx(a).epsilon(1e-6));
    }
}

TEST_CASE("degenerate tails") {
  CHECK(stats::chi_square_tail(0.0, 3) == doctest::Approx(1.0));
  CHECK(stats::chi_square_tail(-5.0, 3) == doctest::Approx(1.0));
  CHECK(stats::chi_square_tail(1e9, 1) == doctest::Approx(0.0));
}

TEST_CASE("gof statistic hand check") {
  // freq (60, 40) against prob (0.8, 0.2), F = 100:
  // (60-80)^2/80 + (40-20)^2/20 = 5 + 20 = 25
  CHECK(monitor::gof_statistic({60, 40}, {0.8, 0.2}) == doctest::Approx(25.0));
  // perfect agreement
  CHECK(monitor::gof_statistic({80, 20}, {0.8, 0.2}) == doctest::Approx(0.0));
  // observations in a zero-probability cell
  CHECK(std::isinf(monitor::gof_statistic({5, 95}, {0.0, 1.0})));
  // zero-zero cells are skipped
  CHECK(monitor::gof_statistic({0, 100}, {0.0, 1.0}) == doctest::Approx(0.0));
}

TEST_CASE("gof test skips until the window fills") {
  auto r = monitor::gof_test({10, 5}, {0.8, 0.2}, 0.05, 100);
  CHECK(r.outcome == monitor::GofOutcome::Skipped);
  auto r2 = monitor::gof_test({85, 16}, {0.8, 0.2}, 0.05, 100);
  CHECK(r2.outcome == monitor::GofOutcome::Pass);
  CHECK(r2.df == 1);
  auto r3 = monitor::gof_test({20, 81}, {0.8, 0.2}, 0.05, 100);
  CHECK(r3.outcome == monitor::GofOutcome::Fail);
  CHECK(r3.pvalue < 0.05);
}

TEST_CASE("single-cell tables use df 1") {
  auto r = monitor::gof_test({101}, {1.0}, 0.05, 100);
  CHECK(r.df == 1);
  CHECK(r.outcome == monitor::GofOutcome::Pass);
}

TEST_CASE("refit replaces probabilities with frequencies") {
  LearnedModel m = bandit_model();
  std::vector<uint64_t> freq{10, 90};
  uint64_t v = m.version();
  monitor::refit(m, freq, "pull-lever-1");
  const auto& am = m.action("pull-lever-1");
  CHECK(am.prob[0] == doctest::Approx(0.1));
  CHECK(am.prob[1] == doctest::Approx(0.9));
  CHECK(!am.prob_stale);
  CHECK(m.version() > v);
  CHECK(freq == std::vector<uint64_t>{0, 0});
  std::vector<uint64_t> empty{0, 0};
  CHECK_THROWS_AS(monitor::refit(m, empty, "pull-lever-1"), ppddl::ValidationError);
}

TEST_CASE("monitor detects a probability shift and refits") {
  LearnedModel m = bandit_model();  // believes lever-1 is 0.8 / 0.2
  monitor::Monitor mon({0.05, 100});
  std::mt19937_64 rng(4);
  std::bernoulli_distribution hit(0.1);  // the world has drifted to 0.1
  bool failed = false;
  int obs = 0;
  while (!failed && obs < 2000) {
    auto ev = mon.observe(m, "pull-lever-1", hit(rng) ? 0 : 1);
    ++obs;
    if (ev && ev->failed) failed = true;
  }
  CHECK(failed);
  CHECK(obs <= 150);  // one window should suffice at this effect size
  CHECK(m.action("pull-lever-1").prob[0] == doctest::Approx(0.1).epsilon(0.6));
  // the drift test consumed and reset the window
  CHECK(mon.total("pull-lever-1") == 0);
}

TEST_CASE("stationary false-fail rate stays near theta") {
  int fails = 0;
  const int windows = 200;
  std::mt19937_64 rng(9);
  std::bernoulli_distribution hit(0.8);
  for (int w = 0; w < windows; ++w) {
    LearnedModel m = bandit_model();
    monitor::Monitor mon({0.05, 100});
    std::optional<monitor::GofEvent> ev;
    do {
      ev = mon.observe(m, "pull-lever-1", hit(rng) ? 0 : 1);
    } while (!ev);
    if (ev->failed) ++fails;
  }
  CHECK(static_cast<double>(fails) / windows <= 0.10);
}

TEST_CASE("model edits invalidate the window") {
  LearnedModel m = bandit_model();
  monitor::Monitor mon({0.05, 100});
  for (int i = 0; i < 50; ++i) mon.observe(m, "pull-lever-1", 0);
  CHECK(mon.total("pull-lever-1") == 50);
  m.bump_version();
  mon.observe(m, "pull-lever-1", 0);
  CHECK(mon.total("pull-lever-1") == 1);
}

TEST_CASE("stale probabilities are not tested") {
  LearnedModel m = bandit_model();
  m.action_mut("pull-lever-1").prob_stale = true;
  monitor::Monitor mon({0.05, 5});
  for (int i = 0; i < 50; ++i) {
    auto ev = mon.observe(m, "pull-lever-1", 1);
    CHECK(!ev.has_value());
  }
  CHECK(mon.tests_run() == 0);
}
