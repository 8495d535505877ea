#include "clap/world.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace clap::world {

void ChangeSchedule::validate() const {
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].trigger <= entries[i - 1].trigger)
      throw ppddl::ValidationError("change schedule triggers must be strictly increasing");
}

Simulator::Simulator(ppddl::LiftedDomain hidden, ppddl::TaskSpec task, uint64_t budget,
                     uint64_t seed)
    : hidden_(std::move(hidden)), task_(std::move(task)), budget_(budget), seed_(seed),
      rng_(seed) {
  reground();
  init_ = space_->state_of(task_.init);
  current_ = init_;
}

void Simulator::reground() {
  auto space = std::make_shared<ppddl::GroundSpace>(ppddl::ground(hidden_, task_.objects));
  space_ = space;
  ops_ = ppddl::ground_operators(hidden_, *space_);
}

ppddl::State Simulator::step(uint32_t ground_action) {
  if (steps_ >= budget_) throw BudgetExhausted();
  const ppddl::GroundOp& op = ops_.at(ground_action);
  if (ppddl::holds(current_, op.pre)) {
    // inverse-CDF sampling over the effect list
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    double acc = 0.0;
    std::size_t idx = op.eff.empty() ? 0 : op.eff.size() - 1;
    for (std::size_t i = 0; i < op.prob.size(); ++i) {
      acc += op.prob[i];
      if (u < acc) {
        idx = i;
        break;
      }
    }
    if (!op.eff.empty()) current_ = ppddl::apply_effect(current_, op.eff[idx]);
  }
  ++steps_;
  apply_schedule();
  return current_;
}

void Simulator::apply_schedule() {
  for (auto& e : schedule_.entries) {
    if (e.trigger == steps_) {
      hidden_ = e.domain;
      reground();
    }
  }
}

ppddl::State Simulator::reset() {
  current_ = init_;
  return current_;
}

ppddl::State Simulator::load(ppddl::TaskSpec task, ppddl::LiftedDomain domain, uint64_t budget) {
  hidden_ = std::move(domain);
  task_ = std::move(task);
  budget_ = budget;
  steps_ = 0;
  schedule_.entries.clear();
  reground();
  init_ = space_->state_of(task_.init);
  current_ = init_;
  return current_;
}

void Simulator::set_schedule(ChangeSchedule schedule) {
  schedule.validate();
  schedule_ = std::move(schedule);
}

Simulator Simulator::fork(uint64_t seed) const {
  Simulator copy = *this;
  copy.rng_.seed(seed);
  copy.seed_ = seed;
  copy.budget_ = std::numeric_limits<uint64_t>::max();
  copy.steps_ = 0;
  copy.schedule_.entries.clear();
  return copy;
}

bool Simulator::goal_reached(const ppddl::State& s) const {
  return ppddl::holds(s, task_.goal, *space_, hidden_.types);
}

ChangeSchedule load_schedule_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ppddl::ValidationError("cannot open schedule manifest " + path);
  ChangeSchedule out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    uint64_t trigger;
    std::string file;
    if (ls >> trigger >> file) out.entries.push_back({trigger, ppddl::parse_domain_file(file)});
  }
  out.validate();
  return out;
}

}  // namespace clap::world
