#include "efo/fhtd.hpp"

#include <cmath>
#include <numeric>

#include "efo/error.hpp"

namespace efo {

FhgvfTable::FhgvfTable(std::string outcome_name, std::size_t horizon, std::size_t num_states, std::size_t num_actions,
                       double discount)
    : outcome_name_(std::move(outcome_name)),
      horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      discount_(discount) {
  if (horizon_ == 0) throw Error(ErrorKind::Configuration, "FHGVF horizon must be positive");
  if (!(discount_ > 0.0 && discount_ <= 1.0)) {
    throw Error(ErrorKind::Configuration, "FHGVF discount must lie in (0, 1]");
  }
  values_.assign(horizon_ * num_states_ * num_actions_, 0.0);
}

std::vector<double> FhgvfTable::series(StateId s, ActionId a) const {
  if (s >= num_states_ || a >= num_actions_) throw Error(ErrorKind::Shape, "(s, a) outside the table");
  std::vector<double> out(horizon_);
  for (std::size_t h = 0; h < horizon_; ++h) out[h] = (*this)(h, s, a);
  return out;
}

double LearningRateSchedule::operator()(std::uint64_t visits) const noexcept {
  if (kind == Kind::Constant) return constant;
  return std::pow(1.0 + static_cast<double>(visits), -exponent);
}

void LearningRateSchedule::validate() const {
  if (kind == Kind::Constant) {
    if (!(constant > 0.0 && constant <= 1.0)) throw Error(ErrorKind::Configuration, "learning rate must lie in (0, 1]");
  } else if (!(exponent > 0.5 && exponent <= 1.0)) {
    throw Error(ErrorKind::Configuration, "polynomial exponent must lie in (0.5, 1]");
  }
}

BehaviorPolicy::BehaviorPolicy(const TabularMdp& mdp, const Policy& base, double exploration_rate)
    : mdp_(&mdp), base_(&base), epsilon_(exploration_rate) {
  if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) throw Error(ErrorKind::Configuration, "exploration rate must lie in [0, 1]");
}

ActionId BehaviorPolicy::sample(StateId s, Rng& rng) const {
  if (epsilon_ > 0.0 && rng.uniform() < epsilon_) {
    const auto valid = mdp_->valid_actions(s);
    return valid[rng.below(valid.size())];
  }
  return policy_sample(*base_, s, rng);
}

double BehaviorPolicy::prob(StateId s, ActionId a) const {
  if (!mdp_->is_valid(s, a)) return 0.0;
  const double uniform = 1.0 / static_cast<double>(mdp_->valid_actions(s).size());
  return epsilon_ * uniform + (1.0 - epsilon_) * base_->prob(s, a);
}

void FhtdConfig::validate() const {
  if (horizon == 0) throw Error(ErrorKind::Configuration, "horizon must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorKind::Configuration, "discount must lie in (0, 1]");
  if (!(exploration_rate >= 0.0 && exploration_rate <= 1.0)) {
    throw Error(ErrorKind::Configuration, "exploration rate must lie in [0, 1]");
  }
  learning_rate.validate();
}

void fhtd_update(FhgvfTable& table, const Transition& tr, double outcome, ActionId next_action, double alpha) {
  const double gamma = table.discount();
  for (std::size_t h = table.horizon(); h-- > 0;) {
    double target = outcome;
    if (h > 0 && !tr.done) target += gamma * table(h - 1, tr.next, next_action);
    double& v = table(h, tr.state, tr.action);
    v += alpha * (target - v);
  }
}

void fhtd_update_expected(FhgvfTable& table, const Transition& tr, double outcome, const Policy& target,
                          double alpha) {
  const double gamma = table.discount();
  const auto row = target.row(tr.next);
  for (std::size_t h = table.horizon(); h-- > 0;) {
    double bootstrap = 0.0;
    if (h > 0 && !tr.done) {
      for (ActionId a = 0; a < row.size(); ++a) {
        if (row[a] != 0.0) bootstrap += row[a] * table(h - 1, tr.next, a);
      }
    }
    double& v = table(h, tr.state, tr.action);
    v += alpha * (outcome + gamma * bootstrap - v);
  }
}

FhtdLearner::FhtdLearner(const TabularMdp& mdp, const Policy& target, std::vector<std::string> outcomes,
                         FhtdConfig config)
    : mdp_(&mdp), target_(&target), config_(config) {
  config_.validate();
  validate_policy(mdp, target);
  if (outcomes.empty()) throw Error(ErrorKind::Configuration, "no outcome to learn");
  for (auto& name : outcomes) {
    outcome_ids_.push_back(mdp.outcome_index(name));
    tables_.emplace_back(std::move(name), config_.horizon, mdp.num_states(), mdp.num_actions(), config_.discount);
    visits_.emplace_back(mdp.num_states() * mdp.num_actions(), 0);
  }
}

FhtdLearner::FhtdLearner(const TabularMdp& mdp, const Policy& target, std::vector<FhgvfTable> tables,
                         std::vector<std::uint64_t> visits, std::uint64_t steps_done, FhtdConfig config)
    : mdp_(&mdp), target_(&target), config_(config), tables_(std::move(tables)), steps_done_(steps_done) {
  config_.validate();
  validate_policy(mdp, target);
  if (tables_.empty()) throw Error(ErrorKind::Configuration, "no outcome to learn");
  const std::size_t pairs = mdp.num_states() * mdp.num_actions();
  if (!visits.empty() && visits.size() != pairs * tables_.size()) {
    throw Error(ErrorKind::Shape, "visit counts do not match the tables");
  }
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto& t = tables_[i];
    if (t.horizon() != config_.horizon || t.num_states() != mdp.num_states() || t.num_actions() != mdp.num_actions() ||
        t.discount() != config_.discount) {
      throw Error(ErrorKind::Shape, "table '" + t.outcome_name() + "' does not match the learner configuration");
    }
    outcome_ids_.push_back(mdp.outcome_index(t.outcome_name()));
    if (visits.empty()) {
      visits_.emplace_back(pairs, 0);
    } else {
      visits_.emplace_back(visits.begin() + i * pairs, visits.begin() + (i + 1) * pairs);
    }
  }
}

void FhtdLearner::observe(const Transition& tr, ActionId next_action, std::span<const std::size_t> which) {
  const std::size_t pair = static_cast<std::size_t>(tr.state) * mdp_->num_actions() + tr.action;
  for (std::size_t i : which) {
    auto& n = visits_[i][pair];
    const double alpha = config_.learning_rate(n);
    ++n;
    const double o = tr.outcomes[outcome_ids_[i]];
    if (config_.expected_backup) {
      fhtd_update_expected(tables_[i], tr, o, *target_, alpha);
    } else {
      fhtd_update(tables_[i], tr, o, next_action, alpha);
    }
  }
}

void FhtdLearner::run_stream(std::uint64_t steps, Rng rng, std::span<const std::size_t> which,
                             const Progress& progress, std::uint64_t progress_interval) {
  const BehaviorPolicy behavior(*mdp_, *target_, config_.exploration_rate);
  StateId s = mdp_->sample_initial_state(rng);
  std::size_t episode_steps = 0;
  for (std::uint64_t step = 0; step < steps; ++step) {
    const ActionId a = behavior.sample(s, rng);
    const Transition tr = mdp_->sample_transition(s, a, rng);
    // One bootstrap action per transition, shared by every level and table.
    const ActionId next_action = tr.done ? 0 : policy_sample(*target_, tr.next, rng);
    observe(tr, next_action, which);
    ++episode_steps;
    if (tr.done || episode_steps >= mdp_->max_episode_steps()) {
      s = mdp_->sample_initial_state(rng);
      episode_steps = 0;
    } else {
      s = tr.next;
    }
    if (progress && progress_interval > 0 && (step + 1) % progress_interval == 0) {
      progress(steps_done_ + step + 1, tables_);
    }
  }
}

void FhtdLearner::train(std::uint64_t steps, const RunSeed& seed, const Progress& progress,
                        std::uint64_t progress_interval) {
  if (config_.shared_trajectories) {
    std::vector<std::size_t> all(tables_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    run_stream(steps, seed.stream(StreamPurpose::ExplainerTraining, steps_done_), all, progress, progress_interval);
  } else {
    for (std::size_t i = 0; i < tables_.size(); ++i) {
      const std::size_t one[] = {i};
      const std::uint64_t index = (static_cast<std::uint64_t>(outcome_ids_[i] + 1) << 40) + steps_done_;
      run_stream(steps, seed.stream(StreamPurpose::ExplainerTraining, index), one, progress, progress_interval);
    }
  }
  steps_done_ += steps;
}

FhgvfTable train_explainer(const TabularMdp& mdp, const Policy& target, const std::string& outcome,
                           const FhtdConfig& config, const RunSeed& seed) {
  FhtdLearner learner(mdp, target, {outcome}, config);
  learner.train(config.total_steps, seed);
  return std::move(learner.tables().front());
}

}  // namespace efo
