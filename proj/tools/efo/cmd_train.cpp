#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "artifacts.hpp"
#include "commands.hpp"
#include "efo/error.hpp"
#include "efo/eval.hpp"
#include "efo/oracle.hpp"
#include "efo/table_io.hpp"

namespace efo::cli {

namespace fs = std::filesystem;

namespace {

struct TrainPolicyOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> steps;
};

void run_train_policy(const TrainPolicyOptions& o) {
  RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.policy_seed = *o.seed;
  if (o.steps) cfg.q_learning.total_steps = *o.steps;
  cfg.q_learning.validate();
  const auto mdp = taxi::build_taxi_mdp(cfg.env);
  const auto result = train_q_learning(mdp, cfg.q_learning, RunSeed{cfg.policy_seed}.stream(StreamPurpose::PolicyTraining));
  const Policy policy = greedy_policy(result.q, mdp);
  const double success = success_probability(mdp, policy, "dropoff", mdp.max_episode_steps());

  const fs::path dir = output_dir(o.out) / "policy";
  fs::create_directories(dir);
  const nlohmann::json meta = {{"generator", kGenerator},
                               {"env", taxi::config_to_json(cfg.env)},
                               {"q_learning", config_to_json(cfg)["q_learning"]},
                               {"seed", cfg.policy_seed},
                               {"success_probability", success}};
  save_qtable(dir / "qtable.tpd", result.q, meta);
  save_policy(dir / "policy.tpd", policy, meta);

  std::ostringstream curve;
  curve.precision(17);
  curve << "step,episodic_return\n";
  for (const auto& p : result.curve) curve << p.step << ',' << p.episodic_return << '\n';
  write_text(dir / "training_curve.csv", curve.str());

  double tail = 0.0;
  const std::size_t n = std::min<std::size_t>(result.curve.size(), 100);
  for (std::size_t i = result.curve.size() - n; i < result.curve.size(); ++i) tail += result.curve[i].episodic_return;
  std::printf("trained %llu steps over %zu episodes (seed %llu)\n",
              static_cast<unsigned long long>(cfg.q_learning.total_steps), result.curve.size(),
              static_cast<unsigned long long>(cfg.policy_seed));
  if (n > 0) std::printf("mean return of the last %zu episodes: %.3f\n", n, tail / double(n));
  std::printf("greedy policy success probability (exact, %zu steps): %.4f\n", mdp.max_episode_steps(), success);
  std::printf("wrote %s\n", dir.string().c_str());
}

struct TrainExplainersOptions {
  std::string policy;
  std::string config;
  std::string out;
  std::vector<std::string> events;
  bool events_given = false;
  std::vector<std::uint64_t> seeds;
  std::optional<std::uint64_t> steps;
  bool resume = false;
  std::uint64_t diagnostics = 0;
  std::uint64_t progress = 0;
};

std::string diagnostics_row(std::uint64_t step, const std::vector<OutcomeErrors>& errors) {
  std::ostringstream out;
  out.precision(10);
  for (const auto& e : errors) {
    out << step << ',' << e.outcome << ',' << e.pi_mse << ',' << e.pibar_mse << ',' << e.pi_inf << ',' << e.pibar_inf
        << '\n';
  }
  return out.str();
}

void run_train_explainers(const TrainExplainersOptions& o) {
  RunConfig cfg = load_config(o.config);
  if (o.events_given) {
    cfg.events.clear();
    for (const auto& e : o.events) {
      if (!e.empty()) cfg.events.push_back(e);
    }
  }
  if (!o.seeds.empty()) cfg.explainer_seeds = o.seeds;
  check_event_names(cfg.events);
  const auto art = load_policy_artifact(o.policy);
  const std::uint64_t steps = o.steps.value_or(cfg.explainer.total_steps);
  const nlohmann::json provenance = {{"generator", kGenerator},
                                     {"env", art.metadata.at("env")},
                                     {"policy_hash", art.metadata.at("policy_hash")},
                                     {"policy", fs::absolute(o.policy).lexically_normal().string()}};

  std::vector<FhgvfTable> exact;
  std::vector<StateId> all_states;
  if (o.diagnostics > 0) {
    for (const auto& e : cfg.events) {
      exact.push_back(exact_fhgvf(art.mdp, art.policy, e, cfg.explainer.horizon, cfg.explainer.discount));
    }
    for (StateId s = 0; s < art.mdp.num_states(); ++s) {
      if (!art.mdp.is_terminal(s)) all_states.push_back(s);
    }
  }

  for (std::uint64_t seed : cfg.explainer_seeds) {
    const fs::path dir = output_dir(o.out) / "explainers" / ("seed-" + std::to_string(seed));
    std::unique_ptr<FhtdLearner> learner;
    if (o.resume) {
      auto set = load_explainer_set(dir);
      if (set.metadata.value("policy_hash", "") != art.metadata.at("policy_hash")) {
        throw Error(ErrorKind::ArtifactFormat, "tables in '" + dir.string() + "' were trained for another policy");
      }
      cfg.explainer = set.config;
      learner = std::make_unique<FhtdLearner>(art.mdp, art.policy, std::move(set.tables), std::move(set.visits),
                                              set.steps_done, cfg.explainer);
    } else {
      learner = std::make_unique<FhtdLearner>(art.mdp, art.policy, cfg.events, cfg.explainer);
    }

    std::string diag;
    FhtdLearner::Progress progress;
    std::uint64_t interval = 0;
    if (o.diagnostics > 0 || o.progress > 0) {
      interval = o.diagnostics > 0 ? o.diagnostics : o.progress;
      progress = [&](std::uint64_t step, std::span<const FhgvfTable> tables) {
        if (o.diagnostics > 0) diag += diagnostics_row(step, compute_errors(tables, exact, all_states, art.policy, art.mdp));
        if (o.progress > 0 && step % o.progress == 0) {
          std::fprintf(stderr, "seed %llu: %llu steps\n", static_cast<unsigned long long>(seed),
                       static_cast<unsigned long long>(step));
        }
      };
    }
    learner->train(steps, RunSeed{seed}, progress, interval);

    ExplainerSet set;
    set.tables = learner->tables();
    for (const auto& v : learner->visits()) set.visits.insert(set.visits.end(), v.begin(), v.end());
    set.steps_done = learner->steps_done();
    set.seed = seed;
    set.config = learner->config();
    save_explainer_set(dir, set, provenance);
    if (o.diagnostics > 0) {
      const fs::path csv = dir / "diagnostics.csv";
      const bool append = o.resume && fs::exists(csv);
      std::string text = append ? "" : "step,outcome,pi_mse,pibar_mse,pi_inf,pibar_inf\n";
      if (append) {
        std::ifstream in(csv);
        text.assign(std::istreambuf_iterator<char>(in), {});
      }
      write_text(csv, text + diag);
    }
    std::printf("seed %llu: %zu tables at %llu steps -> %s\n", static_cast<unsigned long long>(seed),
                set.tables.size(), static_cast<unsigned long long>(set.steps_done), dir.string().c_str());
  }
}

}  // namespace

void add_train_policy(CLI::App& app) {
  auto o = std::make_shared<TrainPolicyOptions>();
  auto* cmd = app.add_subcommand("train-policy", "Train the target policy with masked Q-learning");
  cmd->add_option("-c,--config", o->config, "JSON run configuration");
  cmd->add_option("--seed", o->seed, "Policy training seed (overrides the config)");
  cmd->add_option("--steps", o->steps, "Training steps (overrides the config)");
  cmd->add_option("-o,--out", o->out, "Output directory (default $EFO_OUTPUT_DIR or ./efo-out)");
  cmd->callback([o] { run_train_policy(*o); });
}

void add_train_explainers(CLI::App& app) {
  auto o = std::make_shared<TrainExplainersOptions>();
  auto* cmd = app.add_subcommand("train-explainers", "Learn fixed-horizon GVFs for the policy's future events");
  cmd->add_option("-p,--policy", o->policy, "Policy artifact (policy.tpd)")->required();
  cmd->add_option("-c,--config", o->config, "JSON run configuration");
  auto* events = cmd->add_option("-e,--events", o->events, "Events to learn (default: all six)")->delimiter(',');
  cmd->add_option("--seed", o->seeds, "Training seeds, one table set each")->delimiter(',');
  cmd->add_option("--steps", o->steps, "Transitions per seed (overrides the config)");
  cmd->add_flag("--resume", o->resume, "Continue from the tables already in the output directory");
  cmd->add_option("--diagnostics", o->diagnostics, "Write oracle error every N steps to diagnostics.csv");
  cmd->add_option("--progress", o->progress, "Report progress on stderr every N steps");
  cmd->add_option("-o,--out", o->out, "Output directory (default $EFO_OUTPUT_DIR or ./efo-out)");
  cmd->callback([o, events] {
    o->events_given = events->count() > 0;
    run_train_explainers(*o);
  });
}

}  // namespace efo::cli

namespace efo::cli {

void add_show_config(CLI::App& app) {
  auto path = std::make_shared<std::string>();
  auto* cmd = app.add_subcommand("show-config", "Print the effective configuration (defaults merged with --config)");
  cmd->add_option("-c,--config", *path, "JSON run configuration");
  cmd->callback([path] { std::printf("%s\n", config_to_json(load_config(*path)).dump(2).c_str()); });
}

}  // namespace efo::cli
