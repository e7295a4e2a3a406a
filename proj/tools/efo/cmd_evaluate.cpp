#include <algorithm>
#include <cstdio>
#include <future>
#include <memory>
#include <thread>

#include "artifacts.hpp"
#include "commands.hpp"
#include "efo/error.hpp"
#include "efo/eval.hpp"
#include "efo/oracle.hpp"
#include "efo/table_io.hpp"

namespace efo::cli {

namespace fs = std::filesystem;

namespace {

struct EvaluateOptions {
  std::string policy;
  std::string tables;
  std::string config;
  std::string out;
  std::optional<std::size_t> episodes;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> steps;
  bool fast = false;
  unsigned jobs = 0;
};

void run_evaluate(const EvaluateOptions& o) {
  RunConfig cfg = load_config(o.config);
  const auto art = load_policy_artifact(o.policy);
  const std::size_t episodes = o.episodes.value_or(cfg.eval_episodes);
  std::size_t runs = o.fast ? 3 : o.runs.value_or(cfg.eval_runs);
  if (runs == 0) throw Error(ErrorKind::Configuration, "at least one run is required");

  // Each run is an explainer table set: loaded from --tables, or trained here with seeds 0..runs-1.
  std::vector<fs::path> dirs;
  if (!o.tables.empty()) {
    dirs = explainer_dirs(o.tables);
    if (dirs.empty()) throw Error(ErrorKind::Io, "no explainer tables under '" + o.tables + "'");
    if (dirs.size() < runs) {
      std::fprintf(stderr, "warning: %zu runs requested but only %zu table sets found; evaluating those\n", runs,
                   dirs.size());
      runs = dirs.size();
    }
    dirs.resize(runs);
  } else {
    check_event_names(cfg.events);
    if (o.steps) cfg.explainer.total_steps = *o.steps;
  }

  auto evaluate_run = [&](std::size_t r) -> std::pair<RunErrors, FhtdConfig> {
    std::vector<FhgvfTable> learned;
    FhtdConfig shape = cfg.explainer;
    std::uint64_t seed = r;
    if (!dirs.empty()) {
      auto set = load_explainer_set(dirs[r]);
      if (set.metadata.value("policy_hash", "") != art.metadata.at("policy_hash")) {
        throw Error(ErrorKind::ArtifactFormat, "'" + dirs[r].string() + "' was trained for a different policy");
      }
      learned = std::move(set.tables);
      shape = set.config;
      shape.total_steps = set.steps_done;
      seed = set.seed;
    } else {
      FhtdLearner learner(art.mdp, art.policy, cfg.events, cfg.explainer);
      learner.train(cfg.explainer.total_steps, RunSeed{seed});
      learned = std::move(learner.tables());
    }
    std::vector<FhgvfTable> exact;
    for (const auto& t : learned) {
      exact.push_back(exact_fhgvf(art.mdp, art.policy, t.outcome_name(), t.horizon(), t.discount()));
    }
    const auto states =
        collect_eval_states(art.mdp, art.policy, episodes, RunSeed{seed}.stream(StreamPurpose::Evaluation));
    return {{seed, states.size(), compute_errors(learned, exact, states, art.policy, art.mdp)}, shape};
  };

  const unsigned jobs = std::max(1u, o.jobs ? o.jobs : std::thread::hardware_concurrency());
  std::vector<std::pair<RunErrors, FhtdConfig>> results(runs);
  for (std::size_t begin = 0; begin < runs; begin += jobs) {
    std::vector<std::future<std::pair<RunErrors, FhtdConfig>>> batch;
    for (std::size_t r = begin; r < std::min<std::size_t>(runs, begin + jobs); ++r) {
      batch.push_back(std::async(std::launch::async, evaluate_run, r));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) results[begin + i] = batch[i].get();
  }

  std::vector<RunErrors> run_errors;
  for (auto& [errors, _] : results) run_errors.push_back(std::move(errors));
  const auto& shape = results.front().second;
  const auto report = aggregate(std::move(run_errors), episodes, shape.total_steps, shape.horizon);

  auto j = report_to_json(report);
  j["metadata"]["generator"] = kGenerator;
  j["metadata"]["policy_hash"] = art.metadata.at("policy_hash");
  j["metadata"]["env"] = art.metadata.at("env");
  j["metadata"]["explainer"] = fhtd_to_json(shape);
  const fs::path dir = output_dir(o.out) / "evaluation";
  fs::create_directories(dir);
  write_json(dir / "report.json", j);
  write_text(dir / "report.csv", report_to_csv(report));
  const auto text = render_report(report);
  write_text(dir / "report.txt", text);
  std::printf("%s\nwrote %s\n", text.c_str(), dir.string().c_str());
}

}  // namespace

void add_evaluate(CLI::App& app) {
  auto o = std::make_shared<EvaluateOptions>();
  auto* cmd = app.add_subcommand("evaluate", "Compare learned explanations with the exact oracle over runs");
  cmd->add_option("-p,--policy", o->policy, "Policy artifact (policy.tpd)")->required();
  cmd->add_option("-t,--tables", o->tables, "Explainer root with seed-<n> directories (default: train them)");
  cmd->add_option("-c,--config", o->config, "JSON run configuration");
  cmd->add_option("--episodes", o->episodes, "Policy episodes used to collect evaluation states");
  cmd->add_option("--runs", o->runs, "Independent runs");
  cmd->add_option("--steps", o->steps, "Explainer training steps per run when training here");
  cmd->add_flag("--fast", o->fast, "Three runs instead of ten");
  cmd->add_option("-j,--jobs", o->jobs, "Concurrent runs (default: hardware threads)");
  cmd->add_option("-o,--out", o->out, "Output directory (default $EFO_OUTPUT_DIR or ./efo-out)");
  cmd->callback([o] { run_evaluate(*o); });
}

}  // namespace efo::cli
