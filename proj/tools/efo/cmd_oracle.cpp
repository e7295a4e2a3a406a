#include <cstdio>
#include <memory>

#include "artifacts.hpp"
#include "commands.hpp"
#include "efo/error.hpp"
#include "efo/oracle.hpp"
#include "efo/table_io.hpp"

namespace efo::cli {

namespace fs = std::filesystem;

namespace {

struct OracleOptions {
  std::string policy;
  std::vector<std::string> outcomes;
  std::size_t horizon = 30;
  double discount = 1.0;
  bool optimal = false;
  std::string out;
};

void run_oracle(const OracleOptions& o) {
  const auto art = load_policy_artifact(o.policy);
  std::vector<std::string> outcomes = o.outcomes;
  if (outcomes.empty()) outcomes = taxi::default_event_names();
  for (const auto& name : outcomes) (void)art.mdp.outcome_index(name);

  const fs::path dir = output_dir(o.out) / "oracle";
  fs::create_directories(dir);
  const nlohmann::json meta = {{"generator", kGenerator},
                               {"env", art.metadata.at("env")},
                               {"policy_hash", art.metadata.at("policy_hash")},
                               {"provenance", "oracle"}};
  for (const auto& name : outcomes) {
    save_fhgvf(dir / (name + ".tpd"), exact_fhgvf(art.mdp, art.policy, name, o.horizon, o.discount), meta);
  }

  const std::size_t episode = art.mdp.max_episode_steps();
  const double success = success_probability(art.mdp, art.policy, "dropoff", episode);
  const auto vi = value_iteration(art.mdp, art.env.discount);
  const double best = success_probability(art.mdp, vi.policy, "dropoff", episode);
  nlohmann::json summary = {{"generator", kGenerator},
                            {"policy_hash", art.metadata.at("policy_hash")},
                            {"outcomes", outcomes},
                            {"horizon", o.horizon},
                            {"discount", o.discount},
                            {"success_horizon", episode},
                            {"success_probability", success},
                            {"optimal_success_probability", best},
                            {"value_iteration", {{"iterations", vi.iterations}, {"residual", vi.residual}}}};
  if (o.optimal) {
    auto vi_meta = art.metadata;
    vi_meta["seed"] = nullptr;
    vi_meta["q_learning"] = nullptr;
    vi_meta["success_probability"] = best;
    vi_meta["source"] = "value_iteration";
    save_policy(dir / "optimal_policy.tpd", vi.policy, vi_meta);
  }
  write_json(dir / "summary.json", summary);
  std::printf("exact tables for %zu outcomes (H=%zu, discount %.3g) -> %s\n", outcomes.size(), o.horizon, o.discount,
              dir.string().c_str());
  std::printf("success probability within %zu steps: policy %.4f, value-iteration optimum %.4f (%zu iterations)\n",
              episode, success, best, vi.iterations);
}

}  // namespace

void add_oracle(CLI::App& app) {
  auto o = std::make_shared<OracleOptions>();
  auto* cmd = app.add_subcommand("oracle", "Exact fixed-horizon tables and value iteration by dynamic programming");
  cmd->add_option("-p,--policy", o->policy, "Policy artifact (policy.tpd)")->required();
  cmd->add_option("--outcomes", o->outcomes, "Outcomes (default: the six events; 'reward' is also available)")
      ->delimiter(',');
  cmd->add_option("-H,--horizon", o->horizon, "Horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--discount", o->discount, "Outcome discount")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--optimal-policy", o->optimal, "Also write the value-iteration policy");
  cmd->add_option("-o,--out", o->out, "Output directory (default $EFO_OUTPUT_DIR or ./efo-out)");
  cmd->callback([o] { run_oracle(*o); });
}

}  // namespace efo::cli
