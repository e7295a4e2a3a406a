#include <cmath>
#include <cstdio>
#include <memory>
#include <set>

#include "artifacts.hpp"
#include "commands.hpp"
#include "efo/error.hpp"
#include "efo/oracle.hpp"
#include "efo/table_io.hpp"

namespace efo::cli {

namespace fs = std::filesystem;

namespace {

struct ExplainOptions {
  std::string tables;
  std::string policy;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> contrast;
  std::vector<std::string> formats = {"json", "csv"};
  bool oracle = false;
  std::string out;
};

nlohmann::json state_json(StateId s) {
  const auto ts = taxi::decode_state(s);
  return {{"id", s}, {"row", ts.row}, {"col", ts.col}, {"fuel", ts.fuel}, {"passenger_in_taxi", ts.passenger_in_taxi}};
}

// Rounds tiny negatives so the table never shows -0.0000.
double shown(double x) { return std::abs(x) < 5e-5 ? 0.0 : x; }

void print_explanation(const Explanation& e) {
  std::printf("\n%s (%s), state %u:\n", std::string(taxi::action_name(e.action)).c_str(),
              std::string(to_string(e.events.front().provenance)).c_str(), e.state);
  std::printf("%3s", "h");
  for (const auto& ev : e.events) std::printf(" %9s", ev.outcome_name.c_str());
  std::printf(" %10s %9s\n", "terminated", "reward");
  for (std::size_t h = 0; h < e.horizon(); ++h) {
    std::printf("%3zu", h);
    for (const auto& ev : e.events) std::printf(" %9.4f", shown(ev.values[h]));
    std::printf(" %10.4f %9.4f\n", shown(e.terminated.raw[h]), shown(e.rewards.total[h]));
  }
  std::printf("expected discounted reward over %zu steps: %.4f", e.horizon(), e.rewards.discounted_value);
  if (e.rewards.remainder_unbounded) {
    std::printf(" (remainder beyond the horizon unbounded)\n");
  } else {
    std::printf(" (remainder beyond the horizon at most %.2f per unit reward)\n", e.rewards.remainder_bound);
  }
  if (e.terminated.out_of_range) std::printf("note: some learned probabilities fall outside [0, 1]; raw values kept\n");
}

struct Writer {
  fs::path dir;
  std::set<std::string> formats;

  void explanation(const Explanation& e, const std::string& stem, bool complete) const {
    const auto namer = taxi_action_namer();
    if (formats.count("json")) {
      auto j = explanation_to_json(e, namer);
      j["state"] = state_json(e.state);
      j["complete_event_set"] = complete;
      write_json(dir / (stem + ".json"), j);
    }
    if (formats.count("csv")) write_text(dir / (stem + ".csv"), explanation_to_csv(e));
    if (formats.count("svg")) {
      const std::string title = "state " + std::to_string(e.state) + ", " + std::string(taxi::action_name(e.action));
      write_text(dir / (stem + "_events.svg"), explanation_events_svg(e, "Event probabilities: " + title));
      write_text(dir / (stem + "_rewards.svg"), explanation_rewards_svg(e, "Expected reward components: " + title));
    }
  }

  void contrast(const Contrast& c, const std::string& stem, const nlohmann::json& check) const {
    if (formats.count("json")) {
      auto j = contrast_to_json(c, taxi_action_namer());
      j["state"] = state_json(c.state);
      j["oracle_check"] = check;
      write_json(dir / (stem + ".json"), j);
    }
    if (formats.count("csv")) write_text(dir / (stem + ".csv"), contrast_to_csv(c));
    if (formats.count("svg")) {
      const std::string title = "Why " + std::string(taxi::action_name(c.fact)) + " rather than " +
                                std::string(taxi::action_name(c.foil)) + "? (state " + std::to_string(c.state) + ")";
      write_text(dir / (stem + ".svg"), contrast_svg(c, title));
    }
  }
};

void run_explain(const ExplainOptions& o) {
  for (const auto& f : o.formats) {
    if (f != "json" && f != "csv" && f != "svg") {
      throw Error(ErrorKind::Configuration, "unknown format '" + f + "' (expected json, csv or svg)");
    }
  }
  if (!o.contrast.empty() && !o.actions.empty()) {
    throw Error(ErrorKind::Configuration, "--contrast and --action are mutually exclusive");
  }

  std::unique_ptr<ExplainerSet> learned;
  if (!o.tables.empty()) {
    const auto dirs = explainer_dirs(o.tables);
    if (dirs.empty()) throw Error(ErrorKind::Io, "no explainer tables under '" + o.tables + "'");
    learned = std::make_unique<ExplainerSet>(load_explainer_set(dirs.front()));
  }
  std::string policy_path = o.policy;
  if (policy_path.empty() && learned) policy_path = learned->metadata.value("policy", "");
  if (policy_path.empty()) throw Error(ErrorKind::Configuration, "--policy is required without --tables");
  const auto art = load_policy_artifact(policy_path);

  std::vector<FhgvfTable> tables;
  std::vector<std::string> events = taxi::default_event_names();
  FhtdConfig shape;
  if (learned) {
    if (learned->metadata.value("policy_hash", "") != art.metadata.at("policy_hash")) {
      throw Error(ErrorKind::ArtifactFormat, "the explainer tables were trained for a different policy");
    }
    events.clear();
    for (const auto& t : learned->tables) events.push_back(t.outcome_name());
    shape = learned->config;
  }
  if (o.oracle) {
    for (const auto& e : events) tables.push_back(exact_fhgvf(art.mdp, art.policy, e, shape.horizon, shape.discount));
  } else {
    if (!learned) throw Error(ErrorKind::Configuration, "--tables is required unless --oracle is given");
    tables = std::move(learned->tables);
  }
  for (const auto& t : tables) {
    if (t.num_states() != art.mdp.num_states() || t.num_actions() != art.mdp.num_actions()) {
      throw Error(ErrorKind::Shape, "table '" + t.outcome_name() + "' does not match the environment");
    }
  }
  const bool complete = std::set<std::string>(events.begin(), events.end()).size() == taxi::kNumEvents;
  if (!complete) {
    std::fprintf(stderr, "warning: incomplete event set; the terminated row also absorbs the missing events\n");
  }
  const auto rewards = event_rewards(events);
  const Provenance provenance = o.oracle ? Provenance::Oracle : Provenance::Learned;
  const double gamma = art.env.discount;

  Writer writer{output_dir(o.out) / "explanations", {o.formats.begin(), o.formats.end()}};
  if (writer.formats.count("svg")) writer.formats.insert("csv");  // charts always ship with their data
  fs::create_directories(writer.dir);
  const std::string prefix = o.oracle ? "oracle_" : "";
  std::unique_ptr<FhgvfTable> q_fixed;

  for (const auto& spec : o.states) {
    const StateId s = taxi::parse_state_spec(spec);
    std::printf("state %u\n%s", s, taxi::render_state(art.env, s).c_str());
    auto stem = [&](ActionId a) { return prefix + "s" + std::to_string(s) + "_" + std::string(taxi::action_name(a)); };

    if (!o.contrast.empty()) {
      const ActionId fact = parse_action_arg(o.contrast[0]);
      const ActionId foil = parse_action_arg(o.contrast[1]);
      require_valid(art.mdp, s, fact);
      require_valid(art.mdp, s, foil);
      const auto ef = explain(tables, s, fact, rewards, gamma, provenance);
      const auto eo = explain(tables, s, foil, rewards, gamma, provenance);
      print_explanation(ef);
      print_explanation(eo);
      writer.explanation(ef, stem(fact), complete);
      writer.explanation(eo, stem(foil), complete);
      const auto c = contrastive(ef, eo);
      if (!q_fixed) {
        q_fixed = std::make_unique<FhgvfTable>(
            exact_fhgvf(art.mdp, art.policy, taxi::kRewardOutcome, tables.front().horizon(), gamma));
      }
      const std::size_t last = tables.front().horizon() - 1;
      const double exact_diff = (*q_fixed)(last, s, fact) - (*q_fixed)(last, s, foil);
      const double d = c.cumulative_return_diff.back();
      const bool agrees = (d > 0.0) == (exact_diff > 0.0);
      writer.contrast(c, stem(fact) + "_vs_" + std::string(taxi::action_name(foil)),
                      {{"exact_fixed_horizon_q_diff", exact_diff}, {"sign_agrees", agrees}});
      std::printf("\ncumulative expected return difference D(H-1) = %.4f; exact fixed-horizon Q difference = %.4f "
                  "(%s)\n",
                  d, exact_diff, agrees ? "signs agree" : "SIGNS DISAGREE");
      continue;
    }

    std::vector<ActionId> actions;
    for (const auto& a : o.actions) actions.push_back(parse_action_arg(a));
    if (actions.empty()) {
      if (art.mdp.is_terminal(s)) throw Error(ErrorKind::TerminalState, "state " + std::to_string(s) + " is terminal");
      actions.push_back(art.policy.mode(s));
    }
    for (ActionId a : actions) {
      require_valid(art.mdp, s, a);
      const auto e = explain(tables, s, a, rewards, gamma, provenance);
      print_explanation(e);
      writer.explanation(e, stem(a), complete);
    }
  }
  std::printf("\nwrote %s\n", writer.dir.string().c_str());
}

}  // namespace

void add_explain(CLI::App& app) {
  auto o = std::make_shared<ExplainOptions>();
  auto* cmd = app.add_subcommand("explain", "Explain state-action pairs with expected future outcomes");
  cmd->add_option("-t,--tables", o->tables, "Explainer directory (a seed-<n> directory or its parent)");
  cmd->add_option("-p,--policy", o->policy, "Policy artifact (default: the one recorded with the tables)");
  cmd->add_option("-s,--state", o->states, "State id or row,col,fuel,passenger (repeatable)")->required();
  cmd->add_option("-a,--action", o->actions, "Action(s) to explain (default: the policy's action)");
  cmd->add_option("--contrast", o->contrast, "Contrast FACT with FOIL")->expected(2);
  cmd->add_flag("--oracle", o->oracle, "Use exact dynamic-programming tables");
  cmd->add_option("-f,--format", o->formats, "Output formats: json,csv,svg")->delimiter(',');
  cmd->add_option("-o,--out", o->out, "Output directory (default $EFO_OUTPUT_DIR or ./efo-out)");
  cmd->callback([o] { run_explain(*o); });
}

}  // namespace efo::cli
