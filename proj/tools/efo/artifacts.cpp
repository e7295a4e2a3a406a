#include "artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include "efo/error.hpp"
#include "efo/table_io.hpp"

namespace efo::cli {

namespace fs = std::filesystem;

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirVariable); env && *env) return env;
  return "efo-out";
}

PolicyArtifact load_policy_artifact(const fs::path& path) {
  auto meta = read_json(sidecar_path(path));
  if (meta.value("kind", "") != "policy") {
    throw Error(ErrorKind::ArtifactFormat, "'" + path.string() + "' is not a policy artifact");
  }
  if (!meta.contains("env")) throw Error(ErrorKind::ArtifactFormat, "policy sidecar has no env config");
  auto env = taxi::config_from_json(meta.at("env"));
  auto mdp = taxi::build_taxi_mdp(env);
  auto policy = load_policy(path);
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw Error(ErrorKind::ArtifactFormat, "policy shape does not match the environment");
  }
  try {
    validate_policy(mdp, policy);
  } catch (const Error& e) {
    throw Error(ErrorKind::ArtifactFormat, std::string("policy artifact is not a valid policy: ") + e.what());
  }
  return {std::move(env), std::move(mdp), std::move(policy), std::move(meta)};
}

void save_explainer_set(const fs::path& dir, const ExplainerSet& set, const nlohmann::json& provenance) {
  fs::create_directories(dir);
  std::vector<std::string> events;
  for (const auto& t : set.tables) {
    auto meta = provenance;
    meta["provenance"] = "learned";
    meta["seed"] = set.seed;
    meta["steps"] = set.steps_done;
    save_fhgvf(dir / (t.outcome_name() + ".tpd"), t, meta);
    events.push_back(t.outcome_name());
  }
  const auto& first = set.tables.front();
  RawTable visits{static_cast<std::uint32_t>(set.tables.size()), static_cast<std::uint32_t>(first.num_states()),
                  static_cast<std::uint32_t>(first.num_actions()), {}};
  visits.values.assign(set.visits.begin(), set.visits.end());
  write_table(dir / "visits.tpd", visits);
  auto learner = provenance;
  learner["kind"] = "explainer_set";
  learner["events"] = events;
  learner["seed"] = set.seed;
  learner["steps"] = set.steps_done;
  learner["explainer"] = fhtd_to_json(set.config);
  write_json(dir / "learner.json", learner);
}

ExplainerSet load_explainer_set(const fs::path& dir) {
  ExplainerSet set;
  set.metadata = read_json(dir / "learner.json");
  try {
    if (set.metadata.at("kind") != "explainer_set") {
      throw Error(ErrorKind::ArtifactFormat, "'" + dir.string() + "/learner.json' is not an explainer set");
    }
    set.seed = set.metadata.at("seed").get<std::uint64_t>();
    set.steps_done = set.metadata.at("steps").get<std::uint64_t>();
    set.config = fhtd_from_json(set.metadata.at("explainer"));
    for (const auto& name : set.metadata.at("events").get<std::vector<std::string>>()) {
      set.tables.push_back(load_fhgvf(dir / (name + ".tpd")).table);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ArtifactFormat, "'" + dir.string() + "/learner.json': " + e.what());
  }
  if (fs::exists(dir / "visits.tpd")) {
    const auto raw = read_table(dir / "visits.tpd");
    if (raw.horizon != set.tables.size()) throw Error(ErrorKind::ArtifactFormat, "visits.tpd does not match the tables");
    set.visits.reserve(raw.values.size());
    for (double v : raw.values) set.visits.push_back(static_cast<std::uint64_t>(v));
  }
  return set;
}

std::vector<fs::path> explainer_dirs(const fs::path& root) {
  if (fs::exists(root / "learner.json")) return {root};
  std::vector<std::pair<std::uint64_t, fs::path>> found;
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      const auto name = entry.path().filename().string();
      std::uint64_t seed = 0;
      if (name.rfind("seed-", 0) != 0 || !fs::exists(entry.path() / "learner.json")) continue;
      const auto [ptr, ec] = std::from_chars(name.data() + 5, name.data() + name.size(), seed);
      if (ec == std::errc() && ptr == name.data() + name.size()) found.emplace_back(seed, entry.path());
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [_, p] : found) out.push_back(std::move(p));
  return out;
}

std::map<std::string, double> event_rewards(const std::vector<std::string>& events) {
  std::map<std::string, double> out;
  for (const auto& name : events) {
    const auto e = taxi::parse_event(name);
    if (!e) throw Error(ErrorKind::Taxonomy, "no reward for event '" + name + "'");
    out[name] = taxi::event_reward(*e);
  }
  return out;
}

void check_event_names(const std::vector<std::string>& events) {
  if (events.empty()) throw Error(ErrorKind::Configuration, "the event list is empty");
  const auto& valid = taxi::default_event_names();
  for (const auto& e : events) {
    if (std::find(valid.begin(), valid.end(), e) == valid.end()) {
      std::string names;
      for (const auto& v : valid) names += (names.empty() ? "" : ", ") + v;
      throw Error(ErrorKind::Configuration, "unknown event '" + e + "'; valid events: " + names);
    }
  }
}

ActionId parse_action_arg(const std::string& text) {
  if (const auto a = taxi::parse_action(text)) return *a;
  ActionId id = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec == std::errc() && ptr == text.data() + text.size() && id < taxi::kNumActions) return id;
  throw Error(ErrorKind::Configuration,
              "unknown action '" + text + "'; use south, north, east, west, pickup, dropoff, refuel or 0-6");
}

void require_valid(const TabularMdp& mdp, StateId s, ActionId a) {
  if (mdp.is_terminal(s)) throw Error(ErrorKind::TerminalState, "state " + std::to_string(s) + " is terminal");
  if (mdp.is_valid(s, a)) return;
  std::string names;
  for (ActionId v : mdp.valid_actions(s)) names += (names.empty() ? "" : ", ") + std::string(taxi::action_name(v));
  throw Error(ErrorKind::MaskedAction, "action '" + std::string(taxi::action_name(a)) + "' is masked in state " +
                                           std::to_string(s) + "; valid actions: " + names);
}

ActionNamer taxi_action_namer() {
  return [](ActionId a) { return std::string(taxi::action_name(a)); };
}

}  // namespace efo::cli
