#include "run_config.hpp"

#include <fstream>
#include <set>

#include "efo/error.hpp"

namespace efo::cli {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::Configuration, where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw Error(ErrorKind::Configuration, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

nlohmann::json learning_rate_to_json(const LearningRateSchedule& s) {
  if (s.kind == LearningRateSchedule::Kind::Constant) return {{"kind", "constant"}, {"alpha", s.constant}};
  return {{"kind", "polynomial"}, {"exponent", s.exponent}};
}

LearningRateSchedule learning_rate_from_json(const nlohmann::json& j) {
  check_keys(j, {"kind", "alpha", "exponent"}, "explainer.learning_rate");
  LearningRateSchedule s;
  const auto kind = j.value("kind", std::string("constant"));
  if (kind == "constant") {
    s.kind = LearningRateSchedule::Kind::Constant;
  } else if (kind == "polynomial") {
    s.kind = LearningRateSchedule::Kind::Polynomial;
  } else {
    throw Error(ErrorKind::Configuration, "learning_rate.kind must be constant or polynomial");
  }
  read(j, "alpha", s.constant);
  read(j, "exponent", s.exponent);
  return s;
}

}  // namespace

nlohmann::json fhtd_to_json(const FhtdConfig& c) {
  return {{"horizon", c.horizon},
          {"total_steps", c.total_steps},
          {"discount", c.discount},
          {"learning_rate", learning_rate_to_json(c.learning_rate)},
          {"exploration_rate", c.exploration_rate},
          {"expected_backup", c.expected_backup},
          {"shared_trajectories", c.shared_trajectories}};
}

FhtdConfig fhtd_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"horizon", "total_steps", "discount", "learning_rate", "exploration_rate", "expected_backup",
              "shared_trajectories"},
             "explainer");
  FhtdConfig c;
  read(j, "horizon", c.horizon);
  read(j, "total_steps", c.total_steps);
  read(j, "discount", c.discount);
  if (j.contains("learning_rate")) c.learning_rate = learning_rate_from_json(j.at("learning_rate"));
  read(j, "exploration_rate", c.exploration_rate);
  read(j, "expected_backup", c.expected_backup);
  read(j, "shared_trajectories", c.shared_trajectories);
  c.validate();
  return c;
}

RunConfig config_from_json(const nlohmann::json& j) {
  check_keys(j, {"env", "q_learning", "explainer", "events", "seeds", "evaluation"}, "config");
  RunConfig c;
  try {
    if (j.contains("env")) c.env = taxi::config_from_json(j.at("env"));
    c.q_learning.discount = c.env.discount;
    if (j.contains("q_learning")) {
      const auto& q = j.at("q_learning");
      check_keys(q, {"total_steps", "discount", "learning_rate", "epsilon"}, "q_learning");
      read(q, "total_steps", c.q_learning.total_steps);
      read(q, "discount", c.q_learning.discount);
      read(q, "learning_rate", c.q_learning.learning_rate);
      if (q.contains("epsilon")) {
        const auto& e = q.at("epsilon");
        check_keys(e, {"start", "final", "decay_steps"}, "q_learning.epsilon");
        read(e, "start", c.q_learning.epsilon.start);
        read(e, "final", c.q_learning.epsilon.final);
        read(e, "decay_steps", c.q_learning.epsilon.decay_steps);
      }
    }
    c.q_learning.validate();
    if (j.contains("explainer")) c.explainer = fhtd_from_json(j.at("explainer"));
    if (j.contains("events")) c.events = j.at("events").get<std::vector<std::string>>();
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      check_keys(s, {"policy", "explainers"}, "seeds");
      read(s, "policy", c.policy_seed);
      read(s, "explainers", c.explainer_seeds);
    }
    if (j.contains("evaluation")) {
      const auto& e = j.at("evaluation");
      check_keys(e, {"episodes", "runs"}, "evaluation");
      read(e, "episodes", c.eval_episodes);
      read(e, "runs", c.eval_runs);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  return {{"env", taxi::config_to_json(c.env)},
          {"q_learning",
           {{"total_steps", c.q_learning.total_steps},
            {"discount", c.q_learning.discount},
            {"learning_rate", c.q_learning.learning_rate},
            {"epsilon",
             {{"start", c.q_learning.epsilon.start},
              {"final", c.q_learning.epsilon.final},
              {"decay_steps", c.q_learning.epsilon.decay_steps}}}}},
          {"explainer", fhtd_to_json(c.explainer)},
          {"events", c.events},
          {"seeds", {{"policy", c.policy_seed}, {"explainers", c.explainer_seeds}}},
          {"evaluation", {{"episodes", c.eval_episodes}, {"runs", c.eval_runs}}}};
}

RunConfig load_config(const std::filesystem::path& path) {
  if (path.empty()) return RunConfig{};
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Configuration, "cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Configuration, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace efo::cli
