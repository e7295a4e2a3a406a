#include "efo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "efo/decomposition.hpp"
#include "efo/error.hpp"

namespace efo {

std::vector<StateId> collect_eval_states(const TabularMdp& mdp, const Policy& policy, std::size_t num_episodes,
                                         Rng rng) {
  std::vector<std::uint8_t> seen(mdp.num_states(), 0);
  for (std::size_t episode = 0; episode < num_episodes; ++episode) {
    StateId s = mdp.sample_initial_state(rng);
    for (std::size_t t = 0; t < mdp.max_episode_steps(); ++t) {
      seen[s] = 1;
      const Transition tr = mdp.sample_transition(s, policy_sample(policy, s, rng), rng);
      if (tr.done) break;
      s = tr.next;
    }
  }
  std::vector<StateId> states;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (seen[s]) states.push_back(s);
  }
  return states;
}

std::vector<OutcomeErrors> compute_errors(std::span<const FhgvfTable> learned, std::span<const FhgvfTable> oracle,
                                          std::span<const StateId> states, const Policy& policy, const TabularMdp& mdp) {
  std::vector<OutcomeErrors> out;
  for (const auto& table : learned) {
    const auto match = std::find_if(oracle.begin(), oracle.end(),
                                    [&](const FhgvfTable& o) { return o.outcome_name() == table.outcome_name(); });
    if (match == oracle.end()) throw Error(ErrorKind::Shape, "no oracle table for '" + table.outcome_name() + "'");
    if (match->horizon() != table.horizon() || match->num_states() != table.num_states() ||
        match->num_actions() != table.num_actions() || match->discount() != table.discount() ||
        table.num_states() != mdp.num_states() || table.num_actions() != mdp.num_actions()) {
      throw Error(ErrorKind::Shape, "learned and oracle tables for '" + table.outcome_name() + "' differ in shape");
    }
    OutcomeErrors errors{table.outcome_name()};
    double pi_sum = 0.0;
    double pibar_sum = 0.0;
    for (StateId s : states) {
      if (mdp.is_terminal(s)) continue;
      for (ActionId a : mdp.valid_actions(s)) {
        const auto approx = decompose_fhgvf(table.series(s, a), table.discount());
        const auto exact = decompose_fhgvf(match->series(s, a), match->discount());
        const bool on_policy = policy.prob(s, a) > 0.0;
        for (std::size_t h = 0; h < table.horizon(); ++h) {
          const double e = approx.values[h] - exact.values[h];
          if (on_policy) {
            pi_sum += e * e;
            errors.pi_inf = std::max(errors.pi_inf, std::abs(e));
            ++errors.pi_count;
          } else {
            pibar_sum += e * e;
            errors.pibar_inf = std::max(errors.pibar_inf, std::abs(e));
            ++errors.pibar_count;
          }
        }
      }
    }
    if (errors.pi_count > 0) errors.pi_mse = pi_sum / static_cast<double>(errors.pi_count);
    if (errors.pibar_count > 0) errors.pibar_mse = pibar_sum / static_cast<double>(errors.pibar_count);
    out.push_back(std::move(errors));
  }
  return out;
}

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::optional<ReferenceErrors> reference_errors(const std::string& outcome) {
  static const std::map<std::string, ReferenceErrors> table = {
      {"dropoff", {1.86e-4, 1.10e-4, 1.20e-1, 4.40e-1}}, {"pickup", {1.03e-4, 9.17e-5, 1.78e-1, 2.09e-1}},
      {"refuel", {4.48e-5, 1.60e-4, 2.28e-1, 2.05e-1}},  {"failure", {3.75e-6, 7.39e-6, 1.68e-1, 3.36e-1}},
      {"traffic", {2.46e-4, 2.42e-4, 2.80e-1, 4.77e-1}}, {"move", {4.91e-4, 5.86e-4, 2.80e-1, 7.77e-1}},
  };
  const auto it = table.find(outcome);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

EvalReport aggregate(std::vector<RunErrors> runs, std::size_t episodes, std::uint64_t training_steps,
                     std::size_t horizon) {
  EvalReport report;
  report.episodes = episodes;
  report.training_steps = training_steps;
  report.horizon = horizon;
  if (!runs.empty()) {
    for (std::size_t k = 0; k < runs.front().outcomes.size(); ++k) {
      std::vector<double> pi_mse, pibar_mse, pi_inf, pibar_inf;
      const std::string& name = runs.front().outcomes[k].outcome;
      for (const auto& run : runs) {
        if (run.outcomes.size() != runs.front().outcomes.size() || run.outcomes[k].outcome != name) {
          throw Error(ErrorKind::Shape, "runs report different outcomes");
        }
        pi_mse.push_back(run.outcomes[k].pi_mse);
        pibar_mse.push_back(run.outcomes[k].pibar_mse);
        pi_inf.push_back(run.outcomes[k].pi_inf);
        pibar_inf.push_back(run.outcomes[k].pibar_inf);
      }
      report.summary.push_back({name, mean_std(pi_mse), mean_std(pibar_mse), mean_std(pi_inf), mean_std(pibar_inf)});
    }
  }
  report.runs = std::move(runs);
  return report;
}

namespace {

nlohmann::json mean_std_json(const MeanStd& m) {
  return {{"mean", m.mean}, {"std", m.stddev ? nlohmann::json(*m.stddev) : nlohmann::json(nullptr)}};
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string cell(const MeanStd& m) {
  return m.stddev ? sci(m.mean) + " +- " + sci(*m.stddev) : sci(m.mean);
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : report.runs) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (const auto& o : run.outcomes) {
      outcomes.push_back({{"outcome", o.outcome},
                          {"pi_mse", o.pi_mse},
                          {"pibar_mse", o.pibar_mse},
                          {"pi_inf", o.pi_inf},
                          {"pibar_inf", o.pibar_inf},
                          {"pi_count", o.pi_count},
                          {"pibar_count", o.pibar_count}});
    }
    runs.push_back({{"seed", run.seed}, {"num_states", run.num_states}, {"outcomes", outcomes}});
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : report.summary) {
    nlohmann::json entry = {{"outcome", s.outcome},
                            {"pi_mse", mean_std_json(s.pi_mse)},
                            {"pibar_mse", mean_std_json(s.pibar_mse)},
                            {"pi_inf", mean_std_json(s.pi_inf)},
                            {"pibar_inf", mean_std_json(s.pibar_inf)}};
    if (const auto ref = reference_errors(s.outcome)) {
      entry["reference"] = {{"pi_mse", ref->pi_mse},
                            {"pibar_mse", ref->pibar_mse},
                            {"pi_inf", ref->pi_inf},
                            {"pibar_inf", ref->pibar_inf}};
    }
    summary.push_back(std::move(entry));
  }
  return {{"metadata",
           {{"episodes", report.episodes},
            {"training_steps", report.training_steps},
            {"horizon", report.horizon},
            {"num_runs", report.runs.size()},
            {"pooling", report.pooling}}},
          {"runs", runs},
          {"summary", summary}};
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "run,seed,outcome,pi_mse,pibar_mse,pi_inf,pibar_inf\n";
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    for (const auto& o : report.runs[r].outcomes) {
      out << r << ',' << report.runs[r].seed << ',' << o.outcome << ',' << o.pi_mse << ',' << o.pibar_mse << ','
          << o.pi_inf << ',' << o.pibar_inf << '\n';
    }
  }
  for (const auto& s : report.summary) {
    out << "mean,," << s.outcome << ',' << s.pi_mse.mean << ',' << s.pibar_mse.mean << ',' << s.pi_inf.mean << ','
        << s.pibar_inf.mean << '\n';
  }
  for (const auto& s : report.summary) {
    auto sd = [](const MeanStd& m) { return m.stddev ? *m.stddev : 0.0; };
    if (!s.pi_mse.stddev) continue;
    out << "std,," << s.outcome << ',' << sd(s.pi_mse) << ',' << sd(s.pibar_mse) << ',' << sd(s.pi_inf) << ','
        << sd(s.pibar_inf) << '\n';
  }
  return out.str();
}

std::string render_report(const EvalReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s| %-24s| %-24s| %-24s| %-24s\n", "Outcome", "pi-MSE", "pibar-MSE",
                "pi-||.||inf", "pibar-||.||inf");
  out << line << std::string(110, '=') << '\n';
  for (const auto& s : report.summary) {
    std::snprintf(line, sizeof line, "%-10s| %-24s| %-24s| %-24s| %-24s\n", s.outcome.c_str(), cell(s.pi_mse).c_str(),
                  cell(s.pibar_mse).c_str(), cell(s.pi_inf).c_str(), cell(s.pibar_inf).c_str());
    out << line;
    if (const auto ref = reference_errors(s.outcome)) {
      std::snprintf(line, sizeof line, "%-10s| %-24s| %-24s| %-24s| %-24s\n", "  (ref)", sci(ref->pi_mse).c_str(),
                    sci(ref->pibar_mse).c_str(), sci(ref->pi_inf).c_str(), sci(ref->pibar_inf).c_str());
      out << line;
    }
  }
  out << "runs: " << report.runs.size() << ", episodes: " << report.episodes << ", horizon: " << report.horizon
      << ", training steps: " << report.training_steps << ", errors " << report.pooling << '\n';
  return out.str();
}

}  // namespace efo
