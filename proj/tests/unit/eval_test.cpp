#include <doctest.h>

#include <algorithm>
#include <set>

#include "efo/error.hpp"
#include "efo/eval.hpp"
#include "efo/oracle.hpp"
#include "efo/taxi.hpp"
#include "../support/fixtures.hpp"

using namespace efo;

namespace {

/// One state, two valid actions; the policy takes action 0.
struct Tiny {
  TabularMdp mdp;
  Policy pi;
};

Tiny tiny() {
  MdpDefinition d;
  d.num_states = 2;
  d.num_actions = 2;
  d.terminal = {false, true};
  d.valid = {true, true, false, false};
  d.successors.resize(4);
  d.successors[0] = {{1, 1.0}};
  d.successors[1] = {{1, 1.0}};
  d.reward = [](StateId, ActionId, StateId) { return 0.0; };
  d.outcomes.push_back(testing::enter_state("e", 1));
  d.initial = {1.0, 0.0};
  TabularMdp mdp(std::move(d));
  Policy pi(2, 2);
  pi.set(0, 0, 1.0);
  return {std::move(mdp), std::move(pi)};
}

}  // namespace

TEST_CASE("collect_eval_states") {
  SUBCASE("deterministic model collects the trajectory") {
    const auto mdp = testing::two_state_chain();
    const auto states = collect_eval_states(mdp, Policy::uniform(mdp), 5, Rng(1));
    CHECK(states == std::vector<StateId>{0});
  }
  SUBCASE("zero episodes") {
    const auto mdp = testing::two_state_chain();
    CHECK(collect_eval_states(mdp, Policy::uniform(mdp), 0, Rng(1)).empty());
  }
  SUBCASE("taxi state set is stable across seeds") {
    const auto mdp = taxi::build_taxi_mdp(taxi::TaxiConfig::defaults());
    const auto vi = value_iteration(mdp, 0.99);
    const auto a = collect_eval_states(mdp, vi.policy, 10'000, RunSeed{1}.stream(StreamPurpose::Evaluation));
    const auto b = collect_eval_states(mdp, vi.policy, 10'000, RunSeed{2}.stream(StreamPurpose::Evaluation));
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::abs(double(a.size()) - double(b.size())) <= 0.05 * double(a.size()));
    for (StateId s : a) CHECK_FALSE(mdp.is_terminal(s));
  }
}

TEST_CASE("compute_errors arithmetic") {
  const auto t = tiny();
  FhgvfTable learned("e", 2, 2, 2, 1.0);
  FhgvfTable oracle("e", 2, 2, 2, 1.0);
  // EFOs [0.1, 0.3] for the on-policy action, learned is all zero.
  oracle(0, 0, 0) = 0.1;
  oracle(1, 0, 0) = 0.4;
  const std::vector<StateId> states = {0};
  const std::vector<FhgvfTable> l = {learned}, o = {oracle};

  const auto errors = compute_errors(l, o, states, t.pi, t.mdp);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].pi_mse == doctest::Approx(0.05));
  CHECK(errors[0].pi_inf == doctest::Approx(0.3));
  CHECK(errors[0].pi_count == 2);
  CHECK(errors[0].pibar_count == 2);
  CHECK(errors[0].pibar_mse == 0.0);

  const auto same = compute_errors(o, o, states, t.pi, t.mdp);
  CHECK(same[0].pi_mse == 0.0);
  CHECK(same[0].pibar_inf == 0.0);

  const std::vector<FhgvfTable> wrong = {FhgvfTable("e", 3, 2, 2, 1.0)};
  CHECK_THROWS_AS(compute_errors(wrong, o, states, t.pi, t.mdp), Error);
}

TEST_CASE("buckets partition the valid actions and metrics ignore state order") {
  const auto mdp = taxi::build_taxi_mdp(taxi::TaxiConfig::defaults());
  const auto vi = value_iteration(mdp, 0.99);
  auto states = collect_eval_states(mdp, vi.policy, 200, Rng(3));
  FhgvfTable zero("pickup", 4, mdp.num_states(), mdp.num_actions(), 1.0);
  const std::vector<FhgvfTable> l = {zero};
  const std::vector<FhgvfTable> o = {exact_fhgvf(mdp, vi.policy, "pickup", 4, 1.0)};
  const auto e = compute_errors(l, o, states, vi.policy, mdp);
  std::size_t valid = 0;
  for (StateId s : states) valid += mdp.valid_actions(s).size();
  CHECK(e[0].pi_count + e[0].pibar_count == valid * 4);
  CHECK(e[0].pi_count == states.size() * 4);
  CHECK(e[0].pi_inf * e[0].pi_inf >= e[0].pi_mse);

  std::reverse(states.begin(), states.end());
  const auto r = compute_errors(l, o, states, vi.policy, mdp);
  CHECK(r[0].pi_mse == doctest::Approx(e[0].pi_mse));
  CHECK(r[0].pibar_inf == e[0].pibar_inf);
}

TEST_CASE("aggregation and reporting") {
  std::vector<RunErrors> runs;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    runs.push_back({seed, 10, {{"dropoff", 1e-4 * double(seed + 1), 2e-4, 0.1, 0.2, 10, 20}}});
  }
  const auto report = aggregate(runs, 100, 5000, 30);
  REQUIRE(report.summary.size() == 1);
  CHECK(report.summary[0].pi_mse.mean == doctest::Approx(2e-4));
  REQUIRE(report.summary[0].pi_mse.stddev.has_value());
  CHECK(*report.summary[0].pi_mse.stddev == doctest::Approx(1e-4));

  std::vector<RunErrors> shuffled = {runs[2], runs[0], runs[1]};
  CHECK(aggregate(shuffled, 100, 5000, 30).summary[0].pi_mse.mean == doctest::Approx(2e-4));

  const auto single = aggregate({runs[0]}, 100, 5000, 30);
  CHECK_FALSE(single.summary[0].pi_mse.stddev.has_value());

  const auto text = render_report(report);
  for (const char* header : {"pi-MSE", "pibar-MSE", "pi-||.||inf", "pibar-||.||inf"}) CHECK(text.find(header) != std::string::npos);
  const auto j = report_to_json(report);
  CHECK(j.contains("runs"));
  CHECK(j.contains("summary"));
  CHECK(report_to_csv(report).find("dropoff") != std::string::npos);
}

TEST_CASE("published reference values") {
  const auto d = reference_errors("dropoff");
  REQUIRE(d.has_value());
  CHECK(d->pi_mse == 1.86e-4);
  CHECK(d->pibar_inf == 4.40e-1);
  CHECK(reference_errors("failure")->pi_mse == 3.75e-6);
  CHECK(reference_errors("move")->pibar_inf == 7.77e-1);
  CHECK_FALSE(reference_errors("terminated").has_value());
}
