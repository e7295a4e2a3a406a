#include <doctest.h>

#include <cmath>

#include "efo/error.hpp"
#include "efo/fhtd.hpp"
#include "efo/oracle.hpp"
#include "../support/fixtures.hpp"

using namespace efo;
using efo::testing::max_abs_diff;

namespace {

double learned_error(const testing::RandomModel& m, std::uint64_t steps, std::uint64_t seed) {
  FhtdConfig c;
  c.horizon = 5;
  c.learning_rate = LearningRateSchedule::make_polynomial(0.7);
  c.exploration_rate = 1.0;
  c.total_steps = steps;
  const auto learned = train_explainer(m.mdp, m.target, "enter0", c, RunSeed{seed});
  const auto exact = exact_fhgvf(m.mdp, m.target, "enter0", 5, 1.0);
  return max_abs_diff(learned.data(), exact.data());
}

}  // namespace

TEST_CASE("single FHTD backups") {
  SUBCASE("level 0 target is the outcome alone") {
    FhgvfTable t("o", 1, 2, 1, 1.0);
    fhtd_update(t, Transition{0, 0, 1, 0.0, {}, false}, 1.0, 0, 0.1);
    CHECK(t(0, 0, 0) == doctest::Approx(0.1));
  }
  SUBCASE("level 1 bootstraps from level 0 at the next pair") {
    FhgvfTable t("o", 2, 2, 1, 1.0);
    t(0, 1, 0) = 0.5;
    fhtd_update(t, Transition{0, 0, 1, 0.0, {}, false}, 0.0, 0, 0.1);
    CHECK(t(1, 0, 0) == doctest::Approx(0.05));
    CHECK(t(0, 0, 0) == 0.0);
  }
  SUBCASE("terminal transition: every level targets the outcome") {
    FhgvfTable t("o", 4, 2, 1, 1.0);
    for (std::size_t h = 0; h < 4; ++h) t(h, 1, 0) = 3.0;
    fhtd_update(t, Transition{0, 0, 1, 0.0, {}, true}, 1.0, 0, 1.0);
    for (std::size_t h = 0; h < 4; ++h) CHECK(t(h, 0, 0) == 1.0);
  }
  SUBCASE("levels read pre-update values on a self-loop") {
    FhgvfTable t("o", 3, 1, 1, 1.0);
    fhtd_update(t, Transition{0, 0, 0, 0.0, {}, false}, 1.0, 0, 1.0);
    CHECK(t(0, 0, 0) == 1.0);
    CHECK(t(1, 0, 0) == 1.0);
    CHECK(t(2, 0, 0) == 1.0);
  }
  SUBCASE("expected backup averages over the target policy") {
    FhgvfTable t("o", 2, 2, 2, 1.0);
    t(0, 1, 0) = 1.0;
    t(0, 1, 1) = 3.0;
    Policy pi(2, 2);
    pi.set(1, 0, 0.25);
    pi.set(1, 1, 0.75);
    fhtd_update_expected(t, Transition{0, 0, 1, 0.0, {}, false}, 0.0, pi, 1.0);
    CHECK(t(1, 0, 0) == doctest::Approx(2.5));
  }
}

TEST_CASE("horizon 0 is a configuration error") {
  CHECK_THROWS_AS(FhgvfTable("o", 0, 2, 1, 1.0), Error);
  FhtdConfig c;
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("learning-rate schedules") {
  const auto poly = LearningRateSchedule::make_polynomial(0.7);
  CHECK(poly(0) == 1.0);
  for (std::uint64_t n = 0; n < 10000; n += 37) CHECK(poly(n + 1) < poly(n));
  CHECK(poly(999) == doctest::Approx(std::pow(1000.0, -0.7)));
  CHECK_THROWS_AS(LearningRateSchedule::make_polynomial(0.5).validate(), Error);
  CHECK_THROWS_AS(LearningRateSchedule::make_polynomial(1.2).validate(), Error);
  CHECK_NOTHROW(LearningRateSchedule::make_polynomial(1.0).validate());
  CHECK(LearningRateSchedule::make_constant(0.1)(123) == 0.1);
}

TEST_CASE("behaviour policy mixes uniform exploration over valid actions") {
  const auto m = testing::random_model(2);
  Policy greedy(3, 2);
  for (StateId s = 0; s < 3; ++s) greedy.set(s, 0, 1.0);
  const BehaviorPolicy b(m.mdp, greedy, 0.2);
  CHECK(b.prob(0, 0) == doctest::Approx(0.9));
  CHECK(b.prob(0, 1) == doctest::Approx(0.1));
  CHECK_THROWS_AS(BehaviorPolicy(m.mdp, greedy, 1.5), Error);
}

TEST_CASE("two-state chain converges within 1e-2 after 1e5 updates") {
  const auto mdp = testing::two_state_chain();
  const Policy pi = Policy::uniform(mdp);
  FhtdConfig c;
  c.horizon = 5;
  c.total_steps = 100'000;
  const auto learned = train_explainer(mdp, pi, "enter_b", c, RunSeed{0});
  const auto exact = exact_fhgvf(mdp, pi, "enter_b", 5, 1.0);
  CHECK(max_abs_diff(learned.data(), exact.data()) <= 1e-2);
}

TEST_CASE("without exploration the off-policy action is never updated") {
  const auto m = testing::random_model(4);
  Policy greedy(3, 2);
  for (StateId s = 0; s < 3; ++s) greedy.set(s, 0, 1.0);
  FhtdConfig c;
  c.horizon = 4;
  c.total_steps = 20'000;
  c.exploration_rate = 0.0;
  const auto t = train_explainer(m.mdp, greedy, "enter0", c, RunSeed{1});
  for (std::size_t h = 0; h < 4; ++h) {
    for (StateId s = 0; s < 3; ++s) {
      CHECK(t(h, s, 1) == 0.0);
      CHECK(t(h, s, 0) != 0.0);
    }
  }
}

TEST_CASE("Robbins-Monro steps with full exploration drive the error below 1e-2") {
  const auto m = testing::random_model(0);
  const double early = learned_error(m, 10'000, 0);
  const double late = learned_error(m, 4'000'000, 0);
  MESSAGE("max error after 1e4 / 4e6 updates: " << early << " / " << late);
  CHECK(late < early);
  CHECK(late <= 1e-2);
}

TEST_CASE("trained tables are bounded and monotone in h for nonnegative outcomes") {
  const auto m = testing::random_model(6);
  FhtdConfig c;
  c.horizon = 8;
  c.total_steps = 1'000'000;
  c.exploration_rate = 1.0;
  c.learning_rate = LearningRateSchedule::make_polynomial(0.7);
  const auto t = train_explainer(m.mdp, m.target, "enter0", c, RunSeed{6});
  for (StateId s = 0; s < 3; ++s) {
    for (ActionId a = 0; a < 2; ++a) {
      for (std::size_t h = 0; h < c.horizon; ++h) {
        CHECK(t(h, s, a) >= -0.05);
        CHECK(t(h, s, a) <= double(h + 1) + 0.05);
        if (h > 0) CHECK(t(h, s, a) >= t(h - 1, s, a) - 5e-2);
      }
    }
  }
}

TEST_CASE("determinism, shared trajectories and resume") {
  const auto m = testing::random_model(8);
  FhtdConfig c;
  c.horizon = 4;
  c.total_steps = 50'000;
  const auto a = train_explainer(m.mdp, m.target, "enter0", c, RunSeed{3});
  const auto b = train_explainer(m.mdp, m.target, "enter0", c, RunSeed{3});
  CHECK(a.data() == b.data());
  const auto other = train_explainer(m.mdp, m.target, "enter0", c, RunSeed{4});
  CHECK(a.data() != other.data());

  SUBCASE("resuming continues the step count") {
    FhtdLearner first(m.mdp, m.target, {"enter0"}, c);
    first.train(1000, RunSeed{3});
    std::vector<std::uint64_t> visits = first.visits().front();
    FhtdLearner resumed(m.mdp, m.target, first.tables(), visits, first.steps_done(), c);
    resumed.train(1000, RunSeed{3});
    CHECK(resumed.steps_done() == 2000);
    std::uint64_t total = 0;
    for (auto v : resumed.visits().front()) total += v;
    CHECK(total == 2000);

    FhtdLearner straight(m.mdp, m.target, {"enter0"}, c);
    straight.train(1000, RunSeed{3});
    straight.train(1000, RunSeed{3});
    CHECK(straight.tables().front().data() == resumed.tables().front().data());
  }
  SUBCASE("unknown outcome") {
    CHECK_THROWS_AS(FhtdLearner(m.mdp, m.target, {"nope"}, c), Error);
  }
}
