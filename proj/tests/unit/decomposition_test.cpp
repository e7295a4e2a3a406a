#include <doctest.h>

#include <cmath>

#include "efo/decomposition.hpp"
#include "efo/error.hpp"
#include "../support/fixtures.hpp"

using namespace efo;

namespace {

EfoMatrix events(std::string name, std::vector<double> values) {
  return {std::move(name), 1.0, std::move(values), Provenance::Learned};
}

}  // namespace

TEST_CASE("forward substitution examples") {
  const std::vector<double> q1 = {0.2, 0.5, 0.5};
  const auto o1 = decompose_fhgvf(q1, 1.0);
  CHECK(o1.values[0] == doctest::Approx(0.2));
  CHECK(o1.values[1] == doctest::Approx(0.3));
  CHECK(o1.values[2] == doctest::Approx(0.0));

  const std::vector<double> q2 = {1.0, 1.5};
  const auto o2 = decompose_fhgvf(q2, 0.5);
  CHECK(o2.values == std::vector<double>{1.0, 1.0});

  CHECK_THROWS_AS(decompose_fhgvf(q2, 0.0), Error);
  try {
    (void)decompose_fhgvf(q2, 0.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDiscount);
  }
}

TEST_CASE("triangular round trip on random vectors") {
  Rng rng = RunSeed{0}.stream(StreamPurpose::Testing);
  for (double gamma : {0.5, 0.9, 1.0}) {
    for (int trial = 0; trial < 1000; ++trial) {
      // FHGVF -> EFO -> FHGVF, full horizon
      std::vector<double> q(30);
      for (double& x : q) x = rng.uniform() * 60.0 - 30.0;
      CHECK(testing::max_abs_diff(q, reconstruct_fhgvf(decompose_fhgvf(q, gamma).values, gamma)) <= 1e-12);

      // EFO -> FHGVF -> EFO divides rounding noise by gamma^h, so keep h small
      std::vector<double> o(1 + rng.below(10));
      for (double& x : o) x = rng.uniform() * 2.0 - 1.0;
      CHECK(testing::max_abs_diff(o, decompose_fhgvf(reconstruct_fhgvf(o, gamma), gamma).values) <= 1e-12);
    }
  }
}

TEST_CASE("terminated by exclusion") {
  const std::vector<EfoMatrix> ev = {events("a", {0.4, 0.1, -0.05}), events("b", {0.3, 0.0, 0.0})};
  const auto t = terminated_by_exclusion(ev);
  CHECK(t.raw[0] == doctest::Approx(0.3));
  CHECK(t.raw[1] == doctest::Approx(0.9));
  CHECK(t.raw[2] == doctest::Approx(1.05));
  CHECK(t.clamped[2] == doctest::Approx(1.0));
  CHECK(t.events_clamped[0][2] == 0.0);
  CHECK(t.out_of_range);
  for (std::size_t h = 0; h < 3; ++h) {
    double total = t.clamped[h];
    for (const auto& e : t.events_clamped) total += e[h];
    CHECK(total >= 1.0 - 1e-12);
  }

  const std::vector<EfoMatrix> clean = {events("a", {0.5, 0.2}), events("b", {0.2, 0.3})};
  const auto c = terminated_by_exclusion(clean);
  CHECK_FALSE(c.out_of_range);
  CHECK(c.raw == c.clamped);
}

TEST_CASE("reward reconstruction") {
  const std::vector<EfoMatrix> ev = {events("dropoff", {0.5, 0.0, 0.25}), events("move", {0.5, 1.0, 0.0})};
  const std::map<std::string, double> rewards = {{"dropoff", 20.0}, {"move", -1.0}};
  const auto r = reconstruct_rewards(ev, rewards, 0.9);
  CHECK(r.components[0][0] == doctest::Approx(10.0));
  CHECK(r.total[0] == doctest::Approx(9.5));
  CHECK(r.total[1] == doctest::Approx(-1.0));
  CHECK(r.discounted_value == doctest::Approx(9.5 - 0.9 + 0.81 * 5.0));
  CHECK(r.cumulative_return.back() == doctest::Approx(r.discounted_value));
  CHECK(r.occupancies[0] == doctest::Approx(0.5 + 0.81 * 0.25));
  double via_occupancy = 0.0;
  for (std::size_t k = 0; k < 2; ++k) via_occupancy += rewards.at(ev[k].outcome_name) * r.occupancies[k];
  CHECK(via_occupancy == doctest::Approx(r.discounted_value));
  CHECK(r.remainder_bound == doctest::Approx(std::pow(0.9, 3) / 0.1));
  CHECK_FALSE(r.remainder_unbounded);

  SUBCASE("all-zero events give zero reward") {
    const std::vector<EfoMatrix> zero = {events("dropoff", {0, 0}), events("move", {0, 0})};
    const auto z = reconstruct_rewards(zero, rewards, 0.99);
    CHECK(z.total == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("undiscounted remainder is unbounded") {
    const auto u = reconstruct_rewards(ev, rewards, 1.0);
    CHECK(u.remainder_unbounded);
    CHECK(std::isinf(remainder_bound(1.0, 30)));
    CHECK(remainder_bound(0.99, 30) == doctest::Approx(73.97).epsilon(1e-3));
  }
  SUBCASE("missing reward is a taxonomy error") {
    try {
      (void)reconstruct_rewards(ev, {{"dropoff", 20.0}}, 0.9);
      FAIL("expected taxonomy error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Taxonomy);
    }
  }
}

TEST_CASE("contrastive explanations") {
  FhgvfTable a("dropoff", 3, 1, 2, 1.0);
  FhgvfTable b("move", 3, 1, 2, 1.0);
  const std::vector<double> qa0 = {0.0, 0.1, 0.6}, qa1 = {0.0, 0.0, 0.2};
  const std::vector<double> qb0 = {1.0, 1.9, 2.3}, qb1 = {1.0, 2.0, 2.8};
  for (std::size_t h = 0; h < 3; ++h) {
    a(h, 0, 0) = qa0[h];
    a(h, 0, 1) = qa1[h];
    b(h, 0, 0) = qb0[h];
    b(h, 0, 1) = qb1[h];
  }
  const std::vector<FhgvfTable> tables = {a, b};
  const std::map<std::string, double> rewards = {{"dropoff", 20.0}, {"move", -1.0}};
  const auto e0 = explain(tables, 0, 0, rewards, 0.99, Provenance::Learned);
  const auto e1 = explain(tables, 0, 1, rewards, 0.99, Provenance::Learned);

  const auto same = contrastive(e0, e0);
  for (double d : same.cumulative_return_diff) CHECK(d == 0.0);
  for (const auto& row : same.event_diffs)
    for (double d : row) CHECK(d == 0.0);

  const auto ab = contrastive(e0, e1);
  const auto ba = contrastive(e1, e0);
  for (std::size_t h = 0; h < 3; ++h) {
    CHECK(ab.cumulative_return_diff[h] == doctest::Approx(-ba.cumulative_return_diff[h]));
    CHECK(ab.reward_diff[h] == doctest::Approx(-ba.reward_diff[h]));
    CHECK(ab.terminated_diff[h] == doctest::Approx(-ba.terminated_diff[h]));
  }
  CHECK(ab.cumulative_return_diff.back() ==
        doctest::Approx(e0.rewards.discounted_value - e1.rewards.discounted_value));

  SUBCASE("horizon mismatch") {
    auto shorter = e1;
    for (auto& ev : shorter.events) ev.values.pop_back();
    CHECK_THROWS_AS(contrastive(e0, shorter), Error);
  }
}
