#include <doctest.h>

#include <set>

#include "efo/error.hpp"
#include "efo/taxi.hpp"

using namespace efo;
using namespace efo::taxi;

namespace {

const TaxiConfig& config() {
  static const TaxiConfig c = TaxiConfig::defaults();
  return c;
}

const TabularMdp& mdp() {
  static const TabularMdp m = build_taxi_mdp(config());
  return m;
}

ActionId act(Action a) { return static_cast<ActionId>(a); }

}  // namespace

TEST_CASE("state space and action count") {
  CHECK(mdp().num_states() == 1050);
  CHECK(mdp().num_actions() == 7);
  CHECK(action_name(act(Action::Refuel)) == "refuel");
  CHECK(parse_action("east") == act(Action::East));
  CHECK_FALSE(parse_action("teleport").has_value());
}

TEST_CASE("encoding") {
  CHECK(encode_state({0, 0, 0, false}) == 0);
  CHECK(encode_state({4, 4, 20, true}) == 1049);
  Rng rng = RunSeed{9}.stream(StreamPurpose::Testing);
  for (int i = 0; i < 1000; ++i) {
    const TaxiState ts{int(rng.below(5)), int(rng.below(5)), int(rng.below(21)), rng.below(2) == 1};
    CHECK(decode_state(encode_state(ts)) == ts);
  }
  for (StateId id = 0; id < kNumStates; ++id) CHECK(encode_state(decode_state(id)) == id);
  CHECK_THROWS_AS(encode_state({5, 0, 0, false}), Error);
  CHECK_THROWS_AS(encode_state({0, 0, 21, false}), Error);
  CHECK_THROWS_AS(decode_state(1050), Error);
}

TEST_CASE("dropoff at the destination pays +20 and terminates") {
  const StateId s = encode_state({config().destination.row, config().destination.col, 6, true});
  const auto succ = mdp().enumerate_transitions(s, act(Action::Dropoff));
  REQUIRE(succ.size() == 1);
  CHECK(succ[0].reward == 20.0);
  CHECK(mdp().is_terminal(succ[0].next));
  CHECK(classify_event(config(), s, act(Action::Dropoff), succ[0].next) == Event::Dropoff);
}

TEST_CASE("moving on the last unit of fuel fails with -100 whether or not traffic hits") {
  const StateId s = encode_state({2, 2, 1, false});
  const auto succ = mdp().enumerate_transitions(s, act(Action::West));
  REQUIRE(succ.size() == 2);
  for (const auto& e : succ) {
    CHECK(decode_state(e.next).fuel == 0);
    CHECK(e.reward == -100.0);
    CHECK(mdp().is_terminal(e.next));
    CHECK(classify_event(config(), s, act(Action::West), e.next) == Event::Failure);
  }
}

TEST_CASE("classification examples") {
  const StateId s = encode_state({2, 2, 10, true});
  CHECK(classify_event(config(), s, act(Action::North), encode_state({2, 2, 9, true})) == Event::Traffic);
  CHECK(classify_event(config(), s, act(Action::North), encode_state({1, 2, 9, true})) == Event::Move);
  const StateId dead = encode_state({2, 2, 0, true});
  CHECK(classify_event(config(), dead, act(Action::North), dead) == Event::Terminated);
  CHECK_THROWS_AS(classify_event(config(), s, act(Action::North), encode_state({4, 4, 3, false})), Error);
}

TEST_CASE("exhaustive: one label per transition and the label's reward is the transition reward") {
  const auto& names = default_event_names();
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(mdp().outcome_index(n));
  std::set<Event> seen;
  for (StateId s = 0; s < kNumStates; ++s) {
    for (ActionId a = 0; a < kNumActions; ++a) {
      if (!mdp().is_terminal(s) && !mdp().is_valid(s, a)) continue;
      for (const auto& e : mdp().enumerate_transitions(s, a)) {
        const Event ev = classify_event(config(), s, a, e.next);
        seen.insert(ev);
        CHECK(e.reward == event_reward(ev));
        double fired = 0.0;
        for (std::size_t k = 0; k < names.size(); ++k) {
          const double o = e.outcomes[idx[k]];
          CHECK((o == 0.0 || o == 1.0));
          fired += o;
          if (o == 1.0) CHECK(names[k] == event_name(ev));
        }
        CHECK(fired == (ev == Event::Terminated ? 0.0 : 1.0));
      }
    }
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("fuel bookkeeping") {
  for (StateId s = 0; s < kNumStates; ++s) {
    if (mdp().is_terminal(s)) continue;
    const auto fuel = decode_state(s).fuel;
    CHECK_FALSE(mdp().valid_actions(s).empty());
    for (ActionId a : mdp().valid_actions(s)) {
      for (const auto& e : mdp().enumerate_transitions(s, a)) {
        const auto next = decode_state(e.next);
        if (a <= act(Action::West)) CHECK(next.fuel < fuel);
        CHECK(next.fuel <= config().fuel_capacity);
        if (a == act(Action::Refuel)) CHECK(next.fuel == std::min(fuel + 2, config().fuel_capacity));
      }
    }
  }
}

TEST_CASE("masking") {
  const StateId at_pass = encode_state({config().passenger.row, config().passenger.col, 5, false});
  CHECK(mdp().is_valid(at_pass, act(Action::Pickup)));
  CHECK_FALSE(mdp().is_valid(at_pass, act(Action::Dropoff)));
  CHECK_FALSE(mdp().is_valid(encode_state({2, 2, 5, false}), act(Action::Pickup)));
  CHECK_FALSE(mdp().is_valid(encode_state({config().gas_station.row, config().gas_station.col, 20, false}),
                             act(Action::Refuel)));
  // boundary and the wall east of (0,1)
  CHECK_FALSE(mdp().is_valid(encode_state({0, 0, 5, false}), act(Action::North)));
  CHECK_FALSE(mdp().is_valid(encode_state({0, 1, 5, false}), act(Action::East)));
  CHECK_FALSE(mdp().is_valid(encode_state({0, 2, 5, false}), act(Action::West)));
  CHECK(mdp().valid_actions(encode_state({3, 3, 0, false})).empty());
}

TEST_CASE("config validation and JSON round trip") {
  const auto j = config_to_json(config());
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_from_json(nlohmann::json{{"passenger", "B"}}).passenger == Cell{4, 3});

  auto bad = j;
  bad["destination"] = bad["passenger"];
  CHECK_THROWS_AS(config_from_json(bad), Error);
  bad = j;
  bad["traffic_probability"] = 1.0;
  CHECK_THROWS_AS(config_from_json(bad), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), Error);
}

TEST_CASE("state specs and rendering") {
  CHECK(parse_state_spec("17") == 17);
  CHECK(parse_state_spec("2,2,10,0") == encode_state({2, 2, 10, false}));
  CHECK(parse_state_spec("2,2,10,true") == encode_state({2, 2, 10, true}));
  CHECK_THROWS_AS(parse_state_spec("2,2"), Error);
  CHECK_THROWS_AS(parse_state_spec("abc"), Error);
  const auto pic = render_state(config(), encode_state({2, 2, 10, false}));
  CHECK(pic.find('t') != std::string::npos);
  CHECK(pic.find("fuel 10/20") != std::string::npos);
}
