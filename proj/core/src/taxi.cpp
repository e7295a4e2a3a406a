#include "efo/taxi.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "efo/error.hpp"

namespace efo::taxi {

namespace {

constexpr std::array<std::string_view, kNumActions> kActionNames = {"south",  "north",   "east",  "west",
                                                                    "pickup", "dropoff", "refuel"};
constexpr std::array<std::string_view, kNumEvents + 1> kEventNames = {"failure", "dropoff", "pickup",    "refuel",
                                                                      "traffic", "move",    "terminated"};
constexpr std::array<double, kNumEvents + 1> kEventRewards = {-100.0, 20.0, 10.0, -1.0, -1.0, -1.0, 0.0};

bool in_grid(Cell c) { return c.row >= 0 && c.row < kRows && c.col >= 0 && c.col < kCols; }

Cell step(Cell c, ActionId a) {
  switch (static_cast<Action>(a)) {
    case Action::South: return {c.row + 1, c.col};
    case Action::North: return {c.row - 1, c.col};
    case Action::East: return {c.row, c.col + 1};
    case Action::West: return {c.row, c.col - 1};
    default: return c;
  }
}

bool blocked(const TaxiConfig& config, Cell from, Cell to) {
  if (!in_grid(to)) return true;
  // Normalise to (upper/left cell, side).
  Wall w;
  if (from.row == to.row) {
    w = {{from.row, std::min(from.col, to.col)}, Wall::Side::East};
  } else {
    w = {{std::min(from.row, to.row), from.col}, Wall::Side::South};
  }
  return std::find(config.walls.begin(), config.walls.end(), w) != config.walls.end();
}

Cell parse_cell(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "R") return {0, 0};
    if (name == "G") return {0, 4};
    if (name == "Y") return {4, 0};
    if (name == "B") return {4, 3};
    throw Error(ErrorKind::Configuration, "unknown corner '" + name + "' (expected R, G, Y or B)");
  }
  if (j.is_array() && j.size() == 2) return {j[0].get<int>(), j[1].get<int>()};
  throw Error(ErrorKind::Configuration, "cell must be [row, col] or a corner letter");
}

std::vector<double> uniform_fuel(int capacity) {
  std::vector<double> fuel(kFuelLevels, 0.0);
  for (int f = 1; f <= capacity; ++f) fuel[f] = 1.0 / capacity;
  return fuel;
}

}  // namespace

std::string_view action_name(ActionId a) {
  if (a >= kNumActions) throw Error(ErrorKind::Configuration, "unknown action id " + std::to_string(a));
  return kActionNames[a];
}

std::optional<ActionId> parse_action(std::string_view name) {
  for (ActionId a = 0; a < kNumActions; ++a) {
    if (kActionNames[a] == name) return a;
  }
  ActionId value = 0;
  const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), value);
  if (ec == std::errc() && ptr == name.data() + name.size() && value < kNumActions) return value;
  return std::nullopt;
}

StateId encode_state(const TaxiState& ts) {
  if (ts.row < 0 || ts.row >= kRows || ts.col < 0 || ts.col >= kCols || ts.fuel < 0 || ts.fuel >= kFuelLevels) {
    throw Error(ErrorKind::Encoding, "taxi state field out of range");
  }
  return static_cast<StateId>(((ts.row * kCols + ts.col) * kFuelLevels + ts.fuel) * 2 + (ts.passenger_in_taxi ? 1 : 0));
}

TaxiState decode_state(StateId id) {
  if (id >= kNumStates) throw Error(ErrorKind::Encoding, "state id " + std::to_string(id) + " out of range");
  TaxiState ts;
  ts.passenger_in_taxi = (id % 2) != 0;
  id /= 2;
  ts.fuel = static_cast<int>(id % kFuelLevels);
  id /= kFuelLevels;
  ts.col = static_cast<int>(id % kCols);
  ts.row = static_cast<int>(id / kCols);
  return ts;
}

std::string_view event_name(Event e) { return kEventNames[static_cast<std::size_t>(e)]; }

std::optional<Event> parse_event(std::string_view name) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == name) return static_cast<Event>(i);
  }
  return std::nullopt;
}

double event_reward(Event e) { return kEventRewards[static_cast<std::size_t>(e)]; }

const std::vector<std::string>& default_event_names() {
  static const std::vector<std::string> names = {"dropoff", "pickup", "refuel", "failure", "traffic", "move"};
  return names;
}

std::vector<Wall> classic_walls() {
  using S = Wall::Side;
  return {{{0, 1}, S::East}, {{1, 1}, S::East}, {{3, 0}, S::East},
          {{4, 0}, S::East}, {{3, 2}, S::East}, {{4, 2}, S::East}};
}

TaxiConfig TaxiConfig::defaults() {
  TaxiConfig c;
  c.initial_fuel = uniform_fuel(c.fuel_capacity);
  c.initial_cell.assign(kRows * kCols, 1.0 / (kRows * kCols));
  c.walls = classic_walls();
  return c;
}

void TaxiConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Configuration, msg); };
  for (Cell c : {passenger, destination, gas_station}) {
    if (!in_grid(c)) fail("special cell outside the 5x5 grid");
  }
  if (passenger == destination || passenger == gas_station || destination == gas_station) {
    fail("passenger, destination and gas station must be pairwise distinct");
  }
  if (!(traffic_probability >= 0.0 && traffic_probability < 1.0)) fail("traffic_probability must lie in [0, 1)");
  if (fuel_capacity < 1 || fuel_capacity >= kFuelLevels) fail("fuel_capacity must lie in [1, 20]");
  if (refuel_increment < 1) fail("refuel_increment must be positive");
  if (move_fuel_cost < 1) fail("move_fuel_cost must be positive");
  if (max_episode_steps == 0) fail("max_episode_steps must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) fail("discount must lie in (0, 1]");
  if (initial_fuel.size() != static_cast<std::size_t>(kFuelLevels)) fail("initial_fuel needs 21 entries");
  if (initial_cell.size() != static_cast<std::size_t>(kRows * kCols)) fail("initial_cell needs 25 entries");
  auto check_distribution = [&](const std::vector<double>& d, const char* what) {
    double total = 0.0;
    for (double p : d) {
      if (!(p >= 0.0)) fail(std::string(what) + " has a negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) fail(std::string(what) + " does not sum to 1");
  };
  check_distribution(initial_fuel, "initial_fuel");
  check_distribution(initial_cell, "initial_cell");
  if (initial_fuel[0] != 0.0) fail("initial_fuel puts mass on an empty tank");
  for (int f = fuel_capacity + 1; f < kFuelLevels; ++f) {
    if (initial_fuel[f] != 0.0) fail("initial_fuel exceeds fuel_capacity");
  }
  for (const auto& w : walls) {
    if (!in_grid(w.cell)) fail("wall outside the grid");
  }
}

TaxiConfig config_from_json(const nlohmann::json& j) {
  TaxiConfig c = TaxiConfig::defaults();
  if (!j.is_object()) throw Error(ErrorKind::Configuration, "taxi config must be a JSON object");
  static const char* const known[] = {"passenger",      "destination",  "gas_station",       "traffic_probability",
                                      "fuel_capacity",  "refuel_increment", "move_fuel_cost", "initial_fuel",
                                      "initial_cell",   "max_episode_steps", "discount",       "walls"};
  for (const auto& item : j.items()) {
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
      throw Error(ErrorKind::Configuration, "unknown taxi config key '" + item.key() + "'");
    }
  }
  try {
    if (j.contains("passenger")) c.passenger = parse_cell(j["passenger"]);
    if (j.contains("destination")) c.destination = parse_cell(j["destination"]);
    if (j.contains("gas_station")) c.gas_station = parse_cell(j["gas_station"]);
    if (j.contains("traffic_probability")) c.traffic_probability = j["traffic_probability"].get<double>();
    if (j.contains("fuel_capacity")) {
      c.fuel_capacity = j["fuel_capacity"].get<int>();
      if (!j.contains("initial_fuel") && c.fuel_capacity >= 1 && c.fuel_capacity < kFuelLevels) {
        c.initial_fuel = uniform_fuel(c.fuel_capacity);
      }
    }
    if (j.contains("refuel_increment")) c.refuel_increment = j["refuel_increment"].get<int>();
    if (j.contains("move_fuel_cost")) c.move_fuel_cost = j["move_fuel_cost"].get<int>();
    if (j.contains("initial_fuel")) c.initial_fuel = j["initial_fuel"].get<std::vector<double>>();
    if (j.contains("initial_cell")) c.initial_cell = j["initial_cell"].get<std::vector<double>>();
    if (j.contains("max_episode_steps")) c.max_episode_steps = j["max_episode_steps"].get<std::size_t>();
    if (j.contains("discount")) c.discount = j["discount"].get<double>();
    if (j.contains("walls")) {
      c.walls.clear();
      for (const auto& w : j["walls"]) {
        const auto side = w.at("side").get<std::string>();
        if (side != "east" && side != "south") throw Error(ErrorKind::Configuration, "wall side must be east or south");
        c.walls.push_back({parse_cell(w.at("cell")), side == "east" ? Wall::Side::East : Wall::Side::South});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("taxi config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const TaxiConfig& c) {
  nlohmann::json walls = nlohmann::json::array();
  for (const auto& w : c.walls) {
    walls.push_back({{"cell", {w.cell.row, w.cell.col}}, {"side", w.side == Wall::Side::East ? "east" : "south"}});
  }
  return {{"passenger", {c.passenger.row, c.passenger.col}},
          {"destination", {c.destination.row, c.destination.col}},
          {"gas_station", {c.gas_station.row, c.gas_station.col}},
          {"traffic_probability", c.traffic_probability},
          {"fuel_capacity", c.fuel_capacity},
          {"refuel_increment", c.refuel_increment},
          {"move_fuel_cost", c.move_fuel_cost},
          {"initial_fuel", c.initial_fuel},
          {"initial_cell", c.initial_cell},
          {"walls", walls},
          {"max_episode_steps", c.max_episode_steps},
          {"discount", c.discount}};
}

bool is_terminal(StateId s) { return decode_state(s).fuel == 0; }

bool is_valid_action(const TaxiConfig& config, StateId s, ActionId a) {
  if (a >= kNumActions) return false;
  const TaxiState ts = decode_state(s);
  if (ts.fuel == 0) return false;
  const Cell here{ts.row, ts.col};
  switch (static_cast<Action>(a)) {
    case Action::Pickup: return here == config.passenger && !ts.passenger_in_taxi;
    case Action::Dropoff: return here == config.destination && ts.passenger_in_taxi;
    case Action::Refuel: return here == config.gas_station && ts.fuel < config.fuel_capacity;
    default: return !blocked(config, here, step(here, a));
  }
}

std::vector<SuccessorSpec> successors(const TaxiConfig& config, StateId s, ActionId a) {
  if (!is_valid_action(config, s, a)) return {};
  const TaxiState ts = decode_state(s);
  switch (static_cast<Action>(a)) {
    case Action::Pickup: return {{encode_state({ts.row, ts.col, ts.fuel, true}), 1.0}};
    // Successful delivery lands in the empty-tank sink at the destination; every
    // fuel-0 state is absorbing.
    case Action::Dropoff: return {{encode_state({ts.row, ts.col, 0, false}), 1.0}};
    case Action::Refuel: {
      const int fuel = std::min(ts.fuel + config.refuel_increment, config.fuel_capacity);
      return {{encode_state({ts.row, ts.col, fuel, ts.passenger_in_taxi}), 1.0}};
    }
    default: {
      const int fuel = std::max(ts.fuel - config.move_fuel_cost, 0);
      const Cell to = step({ts.row, ts.col}, a);
      std::vector<SuccessorSpec> out;
      out.push_back({encode_state({to.row, to.col, fuel, ts.passenger_in_taxi}), 1.0 - config.traffic_probability});
      if (config.traffic_probability > 0.0) {
        out.push_back({encode_state({ts.row, ts.col, fuel, ts.passenger_in_taxi}), config.traffic_probability});
      }
      return out;
    }
  }
}

Event classify_event(const TaxiConfig& config, StateId s, ActionId a, StateId next) {
  if (is_terminal(s)) {
    if (next != s) throw Error(ErrorKind::Classification, "terminal states only self-loop");
    return Event::Terminated;
  }
  const auto support = successors(config, s, a);
  const bool supported =
      std::any_of(support.begin(), support.end(), [&](const SuccessorSpec& e) { return e.next == next && e.probability > 0.0; });
  if (!supported) {
    throw Error(ErrorKind::Classification, "unsupported transition " + std::to_string(s) + " -" +
                                               std::to_string(a) + "-> " + std::to_string(next));
  }
  const TaxiState from = decode_state(s);
  const TaxiState to = decode_state(next);
  switch (static_cast<Action>(a)) {
    case Action::Dropoff: return Event::Dropoff;
    case Action::Pickup: return Event::Pickup;
    case Action::Refuel: return Event::Refuel;
    default:
      if (to.fuel == 0) return Event::Failure;
      if (to.row == from.row && to.col == from.col) return Event::Traffic;
      return Event::Move;
  }
}

TabularMdp build_taxi_mdp(const TaxiConfig& config) {
  config.validate();
  MdpDefinition def;
  def.num_states = kNumStates;
  def.num_actions = kNumActions;
  def.discount = config.discount;
  def.max_episode_steps = config.max_episode_steps;
  def.terminal.resize(kNumStates);
  def.valid.resize(kNumStates * kNumActions);
  def.successors.resize(kNumStates * kNumActions);
  def.initial.assign(kNumStates, 0.0);
  for (StateId s = 0; s < kNumStates; ++s) {
    def.terminal[s] = is_terminal(s);
    for (ActionId a = 0; a < kNumActions; ++a) {
      const std::size_t i = s * kNumActions + a;
      def.valid[i] = is_valid_action(config, s, a);
      if (def.valid[i]) def.successors[i] = successors(config, s, a);
    }
    const TaxiState ts = decode_state(s);
    if (!ts.passenger_in_taxi) def.initial[s] = config.initial_cell[ts.row * kCols + ts.col] * config.initial_fuel[ts.fuel];
  }
  def.reward = [config](StateId s, ActionId a, StateId next) {
    return event_reward(classify_event(config, s, a, next));
  };
  for (Event e : kEventsByPriority) {
    OutcomeSpec o;
    o.name = std::string(event_name(e));
    o.kind = OutcomeKind::EventIndicator;
    o.associated_reward = event_reward(e);
    o.bound = 1.0;
    o.evaluate = [config, e](StateId s, ActionId a, StateId next) {
      return classify_event(config, s, a, next) == e ? 1.0 : 0.0;
    };
    def.outcomes.push_back(std::move(o));
  }
  OutcomeSpec reward;
  reward.name = std::string(kRewardOutcome);
  reward.kind = OutcomeKind::RewardComponent;
  reward.bound = 100.0;
  reward.evaluate = def.reward;
  def.outcomes.push_back(std::move(reward));
  return TabularMdp(std::move(def));
}

std::string render_state(const TaxiConfig& config, StateId s) {
  const TaxiState ts = decode_state(s);
  std::ostringstream out;
  out << "+---------+\n";
  for (int r = 0; r < kRows; ++r) {
    out << '|';
    for (int c = 0; c < kCols; ++c) {
      const Cell cell{r, c};
      char glyph = ' ';
      if (cell == config.destination) glyph = 'D';
      if (cell == config.gas_station) glyph = 'F';
      if (cell == config.passenger && !ts.passenger_in_taxi) glyph = 'P';
      if (r == ts.row && c == ts.col) glyph = ts.passenger_in_taxi ? 'T' : 't';
      out << glyph;
      if (c + 1 < kCols) out << (blocked(config, cell, {r, c + 1}) ? '|' : ':');
    }
    out << "|\n";
  }
  out << "+---------+\n";
  out << "fuel " << ts.fuel << '/' << config.fuel_capacity << ", passenger "
      << (ts.passenger_in_taxi ? "aboard" : "waiting");
  if (is_terminal(s)) out << ", terminal";
  out << '\n';
  return out.str();
}

StateId parse_state_spec(std::string_view spec) {
  std::vector<int> fields;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const auto token = spec.substr(start, comma == std::string_view::npos ? spec.size() - start : comma - start);
    if (token == "true" || token == "false") {
      fields.push_back(token == "true" ? 1 : 0);
    } else {
      int value = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error(ErrorKind::Encoding, "cannot parse state spec '" + std::string(spec) + "'");
      }
      fields.push_back(value);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() == 1) {
    if (fields[0] < 0 || static_cast<std::size_t>(fields[0]) >= kNumStates) {
      throw Error(ErrorKind::Encoding, "state id out of range");
    }
    return static_cast<StateId>(fields[0]);
  }
  if (fields.size() != 4 || (fields[3] != 0 && fields[3] != 1)) {
    throw Error(ErrorKind::Encoding, "state spec must be an id or row,col,fuel,passenger");
  }
  return encode_state({fields[0], fields[1], fields[2], fields[3] == 1});
}

}  // namespace efo::taxi
