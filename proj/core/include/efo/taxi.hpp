#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "efo/mdp.hpp"

namespace efo::taxi {

inline constexpr int kRows = 5;
inline constexpr int kCols = 5;
inline constexpr int kFuelLevels = 21;  // fuel 0..20
inline constexpr std::size_t kNumStates = kRows * kCols * kFuelLevels * 2;
inline constexpr std::size_t kNumActions = 7;

enum class Action : ActionId { South = 0, North, East, West, Pickup, Dropoff, Refuel };

std::string_view action_name(ActionId a);
std::optional<ActionId> parse_action(std::string_view name);

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

struct TaxiState {
  int row = 0;
  int col = 0;
  int fuel = 0;
  bool passenger_in_taxi = false;
  bool operator==(const TaxiState&) const = default;
};

/// id = ((row * 5 + col) * 21 + fuel) * 2 + passenger_in_taxi
StateId encode_state(const TaxiState& ts);
TaxiState decode_state(StateId id);

/// Event classes in classification priority order. Terminated is derived by
/// exclusion and is not learned.
enum class Event { Failure = 0, Dropoff, Pickup, Refuel, Traffic, Move, Terminated };

inline constexpr std::size_t kNumEvents = 6;
inline constexpr std::array<Event, kNumEvents> kEventsByPriority = {Event::Failure, Event::Dropoff, Event::Pickup,
                                                                    Event::Refuel,  Event::Traffic, Event::Move};

std::string_view event_name(Event e);
std::optional<Event> parse_event(std::string_view name);

/// Deterministic reward of each event class.
double event_reward(Event e);

/// The six learnable events in reporting order (dropoff, pickup, refuel, failure, traffic, move).
const std::vector<std::string>& default_event_names();

/// Name of the registered raw-reward outcome.
inline constexpr std::string_view kRewardOutcome = "reward";

/// A wall segment between a cell and its east or south neighbour.
struct Wall {
  Cell cell;
  enum class Side { East, South } side = Side::East;
  bool operator==(const Wall&) const = default;
};

struct TaxiConfig {
  Cell passenger{4, 0};
  Cell destination{0, 0};
  Cell gas_station{0, 4};
  double traffic_probability = 0.1;
  int fuel_capacity = 20;
  int refuel_increment = 2;
  int move_fuel_cost = 1;
  /// Start distribution over fuel levels 0..20 (index = fuel). Default uniform on 1..20.
  std::vector<double> initial_fuel;
  /// Start distribution over the 25 cells, row-major. Default uniform.
  std::vector<double> initial_cell;
  std::vector<Wall> walls;
  std::size_t max_episode_steps = 200;
  /// Control discount used by Q-learning and reward reconstruction.
  double discount = 0.99;

  static TaxiConfig defaults();
  /// Throws a configuration error on malformed settings.
  void validate() const;
};

/// Classic Gymnasium Taxi interior walls.
std::vector<Wall> classic_walls();

TaxiConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const TaxiConfig& config);

/// Support of p(.|s, a) computed straight from the rules; empty when a is masked.
std::vector<SuccessorSpec> successors(const TaxiConfig& config, StateId s, ActionId a);
bool is_terminal(StateId s);
bool is_valid_action(const TaxiConfig& config, StateId s, ActionId a);

/// Exactly one label per supported transition: failure > dropoff > pickup >
/// refuel > traffic > move, and terminated for the absorbing self-loop.
Event classify_event(const TaxiConfig& config, StateId s, ActionId a, StateId next);

/// Builds the 1050-state MDP with the six event indicators and the raw reward
/// registered as outcomes.
TabularMdp build_taxi_mdp(const TaxiConfig& config);

/// ASCII picture of the grid with the taxi overlaid.
std::string render_state(const TaxiConfig& config, StateId s);

/// Parses either a raw id or "row,col,fuel,passenger".
StateId parse_state_spec(std::string_view spec);

}  // namespace efo::taxi
