#pragma once

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "efo/decomposition.hpp"

namespace efo {

using ActionNamer = std::function<std::string(ActionId)>;

/// Full raw data: per-event EFOs (raw and clamped), terminated row, reward
/// components, cumulative return, occupancies, remainder bound.
nlohmann::json explanation_to_json(const Explanation& e, const ActionNamer& name = {});

/// Columns: h,event,probability,probability_clamped,reward_component. The
/// terminated row is listed as event "terminated".
std::string explanation_to_csv(const Explanation& e);

nlohmann::json contrast_to_json(const Contrast& c, const ActionNamer& name = {});

/// Columns: h,series,fact_minus_foil. Series are the events, "terminated",
/// "reward" and "cumulative_return".
std::string contrast_to_csv(const Contrast& c);

/// Event-probability stacked bars, reward-component grouped bars.
std::string explanation_events_svg(const Explanation& e, const std::string& title);
std::string explanation_rewards_svg(const Explanation& e, const std::string& title);
/// Cumulative expected return difference per step.
std::string contrast_svg(const Contrast& c, const std::string& title);

}  // namespace efo
