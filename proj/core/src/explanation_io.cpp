#include "efo/explanation_io.hpp"

#include <cmath>
#include <sstream>

#include "efo/svg.hpp"

namespace efo {

namespace {

nlohmann::json action_json(ActionId a, const ActionNamer& name) {
  nlohmann::json j = {{"id", a}};
  if (name) j["name"] = name(a);
  return j;
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

std::ostringstream csv_stream() {
  std::ostringstream out;
  out.precision(17);
  return out;
}

}  // namespace

nlohmann::json explanation_to_json(const Explanation& e, const ActionNamer& name) {
  nlohmann::json events = nlohmann::json::array();
  for (std::size_t k = 0; k < e.events.size(); ++k) {
    events.push_back({{"name", e.events[k].outcome_name},
                      {"probability", e.events[k].values},
                      {"probability_clamped", e.terminated.events_clamped[k]},
                      {"reward_component", e.rewards.components[k]},
                      {"occupancy", e.rewards.occupancies[k]}});
  }
  const std::string provenance(e.events.empty() ? "learned" : to_string(e.events.front().provenance));
  return {{"state", e.state},
          {"action", action_json(e.action, name)},
          {"horizon", e.horizon()},
          {"provenance", provenance},
          {"events", events},
          {"terminated", {{"probability", e.terminated.raw}, {"probability_clamped", e.terminated.clamped}}},
          {"out_of_range", e.terminated.out_of_range},
          {"expected_reward", e.rewards.total},
          {"cumulative_return", e.rewards.cumulative_return},
          {"discounted_value", e.rewards.discounted_value},
          {"control_discount", e.rewards.control_discount},
          {"remainder_bound", finite_or_null(e.rewards.remainder_bound)},
          {"remainder_unbounded", e.rewards.remainder_unbounded}};
}

std::string explanation_to_csv(const Explanation& e) {
  auto out = csv_stream();
  out << "h,event,probability,probability_clamped,reward_component\n";
  for (std::size_t h = 0; h < e.horizon(); ++h) {
    for (std::size_t k = 0; k < e.events.size(); ++k) {
      out << h << ',' << e.events[k].outcome_name << ',' << e.events[k].values[h] << ','
          << e.terminated.events_clamped[k][h] << ',' << e.rewards.components[k][h] << '\n';
    }
    out << h << ",terminated," << e.terminated.raw[h] << ',' << e.terminated.clamped[h] << ",0\n";
  }
  return out.str();
}

nlohmann::json contrast_to_json(const Contrast& c, const ActionNamer& name) {
  nlohmann::json events = nlohmann::json::array();
  for (std::size_t k = 0; k < c.event_names.size(); ++k) {
    events.push_back({{"name", c.event_names[k]},
                      {"probability_diff", c.event_diffs[k]},
                      {"reward_component_diff", c.reward_component_diffs[k]}});
  }
  return {{"state", c.state},
          {"fact", action_json(c.fact, name)},
          {"foil", action_json(c.foil, name)},
          {"events", events},
          {"terminated_diff", c.terminated_diff},
          {"reward_diff", c.reward_diff},
          {"cumulative_return_diff", c.cumulative_return_diff}};
}

std::string contrast_to_csv(const Contrast& c) {
  auto out = csv_stream();
  out << "h,series,fact_minus_foil\n";
  for (std::size_t h = 0; h < c.reward_diff.size(); ++h) {
    for (std::size_t k = 0; k < c.event_names.size(); ++k) {
      out << h << ',' << c.event_names[k] << ',' << c.event_diffs[k][h] << '\n';
    }
    out << h << ",terminated," << c.terminated_diff[h] << '\n';
    out << h << ",reward," << c.reward_diff[h] << '\n';
    out << h << ",cumulative_return," << c.cumulative_return_diff[h] << '\n';
  }
  return out.str();
}

std::string explanation_events_svg(const Explanation& e, const std::string& title) {
  std::vector<svg::Series> series;
  for (std::size_t k = 0; k < e.events.size(); ++k) {
    series.push_back({e.events[k].outcome_name, e.terminated.events_clamped[k]});
  }
  series.push_back({"terminated/unknown", e.terminated.clamped});
  return svg::stacked_bar_chart(title, "probability", series);
}

std::string explanation_rewards_svg(const Explanation& e, const std::string& title) {
  std::vector<svg::Series> series;
  for (std::size_t k = 0; k < e.events.size(); ++k) {
    series.push_back({e.rewards.event_names[k], e.rewards.components[k]});
  }
  return svg::grouped_bar_chart(title, "expected reward", series);
}

std::string contrast_svg(const Contrast& c, const std::string& title) {
  return svg::line_chart(title, "expected return difference", {{"cumulative difference", c.cumulative_return_diff}});
}

}  // namespace efo
