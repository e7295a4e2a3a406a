#include "efo/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "efo/error.hpp"

namespace efo {

std::string_view to_string(Provenance p) noexcept { return p == Provenance::Oracle ? "oracle" : "learned"; }

EfoMatrix decompose_fhgvf(std::span<const double> fhgvf, double discount, std::string outcome_name,
                          Provenance provenance) {
  if (discount == 0.0) throw Error(ErrorKind::DegenerateDiscount, "cannot decompose with discount 0");
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorKind::Configuration, "discount must lie in (0, 1]");
  EfoMatrix out{std::move(outcome_name), discount, std::vector<double>(fhgvf.size()), provenance};
  double scale = 1.0;
  double previous = 0.0;
  for (std::size_t h = 0; h < fhgvf.size(); ++h) {
    out.values[h] = (fhgvf[h] - previous) / scale;
    previous = fhgvf[h];
    scale *= discount;
  }
  return out;
}

std::vector<double> reconstruct_fhgvf(std::span<const double> efo, double discount) {
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorKind::Configuration, "discount must lie in (0, 1]");
  std::vector<double> out(efo.size());
  double scale = 1.0;
  double sum = 0.0;
  for (std::size_t h = 0; h < efo.size(); ++h) {
    sum += scale * efo[h];
    out[h] = sum;
    scale *= discount;
  }
  return out;
}

TerminatedByExclusion terminated_by_exclusion(std::span<const EfoMatrix> events) {
  TerminatedByExclusion out;
  if (events.empty()) return out;
  const std::size_t horizon = events.front().horizon();
  for (const auto& e : events) {
    if (e.horizon() != horizon) throw Error(ErrorKind::Shape, "event horizons differ");
  }
  out.raw.assign(horizon, 1.0);
  out.clamped.assign(horizon, 1.0);
  for (const auto& e : events) {
    auto& clamped = out.events_clamped.emplace_back(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
      const double v = e.values[h];
      if (v < 0.0 || v > 1.0) out.out_of_range = true;
      clamped[h] = std::clamp(v, 0.0, 1.0);
      out.raw[h] -= v;
      out.clamped[h] -= clamped[h];
    }
  }
  for (double& t : out.clamped) t = std::max(t, 0.0);
  return out;
}

double remainder_bound(double control_discount, std::size_t horizon) {
  if (control_discount >= 1.0) return std::numeric_limits<double>::infinity();
  return std::pow(control_discount, static_cast<double>(horizon)) / (1.0 - control_discount);
}

RewardReconstruction reconstruct_rewards(std::span<const EfoMatrix> events, const std::map<std::string, double>& rewards,
                                         double control_discount) {
  if (!(control_discount > 0.0 && control_discount <= 1.0)) {
    throw Error(ErrorKind::Configuration, "control discount must lie in (0, 1]");
  }
  RewardReconstruction out;
  out.control_discount = control_discount;
  const std::size_t horizon = events.empty() ? 0 : events.front().horizon();
  out.total.assign(horizon, 0.0);
  for (const auto& e : events) {
    if (e.horizon() != horizon) throw Error(ErrorKind::Shape, "event horizons differ");
    const auto it = rewards.find(e.outcome_name);
    if (it == rewards.end()) throw Error(ErrorKind::Taxonomy, "no reward mapped to event '" + e.outcome_name + "'");
    out.event_names.push_back(e.outcome_name);
    auto& component = out.components.emplace_back(horizon);
    double occupancy = 0.0;
    double scale = 1.0;
    for (std::size_t h = 0; h < horizon; ++h) {
      component[h] = it->second * e.values[h];
      out.total[h] += component[h];
      occupancy += scale * e.values[h];
      scale *= control_discount;
    }
    out.occupancies.push_back(occupancy);
  }
  out.cumulative_return = reconstruct_fhgvf(out.total, control_discount);
  out.discounted_value = out.cumulative_return.empty() ? 0.0 : out.cumulative_return.back();
  out.remainder_bound = remainder_bound(control_discount, horizon);
  out.remainder_unbounded = std::isinf(out.remainder_bound);
  return out;
}

Explanation explain(std::span<const FhgvfTable> event_tables, StateId s, ActionId a,
                    const std::map<std::string, double>& rewards, double control_discount, Provenance provenance) {
  Explanation out;
  out.state = s;
  out.action = a;
  for (const auto& table : event_tables) {
    out.events.push_back(decompose_fhgvf(table.series(s, a), table.discount(), table.outcome_name(), provenance));
  }
  out.terminated = terminated_by_exclusion(out.events);
  out.rewards = reconstruct_rewards(out.events, rewards, control_discount);
  return out;
}

Contrast contrastive(const Explanation& fact, const Explanation& foil) {
  if (fact.horizon() != foil.horizon() || fact.events.size() != foil.events.size()) {
    throw Error(ErrorKind::Shape, "explanations have different horizons or event counts");
  }
  if (fact.state != foil.state) throw Error(ErrorKind::Shape, "contrastive explanations need the same state");
  if (fact.rewards.control_discount != foil.rewards.control_discount) {
    throw Error(ErrorKind::Shape, "explanations use different control discounts");
  }
  const std::size_t horizon = fact.horizon();
  Contrast out;
  out.state = fact.state;
  out.fact = fact.action;
  out.foil = foil.action;
  auto diff = [horizon](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> d(horizon);
    for (std::size_t h = 0; h < horizon; ++h) d[h] = x[h] - y[h];
    return d;
  };
  for (std::size_t k = 0; k < fact.events.size(); ++k) {
    if (fact.events[k].outcome_name != foil.events[k].outcome_name) {
      throw Error(ErrorKind::Taxonomy, "explanations use different event sets");
    }
    out.event_names.push_back(fact.events[k].outcome_name);
    out.event_diffs.push_back(diff(fact.events[k].values, foil.events[k].values));
    out.reward_component_diffs.push_back(diff(fact.rewards.components[k], foil.rewards.components[k]));
  }
  out.terminated_diff = diff(fact.terminated.raw, foil.terminated.raw);
  out.reward_diff = diff(fact.rewards.total, foil.rewards.total);
  out.cumulative_return_diff = diff(fact.rewards.cumulative_return, foil.rewards.cumulative_return);
  return out;
}

}  // namespace efo
