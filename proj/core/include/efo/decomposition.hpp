#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "efo/fhtd.hpp"
#include "efo/mdp.hpp"

namespace efo {

enum class Provenance { Learned, Oracle };

std::string_view to_string(Provenance p) noexcept;

/// Expected future outcomes O_0..O_{H-1} of one outcome for a fixed (s, a).
struct EfoMatrix {
  std::string outcome_name;
  double discount = 1.0;
  std::vector<double> values;
  Provenance provenance = Provenance::Learned;

  std::size_t horizon() const noexcept { return values.size(); }
};

/// Inverts the lower-triangular system Q_h = sum_{t<=h} gamma^t O_t by forward
/// substitution: O_0 = Q_0, O_h = (Q_h - Q_{h-1}) / gamma^h.
EfoMatrix decompose_fhgvf(std::span<const double> fhgvf, double discount, std::string outcome_name = {},
                          Provenance provenance = Provenance::Learned);

/// Q_h = sum_{t<=h} gamma^t O_t.
std::vector<double> reconstruct_fhgvf(std::span<const double> efo, double discount);

struct TerminatedByExclusion {
  /// 1 - sum_k E_{h,k} from the raw event values.
  std::vector<double> raw;
  /// Display variant: events clamped to [0, 1] first, result floored at 0.
  std::vector<double> clamped;
  /// Event values clamped to [0, 1], same layout as the input.
  std::vector<std::vector<double>> events_clamped;
  /// True when any raw event value left [0, 1].
  bool out_of_range = false;
};

/// Probability mass per step not claimed by any event of a complete event set.
TerminatedByExclusion terminated_by_exclusion(std::span<const EfoMatrix> events);

struct RewardReconstruction {
  std::vector<std::string> event_names;
  /// components[k][h] = r_k * E_{h,k}
  std::vector<std::vector<double>> components;
  /// R_h = sum_k components[k][h]
  std::vector<double> total;
  /// sum_{t<=h} gamma^t R_t under the control discount.
  std::vector<double> cumulative_return;
  double discounted_value = 0.0;
  /// mu_k = sum_h gamma^h E_{h,k}
  std::vector<double> occupancies;
  double control_discount = 1.0;
  /// gamma^H / (1 - gamma); meaningless when `remainder_unbounded`.
  double remainder_bound = 0.0;
  bool remainder_unbounded = false;
};

/// Rebuilds expected reward components from event probabilities. Every event
/// must appear in `rewards`.
RewardReconstruction reconstruct_rewards(std::span<const EfoMatrix> events, const std::map<std::string, double>& rewards,
                                         double control_discount);

/// gamma^H / (1 - gamma), or +inf for gamma = 1.
double remainder_bound(double control_discount, std::size_t horizon);

struct Explanation {
  StateId state = 0;
  ActionId action = 0;
  std::vector<EfoMatrix> events;
  TerminatedByExclusion terminated;
  RewardReconstruction rewards;

  std::size_t horizon() const noexcept { return events.empty() ? 0 : events.front().horizon(); }
};

/// Decomposes the event tables at (s, a) and assembles the full explanation.
Explanation explain(std::span<const FhgvfTable> event_tables, StateId s, ActionId a,
                    const std::map<std::string, double>& rewards, double control_discount, Provenance provenance);

struct Contrast {
  StateId state = 0;
  ActionId fact = 0;
  ActionId foil = 0;
  std::vector<std::string> event_names;
  /// event_diffs[k][h] = E_{h,k}(s, fact) - E_{h,k}(s, foil)
  std::vector<std::vector<double>> event_diffs;
  std::vector<std::vector<double>> reward_component_diffs;
  std::vector<double> terminated_diff;
  std::vector<double> reward_diff;
  /// D(h) = sum_{t<=h} gamma^t (R_t(s, fact) - R_t(s, foil))
  std::vector<double> cumulative_return_diff;
};

/// "Why fact rather than foil?" Both explanations must share state, horizon and events.
Contrast contrastive(const Explanation& fact, const Explanation& foil);

}  // namespace efo
