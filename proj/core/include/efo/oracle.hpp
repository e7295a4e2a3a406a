#pragma once

#include <cstddef>
#include <string_view>

#include "efo/control.hpp"
#include "efo/decomposition.hpp"
#include "efo/fhtd.hpp"
#include "efo/mdp.hpp"

namespace efo {

/// Exact fixed-horizon GVF by backward recursion over the enumerated model:
///   Q_h(s,a) = sum_s' p(s'|s,a) [o(s,a,s') + gamma_o sum_a' pi(a'|s') Q_{h-1}(s',a')],
/// with Q_{-1} = 0 and zero continuation from terminal states.
FhgvfTable exact_fhgvf(const TabularMdp& mdp, const Policy& policy, std::string_view outcome, std::size_t horizon,
                       double discount);

/// Ground-truth EFOs at (s, a).
EfoMatrix exact_efo(const TabularMdp& mdp, const Policy& policy, std::string_view outcome, std::size_t horizon,
                    double discount, StateId s, ActionId a);

struct ValueIterationResult {
  QTable q;
  Policy policy;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Bellman-optimality iteration over valid actions until the sup-norm change
/// drops below `tolerance`. Throws a divergence error at the iteration cap.
ValueIterationResult value_iteration(const TabularMdp& mdp, double discount, double tolerance = 1e-10,
                                     std::size_t max_iterations = 1'000'000);

/// Infinite-horizon Q^pi by iterative evaluation.
QTable evaluate_policy(const TabularMdp& mdp, const Policy& policy, double discount, double tolerance = 1e-10,
                       std::size_t max_iterations = 1'000'000);

/// E_{s ~ initial, a ~ pi}[table(h, s, a)].
double start_expectation(const TabularMdp& mdp, const Policy& policy, const FhgvfTable& table, std::size_t h);

/// Probability that `success_event` fires within `horizon` steps from the start
/// distribution. Valid for events that can occur at most once per episode.
double success_probability(const TabularMdp& mdp, const Policy& policy, std::string_view success_event,
                           std::size_t horizon);

}  // namespace efo
