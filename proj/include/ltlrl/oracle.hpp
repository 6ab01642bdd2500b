#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ltlrl/kernels.hpp"
#include "ltlrl/mdp.hpp"
#include "ltlrl/product.hpp"
#include "ltlrl/reward.hpp"

namespace ltlrl {

/// Residual thresholds of the iterative solvers.
inline constexpr double reachability_tolerance = 1e-10;
inline constexpr double discounted_tolerance = 1e-12;

struct EndComponent {
  std::vector<StateId> states;                // ascending
  std::vector<std::vector<ActionId>> actions;  // retained actions, parallel to `states`
  bool accepting = false;                     // contains an accepting state
};

struct MecDecomposition {
  std::vector<EndComponent> components;
  std::vector<std::uint32_t> component_of;  // UINT32_MAX outside every MEC
};

MecDecomposition maximal_end_components(const SparseMdp& m, std::span<const char> accepting);

/// States with max reachability probability 0 and 1 (graph analysis only).
struct QualitativeReach {
  std::vector<char> zero;
  std::vector<char> one;
};
QualitativeReach qualitative_max_reach(const SparseMdp& m, std::span<const char> target);

/// Max probability of reaching `target`; qualitative states are fixed first,
/// the rest by value iteration until the sweep residual drops below the
/// reachability tolerance.
std::vector<double> max_reachability(const SparseMdp& m, std::span<const char> target,
                                     Execution exec = Execution::serial);

/// Pr_max(s |= GF accepting) for every state.
std::vector<double> max_buchi_probability(const SparseMdp& m, std::span<const char> accepting,
                                          Execution exec = Execution::serial);
std::vector<double> max_buchi_probability(const ProductMdp& p, Execution exec = Execution::serial);

/// Pr_pi(s |= GF accepting): reachability of accepting BSCCs of the induced
/// chain, by a sparse direct solve. Throws ValidationError(invalid_policy).
std::vector<double> policy_buchi_probability(const SparseMdp& m, std::span<const char> accepting,
                                             const MemorylessPolicy& policy);
std::vector<double> policy_buchi_probability(const ProductMdp& p, const MemorylessPolicy& policy);

/// Discounted value of a fixed policy: v = R + diag(Gamma) P_pi v.
std::vector<double> policy_discounted_value(const SparseMdp& m, std::span<const char> accepting,
                                            const MemorylessPolicy& policy, const RewardScheme& scheme);
std::vector<double> policy_discounted_value(const ProductMdp& p, const MemorylessPolicy& policy,
                                            const RewardScheme& scheme);

struct OptimalValues {
  std::vector<double> values;
  MemorylessPolicy policy;  // greedy, lowest action id among near-ties
};

/// Optimal discounted values. Policy iteration with exact evaluation gets
/// close; Bellman sweeps then drive the residual below the discounted tolerance.
OptimalValues optimal_discounted_values(const SparseMdp& m, std::span<const char> accepting,
                                        const RewardScheme& scheme, Execution exec = Execution::serial);
OptimalValues optimal_discounted_values(const ProductMdp& p, const RewardScheme& scheme,
                                        Execution exec = Execution::serial);

/// Greedy policy of a value vector: per state the lowest action whose
/// one-step value is within `tie` of the best.
MemorylessPolicy greedy_from_values(const SparseMdp& m, std::span<const char> accepting, const RewardScheme& scheme,
                                    std::span<const double> values, double tie = discounted_tolerance);

/// Scan of discount factors for the smallest gamma beyond which the
/// discount-optimal policy maximizes the Büchi probability at every state.
struct ThresholdScan {
  std::vector<double> gammas;    // ascending
  std::vector<char> optimal;     // per gamma
  std::vector<double> max_gap;   // per gamma, max_s Pr_max - Pr_pi
  std::optional<double> threshold;  // smallest grid gamma with all larger ones optimal
};
ThresholdScan satisfaction_threshold(const SparseMdp& m, std::span<const char> accepting,
                                     std::span<const double> gammas, const GammaSchedule& schedule,
                                     double tolerance = 1e-9);
ThresholdScan satisfaction_threshold(const ProductMdp& p, std::span<const double> gammas,
                                     const GammaSchedule& schedule, double tolerance = 1e-9);

}  // namespace ltlrl
