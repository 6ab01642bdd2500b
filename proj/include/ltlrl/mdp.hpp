#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltlrl/ltl.hpp"

namespace ltlrl {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;
using ChoiceId = std::uint32_t;

/// Tolerance for "probabilities sum to one".
inline constexpr double probability_tolerance = 1e-9;

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
/// Uniform integer in [0, n); n > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);
/// Decorrelated seed for stream `stream` of a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct Outcome {
  StateId target;
  double probability;
};

/// Compressed transition structure shared by base and product MDPs. Each
/// state owns a contiguous run of choices sorted by action id; each choice
/// owns a contiguous run of outcomes.
class SparseMdp {
 public:
  class Builder {
   public:
    explicit Builder(std::size_t num_states);
    /// Adds a choice for `state`; choices and states may come in any order.
    Builder& add_choice(StateId state, ActionId action, std::vector<Outcome> outcomes);
    /// Validates (probabilities, one action per state) and freezes.
    SparseMdp build() &&;

   private:
    std::size_t num_states_;
    std::vector<std::vector<std::pair<ActionId, std::vector<Outcome>>>> rows_;
  };

  SparseMdp() = default;

  std::size_t num_states() const noexcept { return state_begin_.empty() ? 0 : state_begin_.size() - 1; }
  std::size_t num_choices() const noexcept { return choice_action_.size(); }

  ChoiceId first_choice(StateId s) const { return static_cast<ChoiceId>(state_begin_[s]); }
  ChoiceId end_choice(StateId s) const { return static_cast<ChoiceId>(state_begin_[s + 1]); }
  /// Available actions of s, ascending.
  std::span<const ActionId> actions(StateId s) const {
    return {choice_action_.data() + state_begin_[s], state_begin_[s + 1] - state_begin_[s]};
  }
  ActionId action_of(ChoiceId c) const { return choice_action_[c]; }
  std::span<const StateId> targets(ChoiceId c) const {
    return {outcome_target_.data() + choice_begin_[c], choice_begin_[c + 1] - choice_begin_[c]};
  }
  std::span<const double> probabilities(ChoiceId c) const {
    return {outcome_prob_.data() + choice_begin_[c], choice_begin_[c + 1] - choice_begin_[c]};
  }
  std::optional<ChoiceId> find_choice(StateId s, ActionId a) const;
  bool has_action(StateId s, ActionId a) const { return find_choice(s, a).has_value(); }

  /// Successor graph over all actions (positive-probability edges).
  std::vector<std::vector<std::uint32_t>> graph() const;

 private:
  std::vector<std::size_t> state_begin_;
  std::vector<ActionId> choice_action_;
  std::vector<std::size_t> choice_begin_;
  std::vector<StateId> outcome_target_;
  std::vector<double> outcome_prob_;
};

/// Cell coordinates for MDPs built from a grid; row 0 is the top row.
struct GridGeometry {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::pair<std::size_t, std::size_t>> cell_of_state;
  std::vector<std::optional<StateId>> state_of_cell;  // row-major; nullopt for obstacles
  std::vector<char> absorbing;                        // per state

  std::optional<StateId> state_at(std::size_t row, std::size_t col) const { return state_of_cell.at(row * cols + col); }
};

/// A labeled MDP: transitions, initial state, atomic propositions, and a
/// labeling of states.
struct LabeledMdp {
  SparseMdp transitions;
  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  StateId initial = 0;
  AtomSet ap;
  std::vector<Label> labels;
  std::optional<GridGeometry> grid;

  std::size_t num_states() const noexcept { return transitions.num_states(); }
  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<ActionId> find_action(std::string_view name) const;
};

/// Checks names, labels and initial state against the transition structure.
void validate(const LabeledMdp& m);

struct MemorylessPolicy {
  std::vector<ActionId> choice;  // one action per state
};

/// Throws ValidationError(invalid_policy) naming the first bad state.
void validate_policy(const SparseMdp& m, const MemorylessPolicy& p);

class MarkovChain {
 public:
  MarkovChain(std::vector<std::size_t> row_begin, std::vector<StateId> target, std::vector<double> prob, StateId initial);

  std::size_t num_states() const noexcept { return row_begin_.size() - 1; }
  StateId initial() const noexcept { return initial_; }
  std::span<const StateId> targets(StateId s) const {
    return {target_.data() + row_begin_[s], row_begin_[s + 1] - row_begin_[s]};
  }
  std::span<const double> probabilities(StateId s) const {
    return {prob_.data() + row_begin_[s], row_begin_[s + 1] - row_begin_[s]};
  }
  std::vector<std::vector<std::uint32_t>> graph() const;

 private:
  std::vector<std::size_t> row_begin_;
  std::vector<StateId> target_;
  std::vector<double> prob_;
  StateId initial_;
};

MarkovChain induce_chain(const SparseMdp& m, const MemorylessPolicy& p, StateId initial = 0);
inline MarkovChain induce_chain(const LabeledMdp& m, const MemorylessPolicy& p) {
  return induce_chain(m.transitions, p, m.initial);
}

/// Bottom strongly connected components, each sorted ascending; the list is
/// ordered by smallest member.
std::vector<std::vector<StateId>> bsccs(const MarkovChain& c);

/// Draws a successor of (s, a). Throws std::invalid_argument when a is not
/// available in s.
StateId sample_step(const SparseMdp& m, StateId s, ActionId a, Rng& rng);
inline StateId sample_step(const LabeledMdp& m, StateId s, ActionId a, Rng& rng) {
  return sample_step(m.transitions, s, a, rng);
}

/// Edge-list format:
///
///   ap: a b
///   states: s0 s1          (optional; otherwise order of first use)
///   actions: alpha beta    (optional)
///   initial: s0
///   label s0: a
///   s0 alpha s1 0.1
LabeledMdp parse_mdp(std::string_view text);

}  // namespace ltlrl
