#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltlrl/ltl.hpp"

namespace ltlrl {

using AutomatonState = std::uint32_t;

struct LdbaEdge {
  AutomatonState from;
  AutomatonState to;
  LtlFormula guard;  // propositional formula over the automaton's AP
};

struct EpsilonMove {
  AutomatonState from;
  AutomatonState to;
};

/// Unvalidated description of a limit-deterministic Büchi automaton.
struct LdbaDescription {
  AtomSet ap;
  std::size_t num_states = 0;
  AutomatonState initial = 0;
  std::vector<AutomatonState> accepting;
  std::vector<AutomatonState> initial_component;  // Q_I; Q_A is the complement
  std::vector<LdbaEdge> edges;                    // declaration order
  std::vector<EpsilonMove> epsilon_moves;         // declaration order
};

/// Validated LDBA. Every (state, label) pair has exactly one non-epsilon
/// successor, epsilon moves leave only the initial component, the accepting
/// component is closed, and all accepting states lie in it.
///
/// Epsilon moves are identified by their target: epsilon action k jumps to
/// `epsilon_targets()[k]`, numbered in the order targets first appear among
/// the declared moves (eps_1, eps_2, ...).
class Ldba {
 public:
  /// Throws ValidationError (determinism, totality, bipartition, structure).
  explicit Ldba(LdbaDescription description);

  const AtomSet& ap() const noexcept { return desc_.ap; }
  std::size_t num_states() const noexcept { return desc_.num_states; }
  AutomatonState initial() const noexcept { return desc_.initial; }
  bool is_accepting(AutomatonState q) const { return accepting_.at(q) != 0; }
  bool in_initial_component(AutomatonState q) const { return initial_component_.at(q) != 0; }
  const std::vector<LdbaEdge>& edges() const noexcept { return desc_.edges; }
  const std::vector<EpsilonMove>& epsilon_moves() const noexcept { return desc_.epsilon_moves; }
  const LdbaDescription& description() const noexcept { return desc_; }

  /// The unique successor on `label`; `label` is over this automaton's AP.
  AutomatonState step(AutomatonState q, Label label) const {
    return table_[static_cast<std::size_t>(q) * desc_.ap.label_count() + label];
  }

  /// Epsilon successors of q, ascending by epsilon index.
  std::span<const AutomatonState> epsilon_successors(AutomatonState q) const;
  const std::vector<AutomatonState>& epsilon_targets() const noexcept { return epsilon_targets_; }
  /// Index k such that epsilon_targets()[k] == target; throws if none.
  std::size_t epsilon_index(AutomatonState target) const;
  /// "eps_1", "eps_2", ...
  static std::string epsilon_name(std::size_t index);

  friend bool operator==(const Ldba& a, const Ldba& b);

 private:
  LdbaDescription desc_;
  std::vector<char> accepting_;
  std::vector<char> initial_component_;
  std::vector<AutomatonState> table_;
  std::vector<AutomatonState> epsilon_targets_;
  std::vector<std::size_t> epsilon_begin_;
  std::vector<AutomatonState> epsilon_flat_;
};

/// Reads the text format:
///
///   ap: a b
///   states: 4
///   initial: 0
///   accepting: 1 2
///   initial_component: 0
///   0 -> 0 : true
///   0 -> 1 : eps
///
/// `#` starts a comment. Throws ParseError with the line number, or
/// ValidationError from the structural checks.
Ldba parse_ldba(std::string_view text);
std::string render_ldba(const Ldba& ldba);

/// A run of the automaton as prefix . cycle^omega over states.
struct StateLasso {
  std::vector<AutomatonState> prefix;
  std::vector<AutomatonState> cycle;
};

/// Büchi condition: some cycle state is accepting.
bool buchi_accepts(const Ldba& ldba, const StateLasso& run);

/// Whether some run of the automaton (with any epsilon choices) on the word
/// is Büchi-accepting.
bool accepts_lasso(const Ldba& ldba, const LassoWord& word);

}  // namespace ltlrl
