#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ltlrl/ldba.hpp"
#include "ltlrl/ltl.hpp"
#include "ltlrl/mdp.hpp"

namespace ltlrl {

/// Synchronous product of a labeled MDP and an LDBA.
///
/// State <s,q> has index s*|Q| + q. Actions 0..|A|-1 are the MDP actions and
/// move both components: s' ~ P(s,a,.), q' = step(q, L(s)). Action |A|+k is
/// the epsilon action jumping to the k-th epsilon target of the automaton; it
/// leaves s unchanged and is available at <s,q> when q has that epsilon move.
class ProductMdp {
 public:
  /// Throws ValidationError(alphabet_mismatch) unless both sides use the
  /// same set of atomic propositions (order may differ).
  ProductMdp(std::shared_ptr<const LabeledMdp> mdp, std::shared_ptr<const Ldba> ldba);

  const LabeledMdp& mdp() const noexcept { return *mdp_; }
  const Ldba& ldba() const noexcept { return *ldba_; }
  const std::shared_ptr<const LabeledMdp>& mdp_ptr() const noexcept { return mdp_; }
  const std::shared_ptr<const Ldba>& ldba_ptr() const noexcept { return ldba_; }
  const SparseMdp& transitions() const noexcept { return transitions_; }

  std::size_t num_states() const noexcept { return transitions_.num_states(); }
  std::size_t num_automaton_states() const noexcept { return ldba_->num_states(); }
  StateId index(StateId s, AutomatonState q) const {
    return static_cast<StateId>(s * ldba_->num_states() + q);
  }
  StateId mdp_state(StateId x) const { return static_cast<StateId>(x / ldba_->num_states()); }
  AutomatonState automaton_state(StateId x) const { return static_cast<AutomatonState>(x % ldba_->num_states()); }
  StateId initial() const noexcept { return index(mdp_->initial, ldba_->initial()); }

  const std::vector<char>& accepting() const noexcept { return accepting_; }
  bool is_accepting(StateId x) const { return accepting_.at(x) != 0; }

  std::size_t num_mdp_actions() const noexcept { return mdp_->action_names.size(); }
  std::size_t num_actions() const noexcept { return num_mdp_actions() + ldba_->epsilon_targets().size(); }
  bool is_epsilon(ActionId a) const noexcept { return a >= num_mdp_actions(); }
  AutomatonState epsilon_target(ActionId a) const;
  ActionId epsilon_action(AutomatonState target) const;

  /// Label of an MDP state, re-encoded over the automaton's AP.
  Label automaton_label(StateId s) const { return label_map_.at(mdp_->labels.at(s)); }

  std::string action_name(ActionId a) const;
  std::optional<ActionId> find_action(std::string_view name) const;
  /// "<s0,q1>" style name using the MDP state name.
  std::string state_name(StateId x) const;

  /// States reachable from the initial state.
  std::vector<char> reachable() const;
  /// States reachable from any of `sources`.
  std::vector<char> reachable_from(const std::vector<StateId>& sources) const;

 private:
  std::shared_ptr<const LabeledMdp> mdp_;
  std::shared_ptr<const Ldba> ldba_;
  std::vector<Label> label_map_;  // MDP label bitmask -> automaton label bitmask
  SparseMdp transitions_;
  std::vector<char> accepting_;
};

ProductMdp build_product(std::shared_ptr<const LabeledMdp> mdp, std::shared_ptr<const Ldba> ldba);

/// Edge list, one outcome per line, followed by the accepting set:
///
///   states: 8  automaton_states: 4  initial: 0
///   0 <s0,q0> beta 4 <s1,q0> 1
///   accepting: 5 6
std::string dump_product(const ProductMdp& product);

/// Executable finite-memory controller obtained from a memoryless product
/// policy. It tracks the automaton state; `choose` follows epsilon choices
/// until the policy picks an MDP action, and `advance` feeds the label of the
/// state the MDP just left.
class FiniteMemoryController {
 public:
  FiniteMemoryController(std::shared_ptr<const ProductMdp> product, MemorylessPolicy policy);

  void reset() { q_ = product_->ldba().initial(); }
  AutomatonState automaton_state() const noexcept { return q_; }
  void set_automaton_state(AutomatonState q) { q_ = q; }

  /// Resolves epsilon choices at MDP state s and returns the MDP action.
  /// Epsilon actions taken are appended to `epsilons` when given. Throws
  /// ValidationError(epsilon_cycle) when the policy revisits an automaton state.
  ActionId choose(StateId s, std::vector<ActionId>* epsilons = nullptr);
  /// Automaton update for the MDP move out of s.
  void advance(StateId s) { q_ = product_->ldba().step(q_, product_->automaton_label(s)); }

  const MemorylessPolicy& policy() const noexcept { return policy_; }

 private:
  std::shared_ptr<const ProductMdp> product_;
  MemorylessPolicy policy_;
  AutomatonState q_ = 0;
};

/// Throws ValidationError(invalid_policy) if the policy is not valid on the product.
FiniteMemoryController project_policy(std::shared_ptr<const ProductMdp> product, const MemorylessPolicy& policy);

struct TraceStep {
  StateId state;                   // MDP state
  AutomatonState arrival;          // automaton state on arrival
  std::vector<ActionId> epsilons;  // epsilon actions taken before acting
  AutomatonState acting;           // automaton state when the MDP action is chosen
  ActionId action;
};

struct Trace {
  std::vector<TraceStep> steps;
  /// Set when some (state, arrival) pair repeats: steps[loop_start, loop_end)
  /// form the cycle of the lasso.
  std::optional<std::size_t> loop_start;
  std::optional<std::size_t> loop_end;
  /// Büchi verdict on the product lasso (meaningful when a loop was found).
  bool buchi_accepting = false;
  /// check_lasso verdict on the label word, when a formula was supplied.
  std::optional<bool> formula_holds;
};

/// Seeded rollout of `steps` MDP moves of the projected controller from the
/// MDP initial state. The first repeated (state, arrival) pair closes the lasso.
Trace simulate(std::shared_ptr<const ProductMdp> product, const MemorylessPolicy& policy, std::size_t steps, Rng& rng,
               const std::optional<LtlFormula>& formula = std::nullopt);

/// Label word of a lasso-closed trace, in the MDP's AP encoding.
LassoWord trace_word(const ProductMdp& product, const Trace& trace);

}  // namespace ltlrl
