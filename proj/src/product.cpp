#include "ltlrl/product.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "ltlrl/errors.hpp"
#include "ltlrl/graph.hpp"

namespace ltlrl {

namespace {

std::vector<Label> build_label_map(const AtomSet& from, const AtomSet& to) {
  if (!from.same_atoms(to)) {
    std::string a, b;
    for (const auto& n : from.names()) a += " " + n;
    for (const auto& n : to.names()) b += " " + n;
    throw ValidationError(ValidationError::Kind::alphabet_mismatch,
                          fmt::format("MDP propositions {{{} }} differ from automaton propositions {{{} }}", a, b));
  }
  std::vector<std::size_t> bit(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) bit[i] = *to.index_of(from.name(i));
  std::vector<Label> map(from.label_count());
  for (Label l = 0; l < map.size(); ++l) {
    Label out = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      if (l & (Label{1} << i)) out |= Label{1} << bit[i];
    }
    map[l] = out;
  }
  return map;
}

}  // namespace

ProductMdp::ProductMdp(std::shared_ptr<const LabeledMdp> mdp, std::shared_ptr<const Ldba> ldba)
    : mdp_(std::move(mdp)), ldba_(std::move(ldba)) {
  if (!mdp_ || !ldba_) throw std::invalid_argument("product of a null model");
  label_map_ = build_label_map(mdp_->ap, ldba_->ap());

  const std::size_t nq = ldba_->num_states();
  const SparseMdp& base = mdp_->transitions;
  const auto num_mdp = static_cast<ActionId>(num_mdp_actions());
  SparseMdp::Builder builder(base.num_states() * nq);
  for (StateId s = 0; s < base.num_states(); ++s) {
    const Label label = automaton_label(s);
    for (AutomatonState q = 0; q < nq; ++q) {
      const StateId x = index(s, q);
      const AutomatonState next_q = ldba_->step(q, label);
      for (ChoiceId c = base.first_choice(s); c < base.end_choice(s); ++c) {
        const auto targets = base.targets(c);
        const auto probs = base.probabilities(c);
        std::vector<Outcome> outcomes;
        outcomes.reserve(targets.size());
        for (std::size_t i = 0; i < targets.size(); ++i) outcomes.push_back({index(targets[i], next_q), probs[i]});
        builder.add_choice(x, base.action_of(c), std::move(outcomes));
      }
      for (AutomatonState target : ldba_->epsilon_successors(q)) {
        const auto a = static_cast<ActionId>(num_mdp + ldba_->epsilon_index(target));
        builder.add_choice(x, a, {{index(s, target), 1.0}});
      }
    }
  }
  transitions_ = std::move(builder).build();
  accepting_.assign(num_states(), 0);
  for (StateId x = 0; x < num_states(); ++x) accepting_[x] = ldba_->is_accepting(automaton_state(x)) ? 1 : 0;
}

AutomatonState ProductMdp::epsilon_target(ActionId a) const {
  if (!is_epsilon(a) || a >= num_actions()) throw std::out_of_range(fmt::format("action {} is not an epsilon action", a));
  return ldba_->epsilon_targets()[a - num_mdp_actions()];
}

ActionId ProductMdp::epsilon_action(AutomatonState target) const {
  return static_cast<ActionId>(num_mdp_actions() + ldba_->epsilon_index(target));
}

std::string ProductMdp::action_name(ActionId a) const {
  if (a < num_mdp_actions()) return mdp_->action_names[a];
  if (a < num_actions()) return Ldba::epsilon_name(a - num_mdp_actions());
  throw std::out_of_range(fmt::format("action id {} out of range", a));
}

std::optional<ActionId> ProductMdp::find_action(std::string_view name) const {
  for (ActionId a = 0; a < num_actions(); ++a) {
    if (action_name(a) == name) return a;
  }
  return std::nullopt;
}

std::string ProductMdp::state_name(StateId x) const {
  return fmt::format("<{},q{}>", mdp_->state_names.at(mdp_state(x)), automaton_state(x));
}

std::vector<char> ProductMdp::reachable() const { return reachable_from({initial()}); }

std::vector<char> ProductMdp::reachable_from(const std::vector<StateId>& sources) const {
  std::vector<char> seed(num_states(), 0);
  for (StateId x : sources) seed.at(x) = 1;
  return forward_reachable(transitions_.graph(), seed);
}

ProductMdp build_product(std::shared_ptr<const LabeledMdp> mdp, std::shared_ptr<const Ldba> ldba) {
  return ProductMdp(std::move(mdp), std::move(ldba));
}

std::string dump_product(const ProductMdp& p) {
  std::string out = fmt::format("states: {}  automaton_states: {}  initial: {}\n", p.num_states(),
                                p.num_automaton_states(), p.initial());
  const SparseMdp& t = p.transitions();
  for (StateId x = 0; x < p.num_states(); ++x) {
    for (ChoiceId c = t.first_choice(x); c < t.end_choice(x); ++c) {
      const auto targets = t.targets(c);
      const auto probs = t.probabilities(c);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        out += fmt::format("{} {} {} {} {} {:.17g}\n", x, p.state_name(x), p.action_name(t.action_of(c)), targets[i],
                           p.state_name(targets[i]), probs[i]);
      }
    }
  }
  out += "accepting:";
  for (StateId x = 0; x < p.num_states(); ++x) {
    if (p.is_accepting(x)) out += fmt::format(" {}", x);
  }
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Controller

FiniteMemoryController::FiniteMemoryController(std::shared_ptr<const ProductMdp> product, MemorylessPolicy policy)
    : product_(std::move(product)), policy_(std::move(policy)) {
  if (!product_) throw std::invalid_argument("controller without a product");
  validate_policy(product_->transitions(), policy_);
  reset();
}

ActionId FiniteMemoryController::choose(StateId s, std::vector<ActionId>* epsilons) {
  std::vector<char> seen(product_->num_automaton_states(), 0);
  for (;;) {
    if (seen[q_]) {
      throw ValidationError(ValidationError::Kind::epsilon_cycle,
                            fmt::format("policy cycles through epsilon actions at {}",
                                        product_->state_name(product_->index(s, q_))));
    }
    seen[q_] = 1;
    const ActionId a = policy_.choice.at(product_->index(s, q_));
    if (!product_->is_epsilon(a)) return a;
    if (epsilons) epsilons->push_back(a);
    q_ = product_->epsilon_target(a);
  }
}

FiniteMemoryController project_policy(std::shared_ptr<const ProductMdp> product, const MemorylessPolicy& policy) {
  return FiniteMemoryController(std::move(product), policy);
}

Trace simulate(std::shared_ptr<const ProductMdp> product, const MemorylessPolicy& policy, std::size_t steps, Rng& rng,
               const std::optional<LtlFormula>& formula) {
  const ProductMdp& p = *product;
  FiniteMemoryController ctl(product, policy);
  Trace trace;
  std::map<std::pair<StateId, AutomatonState>, std::size_t> first_seen;
  StateId s = p.mdp().initial;
  for (std::size_t t = 0; t < steps; ++t) {
    TraceStep step;
    step.state = s;
    step.arrival = ctl.automaton_state();
    if (!trace.loop_start) {
      auto [it, fresh] = first_seen.emplace(std::make_pair(s, step.arrival), t);
      if (!fresh) {
        trace.loop_start = it->second;
        trace.loop_end = t;
      }
    }
    step.action = ctl.choose(s, &step.epsilons);
    step.acting = ctl.automaton_state();
    trace.steps.push_back(std::move(step));
    const StateId next = sample_step(p.mdp(), s, trace.steps.back().action, rng);
    ctl.advance(s);
    s = next;
  }
  if (!trace.loop_start && steps > 0) {
    auto it = first_seen.find({s, ctl.automaton_state()});
    if (it != first_seen.end()) {
      trace.loop_start = it->second;
      trace.loop_end = steps;
    }
  }
  if (trace.loop_start) {
    for (std::size_t i = *trace.loop_start; i < *trace.loop_end; ++i) {
      const auto& st = trace.steps[i];
      // Every product state on the cycle: arrival, epsilon intermediates, acting.
      bool acc = p.ldba().is_accepting(st.arrival) || p.ldba().is_accepting(st.acting);
      for (ActionId e : st.epsilons) acc = acc || p.ldba().is_accepting(p.epsilon_target(e));
      trace.buchi_accepting = trace.buchi_accepting || acc;
    }
    if (formula) trace.formula_holds = check_lasso(*formula, trace_word(p, trace));
  }
  return trace;
}

LassoWord trace_word(const ProductMdp& p, const Trace& trace) {
  if (!trace.loop_start) throw std::invalid_argument("trace has no lasso");
  LassoWord w;
  for (std::size_t i = 0; i < *trace.loop_start; ++i) w.prefix.push_back(p.mdp().labels[trace.steps[i].state]);
  for (std::size_t i = *trace.loop_start; i < *trace.loop_end; ++i) w.cycle.push_back(p.mdp().labels[trace.steps[i].state]);
  return w;
}

}  // namespace ltlrl
