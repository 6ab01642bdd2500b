#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include "ltlrl/errors.hpp"
#include "ltlrl/product.hpp"
#include "support.hpp"

using namespace ltlrl;

namespace {

ActionId action(const ProductMdp& p, const std::string& name) {
  const auto a = p.find_action(name);
  REQUIRE(a.has_value());
  return *a;
}

double prob_to(const SparseMdp& m, StateId s, ActionId a, StateId t) {
  const auto c = m.find_choice(s, a);
  if (!c) return -1.0;
  double p = 0.0;
  const auto ts = m.targets(*c);
  const auto ps = m.probabilities(*c);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] == t) p += ps[i];
  }
  return p;
}

MemorylessPolicy fig2_reference_policy(const ProductMdp& p) {
  const StateId s0 = *p.mdp().find_state("s0");
  const StateId s1 = *p.mdp().find_state("s1");
  MemorylessPolicy pol;
  for (StateId x = 0; x < p.num_states(); ++x) pol.choice.push_back(p.transitions().actions(x).front());
  pol.choice[p.index(s0, 0)] = action(p, "beta");
  pol.choice[p.index(s1, 0)] = action(p, "eps_2");
  pol.choice[p.index(s1, 2)] = action(p, "theta");
  return pol;
}

}  // namespace

TEST_SUITE("product") {
  TEST_CASE("fig2 product: sizes and epsilon availability") {
    const auto p = support::fig2_product();
    CHECK(p->num_states() == 8);
    CHECK(p->num_actions() == 5);
    CHECK(p->action_name(3) == "eps_1");
    CHECK(p->action_name(4) == "eps_2");
    for (StateId x = 0; x < p->num_states(); ++x) {
      bool has_eps = false;
      for (ActionId a : p->transitions().actions(x)) has_eps = has_eps || p->is_epsilon(a);
      CHECK(has_eps == (p->automaton_state(x) == 0));
    }
    CHECK(p->state_name(p->initial()) == "<s0,q0>");
  }

  TEST_CASE("phi1 product has 80 states") {
    const auto p = support::phi1_product();
    CHECK(p->mdp().num_states() == 20);
    CHECK(p->num_automaton_states() == 4);
    CHECK(p->num_states() == 80);
  }

  TEST_CASE("epsilon action moves only the automaton component") {
    const auto p = support::fig2_product();
    const StateId s0 = *p->mdp().find_state("s0");
    const StateId from = p->index(s0, 0);
    CHECK(prob_to(p->transitions(), from, action(*p, "eps_1"), p->index(s0, 1)) == 1.0);
    CHECK(p->transitions().targets(*p->transitions().find_choice(from, action(*p, "eps_1"))).size() == 1);
    CHECK(p->epsilon_target(action(*p, "eps_2")) == 2);
    CHECK(p->epsilon_action(1) == action(*p, "eps_1"));
  }

  TEST_CASE("transition structure follows the product case split") {
    for (const auto& p : {support::fig2_product(), support::phi1_product()}) {
      const auto& m = p->mdp();
      const auto& l = p->ldba();
      const auto& t = p->transitions();
      for (StateId x = 0; x < p->num_states(); ++x) {
        const StateId s = p->mdp_state(x);
        const AutomatonState q = p->automaton_state(x);
        CHECK(p->is_accepting(x) == l.is_accepting(q));
        // Available actions: MDP actions of s plus epsilon moves of q.
        std::size_t expected = m.transitions.actions(s).size() + l.epsilon_successors(q).size();
        CHECK(t.actions(x).size() == expected);
        for (ChoiceId c = t.first_choice(x); c < t.end_choice(x); ++c) {
          const ActionId a = t.action_of(c);
          double total = 0.0;
          for (double pr : t.probabilities(c)) total += pr;
          CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
          if (p->is_epsilon(a)) {
            REQUIRE(t.targets(c).size() == 1);
            CHECK(t.targets(c)[0] == p->index(s, p->epsilon_target(a)));
            continue;
          }
          const AutomatonState q2 = l.step(q, p->automaton_label(s));
          for (StateId s2 = 0; s2 < m.num_states(); ++s2) {
            const double base = prob_to(m.transitions, s, a, s2);
            for (AutomatonState r = 0; r < l.num_states(); ++r) {
              const double got = prob_to(t, x, a, p->index(s2, r));
              CHECK(got == (r == q2 ? base : 0.0));
            }
          }
        }
      }
    }
  }

  TEST_CASE("automaton component reads the label word with epsilon steps deleted") {
    Rng rng(7);
    for (const auto& p : {support::fig2_product(), support::phi1_product()}) {
      for (int run = 0; run < 200; ++run) {
        StateId x = p->index(static_cast<StateId>(uniform_index(rng, p->mdp().num_states())), p->ldba().initial());
        std::vector<StateId> mdp_path{p->mdp_state(x)};
        // Epsilon jumps keyed by how many MDP moves preceded them.
        std::vector<std::pair<std::size_t, AutomatonState>> jumps;
        for (int step = 0; step < 40; ++step) {
          const auto acts = p->transitions().actions(x);
          const ActionId a = acts[uniform_index(rng, acts.size())];
          x = sample_step(p->transitions(), x, a, rng);
          if (p->is_epsilon(a)) {
            CHECK(p->mdp_state(x) == mdp_path.back());
            jumps.emplace_back(mdp_path.size() - 1, p->automaton_state(x));
          } else {
            mdp_path.push_back(p->mdp_state(x));
          }
        }
        // Replay the automaton on L(s_0) L(s_1) ... with the recorded jumps.
        AutomatonState q = p->ldba().initial();
        std::size_t j = 0;
        for (std::size_t i = 0;; ++i) {
          while (j < jumps.size() && jumps[j].first == i) q = jumps[j++].second;
          if (i + 1 == mdp_path.size()) break;
          q = p->ldba().step(q, p->automaton_label(mdp_path[i]));
        }
        CHECK(q == p->automaton_state(x));
      }
    }
  }

  TEST_CASE("alphabet mismatch and atom reordering") {
    auto mdp = support::load_mdp("fig2.mdp");
    auto other = std::make_shared<const Ldba>(parse_ldba("ap: a c\nstates: 1\ninitial: 0\naccepting:\n0 -> 0 : true\n"));
    try {
      ProductMdp bad(mdp, other);
      FAIL("expected an alphabet mismatch");
    } catch (const ValidationError& e) {
      CHECK(e.kind() == ValidationError::Kind::alphabet_mismatch);
    }
    // Same atoms in another order: labels are re-encoded.
    auto reordered = std::make_shared<const Ldba>(
        parse_ldba("ap: b a\nstates: 2\ninitial: 0\naccepting: 1\ninitial_component: 0\n"
                   "0 -> 0 : a\n0 -> 1 : !a\n1 -> 1 : true\n"));
    ProductMdp p(mdp, reordered);
    const StateId s0 = *mdp->find_state("s0");
    const StateId s1 = *mdp->find_state("s1");
    CHECK(p.ldba().step(0, p.automaton_label(s0)) == 0);
    CHECK(p.ldba().step(0, p.automaton_label(s1)) == 1);
  }

  TEST_CASE("projection of the fig2 policy") {
    const auto p = support::fig2_product();
    const StateId s0 = *p->mdp().find_state("s0");
    const StateId s1 = *p->mdp().find_state("s1");
    auto ctl = project_policy(p, fig2_reference_policy(*p));
    std::vector<ActionId> eps;
    CHECK(ctl.automaton_state() == 0);
    CHECK(ctl.choose(s0, &eps) == action(*p, "beta"));
    CHECK(eps.empty());
    ctl.advance(s0);
    CHECK(ctl.automaton_state() == 0);
    CHECK(ctl.choose(s1, &eps) == action(*p, "theta"));
    CHECK(eps == std::vector<ActionId>{action(*p, "eps_2")});
    CHECK(ctl.automaton_state() == 2);
    ctl.advance(s1);
    CHECK(ctl.automaton_state() == 2);
    CHECK(ctl.choose(s1) == action(*p, "theta"));

    Rng rng(1);
    const auto f = parse_ltl("F G a | F G b", p->mdp().ap);
    const Trace tr = simulate(p, fig2_reference_policy(*p), 20, rng, f);
    REQUIRE(tr.loop_start.has_value());
    CHECK(*tr.loop_start == 2);
    CHECK(*tr.loop_end == 3);
    CHECK(tr.buchi_accepting);
    REQUIRE(tr.formula_holds.has_value());
    CHECK(*tr.formula_holds);
    const std::vector<AutomatonState> arrivals{tr.steps[0].arrival, tr.steps[1].arrival, tr.steps[2].arrival};
    CHECK(arrivals == std::vector<AutomatonState>{0, 0, 2});
  }

  TEST_CASE("policy without epsilon actions is a direct lookup") {
    const auto p = support::phi1_product();
    Rng rng(3);
    MemorylessPolicy pol;
    for (StateId x = 0; x < p->num_states(); ++x) {
      std::vector<ActionId> mdp_actions;
      for (ActionId a : p->transitions().actions(x)) {
        if (!p->is_epsilon(a)) mdp_actions.push_back(a);
      }
      pol.choice.push_back(mdp_actions[uniform_index(rng, mdp_actions.size())]);
    }
    auto ctl = project_policy(p, pol);
    for (StateId x = 0; x < p->num_states(); ++x) {
      ctl.set_automaton_state(p->automaton_state(x));
      CHECK(ctl.choose(p->mdp_state(x)) == pol.choice[x]);
    }
  }

  TEST_CASE("epsilon chase that revisits a state is reported") {
    auto mdp = std::make_shared<const LabeledMdp>(
        parse_mdp("ap: a\nstates: s\nactions: stay\ninitial: s\nlabel s: a\ns stay s 1\n"));
    auto ldba = std::make_shared<const Ldba>(
        parse_ldba("ap: a\nstates: 3\ninitial: 0\naccepting: 2\ninitial_component: 0 1\n"
                   "0 -> 0 : true\n1 -> 1 : true\n2 -> 2 : true\n"
                   "0 -> 1 : eps\n1 -> 0 : eps\n0 -> 2 : eps\n"));
    auto p = std::make_shared<const ProductMdp>(mdp, ldba);
    MemorylessPolicy pol;
    pol.choice = {p->epsilon_action(1), p->epsilon_action(0), 0};
    auto ctl = project_policy(p, pol);
    try {
      (void)ctl.choose(0);
      FAIL("expected an epsilon cycle");
    } catch (const ValidationError& e) {
      CHECK(e.kind() == ValidationError::Kind::epsilon_cycle);
    }
  }

  TEST_CASE("invalid product policy is rejected") {
    const auto p = support::fig2_product();
    MemorylessPolicy pol = fig2_reference_policy(*p);
    pol.choice[p->index(*p->mdp().find_state("s1"), 1)] = action(*p, "eps_1");
    CHECK_THROWS_AS(project_policy(p, pol), ValidationError);
  }

  TEST_CASE("dump lists every outcome and the accepting set") {
    const auto p = support::fig2_product();
    const std::string d = dump_product(*p);
    CHECK(d.rfind("states: 8  automaton_states: 4  initial: 0\n", 0) == 0);
    CHECK(d.find("0 <s0,q0> beta 4 <s1,q0> 1\n") != std::string::npos);
    CHECK(d.find("accepting: 1 2 5 6\n") != std::string::npos);
  }
}
