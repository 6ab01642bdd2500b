#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ltlrl/errors.hpp"
#include "ltlrl/graph.hpp"
#include "ltlrl/gridworld.hpp"
#include "ltlrl/mdp.hpp"
#include "support.hpp"

using namespace ltlrl;

namespace {

double prob_to(const SparseMdp& m, StateId s, ActionId a, StateId t) {
  const ChoiceId c = *m.find_choice(s, a);
  double p = 0.0;
  const auto targets = m.targets(c);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == t) p += m.probabilities(c)[i];
  }
  return p;
}

GridSpec open_grid(std::size_t rows, std::size_t cols) {
  GridSpec g;
  g.rows = rows;
  g.cols = cols;
  g.ap = AtomSet({"a"});
  return g;
}

MarkovChain random_chain(Rng& rng, std::size_t n) {
  std::vector<std::size_t> begin{0};
  std::vector<StateId> target;
  std::vector<double> prob;
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& o : support::random_distribution(rng, n, 2)) {
      target.push_back(o.target);
      prob.push_back(o.probability);
    }
    begin.push_back(target.size());
  }
  return MarkovChain(begin, target, prob, 0);
}

bool closed(const MarkovChain& c, const std::vector<char>& set) {
  for (StateId s = 0; s < c.num_states(); ++s) {
    if (!set[s]) continue;
    for (StateId t : c.targets(s)) {
      if (!set[t]) return false;
    }
  }
  return true;
}

bool strongly_connected(const MarkovChain& c, const std::vector<char>& set) {
  // Floyd-Warshall style closure restricted to the set.
  const std::size_t n = c.num_states();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (StateId s = 0; s < n; ++s) {
    if (!set[s]) continue;
    reach[s][s] = 1;
    for (StateId t : c.targets(s)) {
      if (set[t]) reach[s][t] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = 1;
  for (StateId s = 0; s < n; ++s)
    for (StateId t = 0; t < n; ++t)
      if (set[s] && set[t] && !reach[s][t]) return false;
  return true;
}

}  // namespace

TEST_SUITE("mdp") {
  TEST_CASE("builder validation") {
    SparseMdp::Builder ok(2);
    ok.add_choice(0, 1, {{1, 1.0}}).add_choice(0, 0, {{0, 0.5}, {1, 0.5}}).add_choice(1, 0, {{1, 1.0}});
    const SparseMdp m = std::move(ok).build();
    CHECK(m.actions(0).size() == 2);
    CHECK(m.actions(0)[0] == 0);
    CHECK(m.has_action(0, 1));
    CHECK_FALSE(m.has_action(1, 1));

    const auto kind_of = [](auto fill) {
      SparseMdp::Builder b(2);
      fill(b);
      try {
        (void)std::move(b).build();
      } catch (const ValidationError& e) {
        return e.kind();
      }
      FAIL("expected a validation error");
      return ValidationError::Kind::structure;
    };
    CHECK(kind_of([](auto& b) { b.add_choice(0, 0, {{1, 1.0}}); }) == ValidationError::Kind::structure);
    CHECK(kind_of([](auto& b) {
            b.add_choice(0, 0, {{1, 0.7}});
            b.add_choice(1, 0, {{1, 1.0}});
          }) == ValidationError::Kind::probability);
    CHECK(kind_of([](auto& b) {
            b.add_choice(0, 0, {{1, 1.0}});
            b.add_choice(0, 0, {{0, 1.0}});
            b.add_choice(1, 0, {{1, 1.0}});
          }) == ValidationError::Kind::structure);
  }

  TEST_CASE("gridworld sizes and slip distributions") {
    CHECK(build_gridworld(open_grid(5, 4)).num_states() == 20);

    const auto one = build_gridworld(open_grid(1, 1));
    REQUIRE(one.num_states() == 1);
    for (ActionId a = 0; a < 4; ++a) CHECK(prob_to(one.transitions, 0, a, 0) == 1.0);

    const auto g = build_gridworld(open_grid(3, 3));
    const StateId centre = *g.grid->state_at(1, 1);
    const auto top = static_cast<ActionId>(Direction::top);
    CHECK(prob_to(g.transitions, centre, top, *g.grid->state_at(0, 1)) == doctest::Approx(0.8));
    CHECK(prob_to(g.transitions, centre, top, *g.grid->state_at(1, 0)) == doctest::Approx(0.1));
    CHECK(prob_to(g.transitions, centre, top, *g.grid->state_at(1, 2)) == doctest::Approx(0.1));
    // Corner: forward and one side blocked fold into staying put.
    const StateId corner = *g.grid->state_at(0, 0);
    CHECK(prob_to(g.transitions, corner, top, corner) == doctest::Approx(0.9));
    CHECK(g.state_names[centre] == "(1,1)");
  }

  TEST_CASE("gridworld: obstacles, absorbing and restricted cells, bounds") {
    GridSpec g = open_grid(2, 3);
    g.obstacles = {{0, 1}};
    g.absorbing = {{1, 2}};
    g.restricted[{1, 0}] = {Direction::left};
    g.labels[{1, 2}] = 1;
    const auto m = build_gridworld(g);
    CHECK(m.num_states() == 5);
    CHECK_FALSE(m.grid->state_at(0, 1).has_value());
    const StateId s00 = *m.grid->state_at(0, 0);
    CHECK(prob_to(m.transitions, s00, static_cast<ActionId>(Direction::right), s00) == doctest::Approx(0.9));
    const StateId abs = *m.grid->state_at(1, 2);
    for (ActionId a = 0; a < 4; ++a) CHECK(prob_to(m.transitions, abs, a, abs) == 1.0);
    CHECK(m.labels[abs] == 1);
    CHECK(m.transitions.actions(*m.grid->state_at(1, 0)).size() == 1);

    GridSpec bad = open_grid(2, 2);
    bad.labels[{2, 0}] = 1;
    CHECK_THROWS_AS((void)build_gridworld(bad), ValidationError);
    CHECK_THROWS_AS((void)build_gridworld(open_grid(0, 3)), ValidationError);
  }

  TEST_CASE("every shipped grid conserves probability exactly") {
    for (const char* name : {"phi1.grid", "phi2.grid"}) {
      const auto m = support::load_grid(name);
      const SparseMdp& t = m->transitions;
      for (StateId s = 0; s < t.num_states(); ++s) {
        for (ChoiceId c = t.first_choice(s); c < t.end_choice(s); ++c) {
          double total = 0.0;
          for (double p : t.probabilities(c)) total += p;
          CHECK(total == 1.0);
        }
      }
    }
  }

  TEST_CASE("grid text format") {
    const auto spec = parse_grid(R"(rows: 2
cols: 3
ap: a b
initial: 1 0
glyph # : obstacle
glyph A : a absorbing
glyph L : b actions=left,down
layout:
. # A
L . .
)");
    CHECK(spec.obstacles.count({0, 1}) == 1);
    CHECK(spec.absorbing.count({0, 2}) == 1);
    CHECK(spec.restricted.at({1, 0}).size() == 2);
    CHECK(spec.labels.at({1, 0}) == 2);
    CHECK(spec.initial == Cell{1, 0});
    CHECK_THROWS_AS((void)parse_grid("rows: 1\ncols: 2\nap: a\nlayout:\n.\n"), ParseError);
    CHECK_THROWS_AS((void)parse_grid("rows: 1\ncols: 1\nap: a\nlayout:\nz\n"), ParseError);
  }

  TEST_CASE("fig2 MDP and induced chains") {
    const auto m = support::load_mdp("fig2.mdp");
    REQUIRE(m->num_states() == 2);
    const StateId s0 = *m->find_state("s0");
    const StateId s1 = *m->find_state("s1");
    const ActionId alpha = *m->find_action("alpha");
    const ActionId beta = *m->find_action("beta");
    const ActionId theta = *m->find_action("theta");

    MemorylessPolicy p{{beta, theta}};
    const auto c = induce_chain(*m, p);
    REQUIRE(c.targets(s0).size() == 1);
    CHECK(c.targets(s0)[0] == s1);
    CHECK(c.probabilities(s0)[0] == 1.0);
    CHECK(c.targets(s1)[0] == s1);

    const auto c2 = induce_chain(*m, MemorylessPolicy{{alpha, theta}});
    CHECK(c2.probabilities(s0)[0] == 0.9);
    CHECK(c2.probabilities(s0)[1] == 0.1);

    CHECK_THROWS_AS((void)induce_chain(*m, MemorylessPolicy{{theta, theta}}), ValidationError);
    CHECK(bsccs(c) == std::vector<std::vector<StateId>>{{s1}});
  }

  TEST_CASE("bscc examples") {
    const MarkovChain two_absorbing({0, 2, 3, 4}, {1, 2, 1, 2}, {0.5, 0.5, 1.0, 1.0}, 0);
    CHECK(bsccs(two_absorbing) == std::vector<std::vector<StateId>>{{1}, {2}});
    const MarkovChain cycle({0, 1, 2}, {1, 0}, {1.0, 1.0}, 0);
    CHECK(bsccs(cycle) == std::vector<std::vector<StateId>>{{0, 1}});
  }

  TEST_CASE("bsccs agree with subset enumeration on random chains") {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + uniform_index(rng, 6);
      const auto c = random_chain(rng, n);
      std::set<std::vector<StateId>> expected;
      for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<char> set(n);
        std::vector<StateId> members;
        for (StateId s = 0; s < n; ++s) {
          set[s] = (mask >> s) & 1U;
          if (set[s]) members.push_back(s);
        }
        if (closed(c, set) && strongly_connected(c, set)) expected.insert(members);
      }
      const auto found = bsccs(c);
      CHECK(std::set<std::vector<StateId>>(found.begin(), found.end()) == expected);

      // Every state reaches some BSCC.
      std::vector<char> bottom(n, 0);
      for (const auto& b : found)
        for (StateId s : b) bottom[s] = 1;
      const auto reach = backward_reachable(c.graph(), bottom);
      CHECK(std::all_of(reach.begin(), reach.end(), [](char x) { return x != 0; }));
    }
  }

  TEST_CASE("sample_step statistics and determinism") {
    const auto m = support::load_mdp("fig2.mdp");
    const ActionId alpha = *m->find_action("alpha");
    Rng rng(42);
    std::size_t stay = 0;
    constexpr std::size_t draws = 1'000'000;
    for (std::size_t i = 0; i < draws; ++i) stay += sample_step(*m, 0, alpha, rng) == 0 ? 1 : 0;
    CHECK(std::abs(static_cast<double>(stay) / draws - 0.9) <= 0.002);

    Rng r1(9), r2(9);
    for (int i = 0; i < 100; ++i) CHECK(sample_step(*m, 0, alpha, r1) == sample_step(*m, 0, alpha, r2));
    Rng r3(1), r4(2);
    const ActionId beta = *m->find_action("beta");
    CHECK(sample_step(*m, 0, beta, r3) == 1);
    CHECK(sample_step(*m, 0, beta, r4) == 1);
    CHECK_THROWS_AS((void)sample_step(*m, 1, alpha, r3), std::invalid_argument);
  }

  TEST_CASE("edge-list parse errors") {
    CHECK_THROWS_AS((void)parse_mdp("ap: a\ninitial: s\ns go s 0.5\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_mdp("ap: a\ninitial: s\ns go s x\n"), ParseError);
    CHECK_THROWS_AS((void)parse_mdp("ap: a\ninitial: s\nlabel s: z\ns go s 1\n"), ValidationError);
  }
}
