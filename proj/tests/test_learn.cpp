#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ltlrl/learn.hpp"
#include "ltlrl/oracle.hpp"
#include "support.hpp"

using namespace ltlrl;

namespace {

// Two states behind the sampling interface only: "wait" (action 0) keeps
// state 0 with probability 0.7, "go" (action 1) reaches the accepting
// state 1, which then stays. No transition table is exposed.
class HiddenChain final : public Environment {
 public:
  std::size_t num_states() const override { return 2; }
  std::span<const ActionId> actions(StateId s) const override {
    return s == 0 ? std::span<const ActionId>(two_) : std::span<const ActionId>(one_);
  }
  StateId step(StateId s, ActionId a, Rng& rng) const override {
    if (s == 1) return 1;
    if (a == 1) return 1;
    return uniform01(rng) < 0.7 ? 0 : 1;
  }
  bool accepting(StateId s) const override { return s == 1; }
  StateId initial_state() const override { return 0; }
  std::vector<StateId> start_states() const override { return {0, 1}; }

 private:
  std::vector<ActionId> two_{0, 1};
  std::vector<ActionId> one_{0};
};

LearnConfig quick_config(std::size_t episodes, std::uint64_t seed) {
  LearnConfig cfg;
  cfg.episodes = episodes;
  cfg.horizon = 20;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("learn") {
  TEST_CASE("update rule examples") {
    const auto p = support::fig2_product();
    const ProductEnvironment env(*p);
    const RewardScheme s(0.99999, 0.99);
    const StateId acc = p->index(*p->mdp().find_state("s1"), 2);
    const StateId rej = p->index(*p->mdp().find_state("s1"), 0);
    const ActionId theta = *p->find_action("theta");

    QTable q(env, 0.0);
    CHECK(q_update(q, acc, theta, acc, true, s, 0.5) == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(q.at(acc, theta) == doctest::Approx(0.005).epsilon(1e-15));

    QTable z(env, 0.0);
    CHECK(q_update(z, rej, theta, rej, false, s, 0.5) == 0.0);

    QTable r(env, 0.0);
    r.at(rej, theta) = 0.4;
    r.at(acc, theta) = 1.0;
    CHECK(q_update(r, rej, theta, acc, false, s, 0.1) == doctest::Approx(0.459999).epsilon(1e-14));
    CHECK_THROWS_AS(q_update(r, rej, *p->find_action("alpha"), acc, false, s, 0.1), std::invalid_argument);
  }

  TEST_CASE("greedy policy: argmax, ties to the lowest action, epsilon actions count") {
    const auto p = support::fig2_product();
    const ProductEnvironment env(*p);
    const StateId s0q0 = p->initial();
    const ActionId alpha = *p->find_action("alpha");
    const ActionId beta = *p->find_action("beta");
    const ActionId eps1 = *p->find_action("eps_1");

    QTable q(env, 0.0);
    CHECK(greedy_policy(q).choice[s0q0] == alpha);
    q.at(s0q0, alpha) = 0.3;
    q.at(s0q0, beta) = 0.7;
    CHECK(greedy_policy(q).choice[s0q0] == beta);
    q.at(s0q0, alpha) = 0.7;
    CHECK(greedy_policy(q).choice[s0q0] == alpha);
    q.at(s0q0, eps1) = 0.9;
    CHECK(greedy_policy(q).choice[s0q0] == eps1);
    CHECK(state_values(q)[s0q0] == 0.9);
  }

  TEST_CASE("values stay in [0,1] under arbitrary updates") {
    const auto p = support::phi1_product();
    const ProductEnvironment env(*p);
    Rng rng(21);
    for (double init : {0.0, 0.5, 1.0}) {
      QTable q(env, init);
      const RewardScheme s(0.5 + 0.5 * 0.999 * uniform01(rng), 0.5 + 0.49 * uniform01(rng));
      for (int i = 0; i < 200000; ++i) {
        const auto x = static_cast<StateId>(uniform_index(rng, p->num_states()));
        const auto acts = q.actions(x);
        const ActionId a = acts[uniform_index(rng, acts.size())];
        const auto next = static_cast<StateId>(uniform_index(rng, p->num_states()));
        const double v = q_update(q, x, a, next, p->is_accepting(x), s, uniform01(rng));
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
      }
    }
  }

  TEST_CASE("schedules") {
    const PiecewiseLinear f;
    CHECK(f.at(0.0) == 1.0);
    CHECK(f.at(0.25) == doctest::Approx(0.55));
    CHECK(f.at(0.5) == doctest::Approx(0.1));
    CHECK(f.at(0.75) == doctest::Approx(0.0505));
    CHECK(f.at(1.0) == doctest::Approx(0.001));
    LearnConfig bad = quick_config(10, 1);
    bad.horizon = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = quick_config(10, 1);
    bad.alpha.end = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = quick_config(10, 1);
    bad.epsilon.breakpoint = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("zero episodes return the initial table") {
    const auto p = support::fig2_product();
    const ProductEnvironment env(*p);
    LearnConfig cfg = quick_config(0, 1);
    cfg.q_init = 0.25;
    const auto result = run_learning(env, RewardScheme(0.99, 0.9), cfg);
    CHECK(result.q == QTable(env, 0.25));
    CHECK(result.log.empty());
  }

  TEST_CASE("seeded runs are bit-identical") {
    const auto p = support::phi1_product();
    const ProductEnvironment env(*p);
    const RewardScheme s(0.99999, 0.99);
    const auto a = run_learning(env, s, quick_config(500, 42));
    const auto b = run_learning(env, s, quick_config(500, 42));
    const auto c = run_learning(env, s, quick_config(500, 43));
    CHECK(a.q == b.q);
    CHECK_FALSE(a.q == c.q);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) CHECK(a.log[i].episode_return == b.log[i].episode_return);
  }

  TEST_CASE("the sampling interface is enough to learn") {
    const HiddenChain env;
    LearnConfig cfg = quick_config(2000, 3);
    cfg.start = StartMode::fixed_initial;
    const auto result = run_learning(env, RewardScheme(0.99, 0.9), cfg);
    CHECK(greedy_policy(result.q).choice[0] == 1);
    CHECK(result.log.size() == 2000);
    CHECK(result.log.back().steps == 2000 * 20);
    CHECK(std::isnan(result.log.back().l2_error));
    CHECK(result.log.back().accepting_visits > 0);
  }

  TEST_CASE("fig2: learned greedy policy is satisfaction-optimal") {
    const auto p = support::fig2_product();
    const ProductEnvironment env(*p);
    const auto oracle = max_buchi_probability(*p);
    const auto result = run_learning(env, RewardScheme(0.99999, 0.99), quick_config(10000, 1), oracle);
    const auto pr = policy_buchi_probability(*p, greedy_policy(result.q));
    CHECK(pr[p->initial()] == 1.0);
    CHECK(result.log.back().l2_error == doctest::Approx(l2_distance(state_values(result.q), oracle)));
  }

  TEST_CASE("distances") {
    const std::vector<double> a{0.0, 1.0, 3.0};
    const std::vector<double> b{0.0, 0.0, 0.0};
    CHECK(l2_distance(a, b) == doctest::Approx(std::sqrt(10.0)));
    CHECK(linf_distance(a, b) == 3.0);
    const std::vector<char> mask{1, 1, 0};
    CHECK(l2_distance(a, b, mask) == 1.0);
    CHECK(linf_distance(a, b, mask) == 1.0);
  }

  TEST_CASE("replications: serial and parallel agree, error curve statistics") {
    const auto p = support::fig2_product();
    const ProductEnvironment env(*p);
    const RewardScheme s(0.99999, 0.99);
    const auto oracle = max_buchi_probability(*p);
    const auto cfg = quick_config(200, 9);
    const auto serial = replication_errors(env, s, cfg, 6, oracle, {}, Execution::serial);
    const auto parallel = replication_errors(env, s, cfg, 6, oracle, {}, Execution::parallel);
    CHECK(serial == parallel);

    const std::vector<std::size_t> budgets{200};
    const auto curve = error_curve(env, s, cfg, budgets, 6, oracle, {}, Execution::serial);
    REQUIRE(curve.size() == 1);
    double mean = 0.0;
    for (double e : serial) mean += e;
    mean /= 6.0;
    double ss = 0.0;
    for (double e : serial) ss += (e - mean) * (e - mean);
    CHECK(curve[0].mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(curve[0].stddev == doctest::Approx(std::sqrt(ss / 5.0)).epsilon(1e-12));
  }
}
