#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ltlrl/kernels.hpp"
#include "ltlrl/mdp.hpp"
#include "ltlrl/reward.hpp"

namespace ltlrl {

class ProductMdp;

/// Everything the learner may observe: available actions, sampled successors
/// and whether a state is accepting. Transition probabilities stay hidden.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t num_states() const = 0;
  virtual std::span<const ActionId> actions(StateId s) const = 0;
  virtual StateId step(StateId s, ActionId a, Rng& rng) const = 0;
  virtual bool accepting(StateId s) const = 0;
  virtual StateId initial_state() const = 0;
  /// Candidate states for random episode starts.
  virtual std::vector<StateId> start_states() const = 0;
};

/// The product MDP seen through the sampling interface. Random starts are
/// the states <s, q0>.
class ProductEnvironment final : public Environment {
 public:
  explicit ProductEnvironment(const ProductMdp& product) : product_(product) {}
  std::size_t num_states() const override;
  std::span<const ActionId> actions(StateId s) const override;
  StateId step(StateId s, ActionId a, Rng& rng) const override;
  bool accepting(StateId s) const override;
  StateId initial_state() const override;
  std::vector<StateId> start_states() const override;

 private:
  const ProductMdp& product_;
};

/// Q values stored per state over that state's available actions.
class QTable {
 public:
  QTable() = default;
  QTable(const Environment& env, double init);

  std::size_t num_states() const noexcept { return begin_.empty() ? 0 : begin_.size() - 1; }
  std::span<const ActionId> actions(StateId s) const { return {actions_.data() + begin_[s], begin_[s + 1] - begin_[s]}; }
  std::span<const double> values(StateId s) const { return {values_.data() + begin_[s], begin_[s + 1] - begin_[s]}; }
  std::span<double> values(StateId s) { return {values_.data() + begin_[s], begin_[s + 1] - begin_[s]}; }
  /// Throws std::invalid_argument when a is not available in s.
  double& at(StateId s, ActionId a);
  double at(StateId s, ActionId a) const;
  double max_value(StateId s) const;
  /// Index into actions(s) of the largest value; the first one on ties.
  std::size_t greedy_index(StateId s) const;

  bool operator==(const QTable& other) const = default;

 private:
  std::size_t slot(StateId s, ActionId a) const;
  std::vector<std::size_t> begin_;
  std::vector<ActionId> actions_;
  std::vector<double> values_;
};

/// Q(s,a) <- (1-alpha) Q(s,a) + alpha R(s) + alpha Gamma(s) max_a' Q(s',a'),
/// with reward and discount taken at the current state s. Returns the new value.
double q_update(QTable& q, StateId s, ActionId a, StateId next, bool s_accepting, const RewardScheme& scheme,
                double alpha);

/// Linear from `start` to `mid` over progress [0, breakpoint], then from
/// `mid` to `end` over [breakpoint, 1].
struct PiecewiseLinear {
  double start = 1.0;
  double mid = 0.1;
  double end = 0.001;
  double breakpoint = 0.5;

  double at(double progress) const;
};

enum class StartMode { random_state, fixed_initial };

struct LearnConfig {
  std::size_t episodes = 0;
  std::size_t horizon = 100;
  StartMode start = StartMode::random_state;
  PiecewiseLinear epsilon;
  PiecewiseLinear alpha;
  std::uint64_t seed = 0;
  double q_init = 0.0;
  /// A log row every `log_interval` episodes (the last episode is always logged).
  std::size_t log_interval = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct LogRow {
  std::size_t episode;           // 1-based
  std::size_t steps;             // environment steps so far
  std::size_t accepting_visits;  // cumulative
  double episode_return;         // discounted return of the episode from its start
  double l2_error;               // vs the oracle vector, NaN without one
};

struct LearnResult {
  QTable q;
  std::vector<LogRow> log;
};

/// Tabular Q-learning with epsilon-greedy exploration over all available
/// actions, epsilon actions included. Schedules advance per episode. When
/// `oracle` is nonempty the log carries the L2 distance between max-Q and
/// the oracle over `eval_mask` states (all states when the mask is empty).
LearnResult run_learning(const Environment& env, const RewardScheme& scheme, const LearnConfig& cfg,
                         std::span<const double> oracle = {}, std::span<const char> eval_mask = {});

/// Per state the first action of maximal Q value.
MemorylessPolicy greedy_policy(const QTable& q);
/// Per state max_a Q(s,a).
std::vector<double> state_values(const QTable& q);

/// Euclidean and max distance over masked states (all when the mask is empty).
double l2_distance(std::span<const double> a, std::span<const double> b, std::span<const char> mask = {});
double linf_distance(std::span<const double> a, std::span<const double> b, std::span<const char> mask = {});

/// Final L2 error of `replications` independent runs; run r is seeded with
/// derive_seed(cfg.seed, r). Parallel execution distributes runs across
/// OpenMP threads; results do not depend on the execution mode.
std::vector<double> replication_errors(const Environment& env, const RewardScheme& scheme, const LearnConfig& cfg,
                                       std::size_t replications, std::span<const double> oracle,
                                       std::span<const char> eval_mask, Execution exec);

struct ErrorCurvePoint {
  std::size_t episodes;
  std::size_t replications;
  double mean;
  double stddev;  // sample standard deviation (n-1); 0 for one replication
};

std::vector<ErrorCurvePoint> error_curve(const Environment& env, const RewardScheme& scheme, const LearnConfig& cfg,
                                         std::span<const std::size_t> budgets, std::size_t replications,
                                         std::span<const double> oracle, std::span<const char> eval_mask,
                                         Execution exec);

}  // namespace ltlrl
