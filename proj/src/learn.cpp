#include "ltlrl/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "ltlrl/product.hpp"

namespace ltlrl {

// ---------------------------------------------------------------------------
// Product adapter

std::size_t ProductEnvironment::num_states() const { return product_.num_states(); }

std::span<const ActionId> ProductEnvironment::actions(StateId s) const { return product_.transitions().actions(s); }

StateId ProductEnvironment::step(StateId s, ActionId a, Rng& rng) const {
  return sample_step(product_.transitions(), s, a, rng);
}

bool ProductEnvironment::accepting(StateId s) const { return product_.is_accepting(s); }

StateId ProductEnvironment::initial_state() const { return product_.initial(); }

std::vector<StateId> ProductEnvironment::start_states() const {
  std::vector<StateId> out;
  for (StateId s = 0; s < product_.mdp().num_states(); ++s) out.push_back(product_.index(s, product_.ldba().initial()));
  return out;
}

// ---------------------------------------------------------------------------
// Q table

QTable::QTable(const Environment& env, double init) {
  begin_.reserve(env.num_states() + 1);
  begin_.push_back(0);
  for (StateId s = 0; s < env.num_states(); ++s) {
    const auto acts = env.actions(s);
    actions_.insert(actions_.end(), acts.begin(), acts.end());
    begin_.push_back(actions_.size());
  }
  values_.assign(actions_.size(), init);
}

std::size_t QTable::slot(StateId s, ActionId a) const {
  const auto acts = actions(s);
  const auto it = std::lower_bound(acts.begin(), acts.end(), a);
  if (it == acts.end() || *it != a) throw std::invalid_argument(fmt::format("action {} unavailable in state {}", a, s));
  return begin_[s] + static_cast<std::size_t>(it - acts.begin());
}

double& QTable::at(StateId s, ActionId a) { return values_[slot(s, a)]; }
double QTable::at(StateId s, ActionId a) const { return values_[slot(s, a)]; }

double QTable::max_value(StateId s) const {
  const auto v = values(s);
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

std::size_t QTable::greedy_index(StateId s) const {
  const auto v = values(s);
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double q_update(QTable& q, StateId s, ActionId a, StateId next, bool s_accepting, const RewardScheme& scheme,
                double alpha) {
  double& entry = q.at(s, a);
  entry = (1.0 - alpha) * entry + alpha * scheme.reward(s_accepting) +
          alpha * scheme.discount(s_accepting) * q.max_value(next);
  return entry;
}

// ---------------------------------------------------------------------------
// Schedules and configuration

double PiecewiseLinear::at(double progress) const {
  progress = std::clamp(progress, 0.0, 1.0);
  if (breakpoint <= 0.0) return mid + (end - mid) * progress;
  if (progress <= breakpoint) return start + (mid - start) * (progress / breakpoint);
  if (breakpoint >= 1.0) return mid;
  return mid + (end - mid) * ((progress - breakpoint) / (1.0 - breakpoint));
}

void LearnConfig::validate() const {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  if (log_interval == 0) throw std::invalid_argument("log interval must be at least 1");
  for (const auto* sched : {&epsilon, &alpha}) {
    for (double v : {sched->start, sched->mid, sched->end}) {
      if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument(fmt::format("schedule value {} outside (0,1]", v));
    }
    if (!(sched->breakpoint >= 0.0 && sched->breakpoint <= 1.0)) {
      throw std::invalid_argument("schedule breakpoint outside [0,1]");
    }
  }
}

// ---------------------------------------------------------------------------
// Distances

namespace {

template <class Reduce>
double masked_distance(std::span<const double> a, std::span<const double> b, std::span<const char> mask, Reduce reduce) {
  if (a.size() != b.size() || (!mask.empty() && mask.size() != a.size())) {
    throw std::invalid_argument("distance between vectors of different sizes");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask.empty() || mask[i]) acc = reduce(acc, a[i] - b[i]);
  }
  return acc;
}

}  // namespace

double l2_distance(std::span<const double> a, std::span<const double> b, std::span<const char> mask) {
  return std::sqrt(masked_distance(a, b, mask, [](double acc, double d) { return acc + d * d; }));
}

double linf_distance(std::span<const double> a, std::span<const double> b, std::span<const char> mask) {
  return masked_distance(a, b, mask, [](double acc, double d) { return std::max(acc, std::abs(d)); });
}

// ---------------------------------------------------------------------------
// Training

LearnResult run_learning(const Environment& env, const RewardScheme& scheme, const LearnConfig& cfg,
                         std::span<const double> oracle, std::span<const char> eval_mask) {
  cfg.validate();
  if (!oracle.empty() && oracle.size() != env.num_states()) {
    throw std::invalid_argument("oracle vector does not match the environment");
  }
  LearnResult result{QTable(env, cfg.q_init), {}};
  QTable& q = result.q;
  Rng rng(cfg.seed);
  const std::vector<StateId> starts = env.start_states();
  if (cfg.start == StartMode::random_state && starts.empty()) throw std::invalid_argument("no start states");

  std::size_t steps = 0;
  std::size_t visits = 0;
  for (std::size_t k = 0; k < cfg.episodes; ++k) {
    const double progress = static_cast<double>(k) / static_cast<double>(cfg.episodes);
    const double eps = cfg.epsilon.at(progress);
    const double alpha = cfg.alpha.at(progress);
    StateId s = cfg.start == StartMode::random_state ? starts[uniform_index(rng, starts.size())] : env.initial_state();
    double episode_return = 0.0;
    double discount = 1.0;
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      const auto acts = env.actions(s);
      const std::size_t idx = uniform01(rng) < eps ? uniform_index(rng, acts.size()) : q.greedy_index(s);
      const ActionId a = acts[idx];
      const StateId next = env.step(s, a, rng);
      const bool acc = env.accepting(s);
      episode_return += discount * scheme.reward(acc);
      discount *= scheme.discount(acc);
      visits += acc ? 1 : 0;
      double& entry = q.values(s)[idx];
      entry = (1.0 - alpha) * entry + alpha * scheme.reward(acc) + alpha * scheme.discount(acc) * q.max_value(next);
      s = next;
    }
    steps += cfg.horizon;
    if ((k + 1) % cfg.log_interval == 0 || k + 1 == cfg.episodes) {
      const double err = oracle.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : l2_distance(state_values(q), oracle, eval_mask);
      result.log.push_back({k + 1, steps, visits, episode_return, err});
    }
  }
  return result;
}

MemorylessPolicy greedy_policy(const QTable& q) {
  MemorylessPolicy p;
  p.choice.resize(q.num_states());
  for (StateId s = 0; s < q.num_states(); ++s) {
    const auto acts = q.actions(s);
    if (!acts.empty()) p.choice[s] = acts[q.greedy_index(s)];
  }
  return p;
}

std::vector<double> state_values(const QTable& q) {
  std::vector<double> v(q.num_states());
  for (StateId s = 0; s < q.num_states(); ++s) v[s] = q.max_value(s);
  return v;
}

std::vector<double> replication_errors(const Environment& env, const RewardScheme& scheme, const LearnConfig& cfg,
                                       std::size_t replications, std::span<const double> oracle,
                                       std::span<const char> eval_mask, Execution exec) {
  std::vector<double> errors(replications);
  LearnConfig base = cfg;
  base.log_interval = std::max<std::size_t>(1, cfg.episodes);
  const auto run = [&](std::size_t r) {
    LearnConfig c = base;
    c.seed = derive_seed(cfg.seed, r);
    const LearnResult res = run_learning(env, scheme, c);
    errors[r] = l2_distance(state_values(res.q), oracle, eval_mask);
  };
  const auto count = static_cast<std::int64_t>(replications);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < count; ++r) run(static_cast<std::size_t>(r));
  } else {
    for (std::int64_t r = 0; r < count; ++r) run(static_cast<std::size_t>(r));
  }
  return errors;
}

std::vector<ErrorCurvePoint> error_curve(const Environment& env, const RewardScheme& scheme, const LearnConfig& cfg,
                                         std::span<const std::size_t> budgets, std::size_t replications,
                                         std::span<const double> oracle, std::span<const char> eval_mask,
                                         Execution exec) {
  std::vector<ErrorCurvePoint> curve;
  for (std::size_t budget : budgets) {
    LearnConfig c = cfg;
    c.episodes = budget;
    const auto errors = replication_errors(env, scheme, c, replications, oracle, eval_mask, exec);
    ErrorCurvePoint pt{budget, replications, 0.0, 0.0};
    for (double e : errors) pt.mean += e;
    pt.mean /= static_cast<double>(std::max<std::size_t>(1, errors.size()));
    if (errors.size() > 1) {
      double ss = 0.0;
      for (double e : errors) ss += (e - pt.mean) * (e - pt.mean);
      pt.stddev = std::sqrt(ss / static_cast<double>(errors.size() - 1));
    }
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace ltlrl
