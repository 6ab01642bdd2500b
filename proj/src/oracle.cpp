#include "ltlrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "ltlrl/graph.hpp"

namespace ltlrl {

namespace {

constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t max_sweeps = 10'000'000;

void check_sizes(const SparseMdp& m, std::span<const char> flags) {
  if (flags.size() != m.num_states()) {
    throw std::invalid_argument(fmt::format("{} flags for {} states", flags.size(), m.num_states()));
  }
}

double choice_expectation(const SparseMdp& m, ChoiceId c, std::span<const double> v) {
  const auto targets = m.targets(c);
  const auto probs = m.probabilities(c);
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) sum += probs[i] * v[targets[i]];
  return sum;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Solves A x = b and applies iterative refinement while the residual of the
/// caller's fixed-point equation stays above `tolerance`.
template <class Residual>
Eigen::VectorXd solve_refined(const SparseMatrix& a, const Eigen::VectorXd& b, double tolerance, Residual residual) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("sparse factorization failed: singular system");
  Eigen::VectorXd x = lu.solve(b);
  for (int round = 0; round < 4; ++round) {
    if (residual(x) < tolerance) return x;
    const Eigen::VectorXd r = b - a * x;
    x += lu.solve(r);
  }
  if (residual(x) >= tolerance) {
    throw std::runtime_error(fmt::format("linear solve residual {} above {}", residual(x), tolerance));
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// End components

MecDecomposition maximal_end_components(const SparseMdp& m, std::span<const char> accepting) {
  check_sizes(m, accepting);
  const std::size_t n = m.num_states();
  std::vector<char> state_alive(n, 1);
  std::vector<char> choice_alive(m.num_choices(), 1);
  SccDecomposition scc;

  for (bool changed = true; changed;) {
    changed = false;
    Adjacency adj(n);
    for (StateId s = 0; s < n; ++s) {
      if (!state_alive[s]) continue;
      for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) {
        if (!choice_alive[c]) continue;
        for (StateId t : m.targets(c)) adj[s].push_back(t);
      }
    }
    scc = strongly_connected_components(adj, state_alive);
    for (StateId s = 0; s < n; ++s) {
      if (!state_alive[s]) continue;
      bool any = false;
      for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) {
        if (!choice_alive[c]) continue;
        for (StateId t : m.targets(c)) {
          if (!state_alive[t] || scc.component[t] != scc.component[s]) {
            choice_alive[c] = 0;
            changed = true;
            break;
          }
        }
        any = any || choice_alive[c];
      }
      if (!any) {
        state_alive[s] = 0;
        changed = true;
      }
    }
  }

  MecDecomposition out;
  out.component_of.assign(n, none);
  std::map<std::uint32_t, std::uint32_t> renumber;  // SCC id -> MEC id, by smallest member
  for (StateId s = 0; s < n; ++s) {
    if (!state_alive[s]) continue;
    auto [it, fresh] = renumber.emplace(scc.component[s], static_cast<std::uint32_t>(out.components.size()));
    if (fresh) out.components.emplace_back();
    EndComponent& ec = out.components[it->second];
    out.component_of[s] = it->second;
    ec.states.push_back(s);
    auto& acts = ec.actions.emplace_back();
    for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) {
      if (choice_alive[c]) acts.push_back(m.action_of(c));
    }
    ec.accepting = ec.accepting || accepting[s];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reachability

QualitativeReach qualitative_max_reach(const SparseMdp& m, std::span<const char> target) {
  check_sizes(m, target);
  const std::size_t n = m.num_states();
  QualitativeReach q;
  const auto can_reach = backward_reachable(m.graph(), target);
  q.zero.assign(n, 0);
  for (StateId s = 0; s < n; ++s) q.zero[s] = can_reach[s] ? 0 : 1;

  // Greatest fixpoint U: states that reach the target almost surely while
  // never leaving U, for some choice of actions.
  std::vector<char> u(n, 1);
  for (;;) {
    std::vector<char> r(target.begin(), target.end());
    for (bool grew = true; grew;) {
      grew = false;
      for (StateId s = 0; s < n; ++s) {
        if (r[s] || !u[s]) continue;
        for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) {
          const auto targets = m.targets(c);
          const bool stays = std::all_of(targets.begin(), targets.end(), [&](StateId t) { return u[t] != 0; });
          const bool hits = std::any_of(targets.begin(), targets.end(), [&](StateId t) { return r[t] != 0; });
          if (stays && hits) {
            r[s] = 1;
            grew = true;
            break;
          }
        }
      }
    }
    if (r == u) break;
    u = std::move(r);
  }
  q.one = std::move(u);
  return q;
}

std::vector<double> max_reachability(const SparseMdp& m, std::span<const char> target, Execution exec) {
  const QualitativeReach qual = qualitative_max_reach(m, target);
  const std::size_t n = m.num_states();
  std::vector<double> x(n, 0.0);
  std::vector<char> fixed(n, 0);
  for (StateId s = 0; s < n; ++s) {
    if (qual.one[s]) x[s] = 1.0;
    fixed[s] = qual.one[s] || qual.zero[s];
  }
  std::vector<double> next(n);
  for (std::size_t sweep = 0;; ++sweep) {
    if (sweep == max_sweeps) throw std::runtime_error("max reachability did not converge");
    const double residual = reachability_sweep(m, x, fixed, next, exec);
    x.swap(next);
    if (residual < reachability_tolerance) break;
  }
  return x;
}

std::vector<double> max_buchi_probability(const SparseMdp& m, std::span<const char> accepting, Execution exec) {
  const MecDecomposition mecs = maximal_end_components(m, accepting);
  std::vector<char> target(m.num_states(), 0);
  for (const auto& ec : mecs.components) {
    if (!ec.accepting) continue;
    for (StateId s : ec.states) target[s] = 1;
  }
  return max_reachability(m, target, exec);
}

std::vector<double> max_buchi_probability(const ProductMdp& p, Execution exec) {
  return max_buchi_probability(p.transitions(), p.accepting(), exec);
}

// ---------------------------------------------------------------------------
// Fixed policies

std::vector<double> policy_buchi_probability(const SparseMdp& m, std::span<const char> accepting,
                                             const MemorylessPolicy& policy) {
  check_sizes(m, accepting);
  validate_policy(m, policy);
  const std::size_t n = m.num_states();
  const MarkovChain chain = induce_chain(m, policy, 0);

  std::vector<char> target(n, 0);
  for (const auto& bscc : bsccs(chain)) {
    if (std::any_of(bscc.begin(), bscc.end(), [&](StateId s) { return accepting[s] != 0; })) {
      for (StateId s : bscc) target[s] = 1;
    }
  }
  const auto can_reach = backward_reachable(chain.graph(), target);

  std::vector<double> x(n, 0.0);
  std::vector<std::int64_t> slot(n, -1);
  std::vector<StateId> unknown;
  for (StateId s = 0; s < n; ++s) {
    if (target[s]) {
      x[s] = 1.0;
    } else if (can_reach[s]) {
      slot[s] = static_cast<std::int64_t>(unknown.size());
      unknown.push_back(s);
    }
  }
  if (unknown.empty()) return x;

  const auto k = static_cast<Eigen::Index>(unknown.size());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    triplets.emplace_back(i, i, 1.0);
    const StateId s = unknown[static_cast<std::size_t>(i)];
    const auto targets = chain.targets(s);
    const auto probs = chain.probabilities(s);
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (target[targets[j]]) {
        b[i] += probs[j];
      } else if (slot[targets[j]] >= 0) {
        triplets.emplace_back(i, slot[targets[j]], -probs[j]);
      }
    }
  }
  SparseMatrix a(k, k);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  const auto residual = [&](const Eigen::VectorXd& y) { return (a * y - b).lpNorm<Eigen::Infinity>(); };
  const Eigen::VectorXd y = solve_refined(a, b, reachability_tolerance, residual);
  for (Eigen::Index i = 0; i < k; ++i) x[unknown[static_cast<std::size_t>(i)]] = std::clamp(y[i], 0.0, 1.0);
  return x;
}

std::vector<double> policy_buchi_probability(const ProductMdp& p, const MemorylessPolicy& policy) {
  return policy_buchi_probability(p.transitions(), p.accepting(), policy);
}

std::vector<double> policy_discounted_value(const SparseMdp& m, std::span<const char> accepting,
                                            const MemorylessPolicy& policy, const RewardScheme& scheme) {
  check_sizes(m, accepting);
  validate_policy(m, policy);
  const auto n = static_cast<Eigen::Index>(m.num_states());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd r(n);
  for (StateId s = 0; s < m.num_states(); ++s) {
    const bool acc = accepting[s] != 0;
    r[s] = scheme.reward(acc);
    const double discount = scheme.discount(acc);
    triplets.emplace_back(s, s, 1.0);
    const ChoiceId c = *m.find_choice(s, policy.choice[s]);
    const auto targets = m.targets(c);
    const auto probs = m.probabilities(c);
    for (std::size_t j = 0; j < targets.size(); ++j) triplets.emplace_back(s, targets[j], -discount * probs[j]);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());  // duplicates (self-loops) are summed
  a.makeCompressed();
  const auto residual = [&](const Eigen::VectorXd& v) { return (a * v - r).lpNorm<Eigen::Infinity>(); };
  const Eigen::VectorXd v = solve_refined(a, r, discounted_tolerance, residual);
  return {v.data(), v.data() + v.size()};
}

std::vector<double> policy_discounted_value(const ProductMdp& p, const MemorylessPolicy& policy,
                                            const RewardScheme& scheme) {
  return policy_discounted_value(p.transitions(), p.accepting(), policy, scheme);
}

// ---------------------------------------------------------------------------
// Optimal discounted values

MemorylessPolicy greedy_from_values(const SparseMdp& m, std::span<const char> accepting, const RewardScheme& scheme,
                                    std::span<const double> values, double tie) {
  check_sizes(m, accepting);
  MemorylessPolicy policy;
  policy.choice.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) best = std::max(best, choice_expectation(m, c, values));
    for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) {
      // Reward and discount are shared by all actions of s, so comparing the
      // discounted expectations is enough.
      if (scheme.discount(accepting[s] != 0) * (best - choice_expectation(m, c, values)) <= tie) {
        policy.choice[s] = m.action_of(c);
        break;
      }
    }
  }
  return policy;
}

OptimalValues optimal_discounted_values(const SparseMdp& m, std::span<const char> accepting,
                                        const RewardScheme& scheme, Execution exec) {
  check_sizes(m, accepting);
  const std::size_t n = m.num_states();
  MemorylessPolicy policy;
  policy.choice.resize(n);
  for (StateId s = 0; s < n; ++s) policy.choice[s] = m.actions(s).front();

  std::vector<double> v;
  for (std::size_t round = 0;; ++round) {
    if (round == 10'000) throw std::runtime_error("policy iteration did not stabilize");
    v = policy_discounted_value(m, accepting, policy, scheme);
    bool improved = false;
    for (StateId s = 0; s < n; ++s) {
      const double current = choice_expectation(m, *m.find_choice(s, policy.choice[s]), v);
      double best = current;
      ActionId best_action = policy.choice[s];
      for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) {
        const double value = choice_expectation(m, c, v);
        if (value > best + 1e-13) {
          best = value;
          best_action = m.action_of(c);
        }
      }
      if (best_action != policy.choice[s]) {
        policy.choice[s] = best_action;
        improved = true;
      }
    }
    if (!improved) break;
  }

  std::vector<double> reward(n), discount(n), next(n);
  for (StateId s = 0; s < n; ++s) {
    reward[s] = scheme.reward(accepting[s] != 0);
    discount[s] = scheme.discount(accepting[s] != 0);
  }
  for (std::size_t sweep = 0;; ++sweep) {
    if (sweep == max_sweeps) throw std::runtime_error("Bellman iteration did not converge");
    const double residual = bellman_sweep(m, reward, discount, v, next, exec);
    v.swap(next);
    if (residual < discounted_tolerance) break;
  }
  return {v, greedy_from_values(m, accepting, scheme, v)};
}

OptimalValues optimal_discounted_values(const ProductMdp& p, const RewardScheme& scheme, Execution exec) {
  return optimal_discounted_values(p.transitions(), p.accepting(), scheme, exec);
}

// ---------------------------------------------------------------------------
// Threshold scan

ThresholdScan satisfaction_threshold(const SparseMdp& m, std::span<const char> accepting,
                                     std::span<const double> gammas, const GammaSchedule& schedule, double tolerance) {
  ThresholdScan scan;
  scan.gammas.assign(gammas.begin(), gammas.end());
  std::sort(scan.gammas.begin(), scan.gammas.end());
  const auto pr_max = max_buchi_probability(m, accepting);
  for (double gamma : scan.gammas) {
    const RewardScheme scheme(gamma, schedule);
    const auto opt = optimal_discounted_values(m, accepting, scheme);
    const auto pr = policy_buchi_probability(m, accepting, opt.policy);
    double gap = 0.0;
    for (std::size_t s = 0; s < pr.size(); ++s) gap = std::max(gap, pr_max[s] - pr[s]);
    scan.max_gap.push_back(gap);
    scan.optimal.push_back(gap <= tolerance ? 1 : 0);
  }
  for (std::size_t i = scan.gammas.size(); i-- > 0;) {
    if (!scan.optimal[i]) break;
    scan.threshold = scan.gammas[i];
  }
  return scan;
}

ThresholdScan satisfaction_threshold(const ProductMdp& p, std::span<const double> gammas,
                                     const GammaSchedule& schedule, double tolerance) {
  return satisfaction_threshold(p.transitions(), p.accepting(), gammas, schedule, tolerance);
}

}  // namespace ltlrl
