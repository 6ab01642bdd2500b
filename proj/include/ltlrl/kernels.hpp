#pragma once

#include <span>

#include "ltlrl/mdp.hpp"

namespace ltlrl {

/// Serial kernels are the reference; parallel ones split states across
/// OpenMP threads and produce bit-identical results (Jacobi updates).
enum class Execution { serial, parallel };

/// One Jacobi sweep of max-reachability: out[s] = max_a sum_t P(s,a,t) x[t]
/// for states with fixed[s] == 0, out[s] = x[s] otherwise. Returns
/// max_s |out[s] - x[s]|.
double reachability_sweep(const SparseMdp& m, std::span<const double> x, std::span<const char> fixed,
                          std::span<double> out, Execution exec);

/// One Jacobi sweep of the Bellman optimality operator with state-dependent
/// reward and discount: out[s] = reward[s] + discount[s] * max_a sum_t P x[t].
/// Returns max_s |out[s] - x[s]|.
double bellman_sweep(const SparseMdp& m, std::span<const double> reward, std::span<const double> discount,
                     std::span<const double> x, std::span<double> out, Execution exec);

}  // namespace ltlrl
