#include "ltlrl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ltlrl {

namespace {

double best_expectation(const SparseMdp& m, StateId s, std::span<const double> x) {
  double best = -std::numeric_limits<double>::infinity();
  for (ChoiceId c = m.first_choice(s); c < m.end_choice(s); ++c) {
    const auto targets = m.targets(c);
    const auto probs = m.probabilities(c);
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) sum += probs[i] * x[targets[i]];
    best = std::max(best, sum);
  }
  return best;
}

template <class Update>
double sweep(std::size_t n, Execution exec, Update update) {
  double residual = 0.0;
  const auto count = static_cast<std::int64_t>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static) reduction(max : residual)
    for (std::int64_t s = 0; s < count; ++s) residual = std::max(residual, update(static_cast<StateId>(s)));
  } else {
    for (std::int64_t s = 0; s < count; ++s) residual = std::max(residual, update(static_cast<StateId>(s)));
  }
  return residual;
}

}  // namespace

double reachability_sweep(const SparseMdp& m, std::span<const double> x, std::span<const char> fixed,
                          std::span<double> out, Execution exec) {
  return sweep(m.num_states(), exec, [&](StateId s) {
    out[s] = fixed[s] ? x[s] : best_expectation(m, s, x);
    return std::abs(out[s] - x[s]);
  });
}

double bellman_sweep(const SparseMdp& m, std::span<const double> reward, std::span<const double> discount,
                     std::span<const double> x, std::span<double> out, Execution exec) {
  return sweep(m.num_states(), exec, [&](StateId s) {
    out[s] = reward[s] + discount[s] * best_expectation(m, s, x);
    return std::abs(out[s] - x[s]);
  });
}

}  // namespace ltlrl
