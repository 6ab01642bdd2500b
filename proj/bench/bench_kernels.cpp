// Serial reference vs OpenMP kernels on a large slippery grid times the phi1 automaton.

#include <memory>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "ltlrl/gridworld.hpp"
#include "ltlrl/io.hpp"
#include "ltlrl/kernels.hpp"
#include "ltlrl/ldba.hpp"
#include "ltlrl/oracle.hpp"
#include "ltlrl/product.hpp"

using namespace ltlrl;

namespace {

// n x n grid tiled with the 5x4 phi1 pattern.
std::shared_ptr<const ProductMdp> grid_product(std::size_t n) {
  static const char* tile[] = {"..c.", "...A", "..c.", "B.A.", ".c.c"};
  std::string text = "rows: " + std::to_string(n) + "\ncols: " + std::to_string(n) +
                     "\nap: a b c\ninitial: 0 0\nslip: 8 1 1\nglyph A : a absorbing\nglyph B : b absorbing\n"
                     "glyph c : c\nlayout:\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) text += (r == 0 && c == 0) ? '.' : tile[r % 5][c % 4];
    text += '\n';
  }
  auto mdp = std::make_shared<const LabeledMdp>(build_gridworld(parse_grid(text)));
  auto ldba = std::make_shared<const Ldba>(parse_ldba(read_file(std::string(LTLRL_DATA_DIR) + "/phi1.ldba")));
  return std::make_shared<const ProductMdp>(mdp, ldba);
}

const ProductMdp& shared_product(std::size_t n) {
  static std::shared_ptr<const ProductMdp> cached;
  static std::size_t cached_n = 0;
  if (!cached || cached_n != n) {
    cached = grid_product(n);
    cached_n = n;
  }
  return *cached;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void BM_BellmanSweep(benchmark::State& state) {
  const auto& p = shared_product(static_cast<std::size_t>(state.range(0)));
  const auto& m = p.transitions();
  const RewardScheme s(0.99999, 0.99);
  std::vector<double> reward(m.num_states()), discount(m.num_states());
  for (StateId x = 0; x < m.num_states(); ++x) {
    reward[x] = s.reward(p.is_accepting(x));
    discount[x] = s.discount(p.is_accepting(x));
  }
  std::vector<double> x(m.num_states(), 0.5), out(m.num_states());
  for (auto _ : state) {
    benchmark::DoNotOptimize(bellman_sweep(m, reward, discount, x, out, exec_of(state)));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m.num_states()));
}

void BM_ReachabilitySweep(benchmark::State& state) {
  const auto& p = shared_product(static_cast<std::size_t>(state.range(0)));
  const auto& m = p.transitions();
  std::vector<char> fixed(p.accepting().begin(), p.accepting().end());
  std::vector<double> x(m.num_states());
  for (StateId i = 0; i < m.num_states(); ++i) x[i] = fixed[i] ? 1.0 : 0.0;
  std::vector<double> out(m.num_states());
  for (auto _ : state) {
    benchmark::DoNotOptimize(reachability_sweep(m, x, fixed, out, exec_of(state)));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m.num_states()));
}

void BM_MaxBuchi(benchmark::State& state) {
  const auto& p = shared_product(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(max_buchi_probability(p, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_BellmanSweep)->ArgsProduct({{100, 300}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_ReachabilitySweep)->ArgsProduct({{100, 300}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_MaxBuchi)->ArgsProduct({{100}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
