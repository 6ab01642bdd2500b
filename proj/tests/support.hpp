#pragma once

// Fixtures and random generators shared by the test binaries.

#include <algorithm>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ltlrl/gridworld.hpp"
#include "ltlrl/io.hpp"
#include "ltlrl/ldba.hpp"
#include "ltlrl/ltl.hpp"
#include "ltlrl/mdp.hpp"
#include "ltlrl/product.hpp"

namespace support {

inline std::filesystem::path data_dir() { return LTLRL_DATA_DIR; }

inline std::shared_ptr<const ltlrl::Ldba> load_ldba(const std::string& name) {
  return std::make_shared<const ltlrl::Ldba>(ltlrl::parse_ldba(ltlrl::read_file(data_dir() / name)));
}

inline std::shared_ptr<const ltlrl::LabeledMdp> load_mdp(const std::string& name) {
  return std::make_shared<const ltlrl::LabeledMdp>(ltlrl::parse_mdp(ltlrl::read_file(data_dir() / name)));
}

inline std::shared_ptr<const ltlrl::LabeledMdp> load_grid(const std::string& name) {
  return std::make_shared<const ltlrl::LabeledMdp>(
      ltlrl::build_gridworld(ltlrl::parse_grid(ltlrl::read_file(data_dir() / name))));
}

inline std::shared_ptr<const ltlrl::ProductMdp> fig2_product() {
  return std::make_shared<const ltlrl::ProductMdp>(load_mdp("fig2.mdp"), load_ldba("fig1.ldba"));
}

inline std::shared_ptr<const ltlrl::ProductMdp> phi1_product() {
  return std::make_shared<const ltlrl::ProductMdp>(load_grid("phi1.grid"), load_ldba("phi1.ldba"));
}

/// Random distribution over `n` states with support size in [1, max_support].
inline std::vector<ltlrl::Outcome> random_distribution(ltlrl::Rng& rng, std::size_t n, std::size_t max_support) {
  const std::size_t k = 1 + ltlrl::uniform_index(rng, std::min(n, max_support));
  std::vector<ltlrl::StateId> targets;
  while (targets.size() < k) {
    const auto t = static_cast<ltlrl::StateId>(ltlrl::uniform_index(rng, n));
    if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
  }
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = 0.05 + ltlrl::uniform01(rng);
    total += x;
  }
  std::vector<ltlrl::Outcome> out;
  double used = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double p = i + 1 == k ? 1.0 - used : w[i] / total;
    used += p;
    out.push_back({targets[i], p});
  }
  return out;
}

/// Random MDP with `n` states and 1..max_actions actions per state.
inline ltlrl::SparseMdp random_mdp(ltlrl::Rng& rng, std::size_t n, std::size_t max_actions, std::size_t max_support = 3) {
  ltlrl::SparseMdp::Builder b(n);
  for (ltlrl::StateId s = 0; s < n; ++s) {
    const std::size_t k = 1 + ltlrl::uniform_index(rng, max_actions);
    for (ltlrl::ActionId a = 0; a < k; ++a) b.add_choice(s, a, random_distribution(rng, n, max_support));
  }
  return std::move(b).build();
}

inline std::vector<char> random_flags(ltlrl::Rng& rng, std::size_t n, double p) {
  std::vector<char> f(n);
  for (auto& x : f) x = ltlrl::uniform01(rng) < p ? 1 : 0;
  return f;
}

inline ltlrl::MemorylessPolicy random_policy(ltlrl::Rng& rng, const ltlrl::SparseMdp& m) {
  ltlrl::MemorylessPolicy p;
  for (ltlrl::StateId s = 0; s < m.num_states(); ++s) {
    const auto acts = m.actions(s);
    p.choice.push_back(acts[ltlrl::uniform_index(rng, acts.size())]);
  }
  return p;
}

}  // namespace support
