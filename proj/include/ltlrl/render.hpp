#pragma once

#include <span>
#include <string>

#include "ltlrl/mdp.hpp"
#include "ltlrl/product.hpp"

namespace ltlrl {

/// One grid panel per automaton state that occurs in `shown` (all states
/// when empty). Cells hold values to two decimals; obstacles print as ####.
/// Throws std::invalid_argument when the MDP has no grid geometry.
std::string render_values(const ProductMdp& p, std::span<const double> values, std::span<const char> shown = {});

/// Same panels with the chosen action per cell: ^ < v > for top, left, down,
/// right, and e1, e2, ... for epsilon actions.
std::string render_policy(const ProductMdp& p, const MemorylessPolicy& policy, std::span<const char> shown = {});

/// Two-column listing "state value" for any product.
std::string render_table(const ProductMdp& p, std::span<const double> values, std::span<const char> shown = {});

}  // namespace ltlrl
