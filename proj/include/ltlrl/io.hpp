#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltlrl/learn.hpp"
#include "ltlrl/mdp.hpp"
#include "ltlrl/product.hpp"

namespace ltlrl {

/// Throws std::runtime_error naming the path on failure.
std::string read_file(const std::filesystem::path& path);
/// Creates missing parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Splits one CSV record; fields may be double-quoted with "" escapes.
std::vector<std::string> split_csv(std::string_view line);

// CSV tables keyed by product-state index. Doubles use 17 significant digits
// so that reading a table back reproduces the values exactly.

/// index,state,mdp_state,automaton_state,accepting,value
std::string values_csv(const ProductMdp& p, std::span<const double> values);
/// Values by the index column; throws ParseError on malformed rows or gaps.
std::vector<double> parse_values_csv(std::string_view text);

/// index,state,action_id,action,value
std::string qtable_csv(const ProductMdp& p, const QTable& q);
/// Fills a table shaped by `env`; throws ParseError on unknown entries.
QTable parse_qtable_csv(std::string_view text, const Environment& env);

/// index,state,action_id,action
std::string policy_csv(const ProductMdp& p, const MemorylessPolicy& policy);
MemorylessPolicy parse_policy_csv(std::string_view text, std::size_t num_states);

/// episode,steps,accepting_visits,return,l2_error
std::string training_log_csv(std::span<const LogRow> log);
/// episodes,replications,mean_l2,stddev_l2
std::string error_curve_csv(std::span<const ErrorCurvePoint> curve);

}  // namespace ltlrl
