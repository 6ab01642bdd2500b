#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace ltlrl::cli {

/// Exit codes of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_runtime = 2;

struct Options {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::optional<std::size_t> replications;
  /// Oracle for error reporting: a values CSV, or computed in-process when
  /// `compute_oracle` is set.
  std::optional<std::filesystem::path> oracle;
  bool compute_oracle = false;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> policy;
  std::optional<std::filesystem::path> values;
  std::optional<std::filesystem::path> qtable;
  std::optional<std::size_t> steps;
  bool serial = false;
};

/// Oracle-only analysis: Pr_max table, rendering and product dump.
int check(const Options& opt, std::ostream& out);
/// Q-learning run plus optional replicated error curve.
int learn(const Options& opt, std::ostream& out);
/// Seeded rollout of a product policy through its finite-memory controller.
int simulate(const Options& opt, std::ostream& out);
/// Grid panels for a values or policy file.
int render(const Options& opt, std::ostream& out);
/// L2 and max distance between learned values and an oracle table.
int compare(const Options& opt, std::ostream& out);

/// Runs a command, mapping exceptions to exit codes and messages on `err`.
int dispatch(const std::string& command, const Options& opt, std::ostream& out, std::ostream& err);

}  // namespace ltlrl::cli
