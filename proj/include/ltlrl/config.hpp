#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ltlrl/learn.hpp"
#include "ltlrl/ldba.hpp"
#include "ltlrl/ltl.hpp"
#include "ltlrl/mdp.hpp"
#include "ltlrl/product.hpp"
#include "ltlrl/reward.hpp"

namespace ltlrl {

/// Invalid configuration or model file; the message names the file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI-style experiment description:
///
///   [model]       grid = phi1.grid | mdp = fig2.mdp, ldba = phi1.ldba, formula = ...
///   [reward]      gamma = 0.99999, gamma_b = 0.99 | gamma_b_schedule = power:0.5
///   [learn]       episodes, horizon, start = random|initial, epsilon = 1.0 0.1 0.001,
///                 alpha = 1.0 0.1 0.001, breakpoint = 0.5, seed, q_init, log_interval
///   [experiment]  replications, budgets = 1000 10000, out, steps, evaluate = reachable|all
///
/// Relative paths are resolved against the directory of the config file.
struct ExperimentConfig {
  std::optional<std::filesystem::path> grid;
  std::optional<std::filesystem::path> mdp;
  std::filesystem::path ldba;
  std::optional<std::string> formula;

  double gamma = 0.99999;
  std::optional<double> gamma_b = 0.99;
  std::optional<GammaSchedule> schedule;

  LearnConfig learn;
  std::size_t replications = 1;
  std::vector<std::size_t> budgets;
  std::filesystem::path out = "out";
  std::size_t simulate_steps = 20;
  bool evaluate_all = false;  // otherwise states reachable from the episode starts

  RewardScheme scheme() const;
};

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Model {
  std::shared_ptr<const LabeledMdp> mdp;
  std::shared_ptr<const Ldba> ldba;
  std::shared_ptr<const ProductMdp> product;
  std::optional<LtlFormula> formula;  // over the MDP's propositions
};

/// Reads and validates the referenced files; errors become ConfigError.
Model load_model(const ExperimentConfig& cfg);

/// Product states the learner can visit under the configured start mode,
/// or every state when `evaluate_all` is set.
std::vector<char> evaluation_mask(const ExperimentConfig& cfg, const ProductMdp& product);

}  // namespace ltlrl
