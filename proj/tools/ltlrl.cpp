// Command-line front end: check, learn, simulate, render, compare.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ltlrl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"LTL-constrained policy synthesis by Q-learning on product MDPs"};
  app.require_subcommand(1);
  ltlrl::cli::Options opt;
  std::string oracle;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (INI)")->required();
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--serial", opt.serial, "use the serial kernels");
  };

  auto* check = app.add_subcommand("check", "maximal satisfaction probabilities from the model");
  common(check);

  auto* learn = app.add_subcommand("learn", "Q-learning on the product MDP");
  common(learn);
  learn->add_option("--episodes", opt.episodes, "number of episodes");
  learn->add_option("--replications", opt.replications, "independent runs for the error curve");
  learn->add_option("--oracle", oracle, "oracle values CSV; without a file the oracle is computed")
      ->expected(0, 1);

  auto* simulate = app.add_subcommand("simulate", "roll out a product policy");
  common(simulate);
  simulate->add_option("--policy", opt.policy, "policy CSV")->required();
  simulate->add_option("--steps", opt.steps, "number of MDP steps");

  auto* render = app.add_subcommand("render", "grid panels for values or a policy");
  common(render);
  render->add_option("--values", opt.values, "values CSV");
  render->add_option("--policy", opt.policy, "policy CSV");

  auto* compare = app.add_subcommand("compare", "distance between learned values and the oracle");
  common(compare);
  compare->add_option("--oracle", oracle, "oracle values CSV")->required();
  compare->add_option("--qtable", opt.qtable, "Q table CSV");
  compare->add_option("--values", opt.values, "values CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ltlrl::cli::exit_validation;
  }

  for (auto* sub : {learn, compare}) {
    if (!sub->parsed() || sub->count("--oracle") == 0) continue;
    if (oracle.empty()) {
      opt.compute_oracle = true;
    } else {
      opt.oracle = oracle;
    }
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return ltlrl::cli::dispatch(command, opt, std::cout, std::cerr);
}
