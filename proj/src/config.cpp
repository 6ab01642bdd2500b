#include "ltlrl/config.hpp"

#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "ltlrl/errors.hpp"
#include "ltlrl/gridworld.hpp"
#include "ltlrl/io.hpp"
#include "text_util.hpp"

namespace ltlrl {

namespace pt = boost::property_tree;

RewardScheme ExperimentConfig::scheme() const {
  if (schedule) return RewardScheme(gamma, *schedule);
  return RewardScheme(gamma, gamma_b.value_or(0.99));
}

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text, const char* key) {
  std::vector<T> out;
  for (auto tok : text::split_ws(text)) {
    std::istringstream in{std::string(tok)};
    T v{};
    if (!(in >> v) || !in.eof()) throw ConfigError(fmt::format("bad value '{}' for '{}'", tok, key));
    out.push_back(v);
  }
  return out;
}

PiecewiseLinear parse_schedule(const std::string& text, double breakpoint, const char* key) {
  const auto v = parse_list<double>(text, key);
  if (v.size() != 3) throw ConfigError(fmt::format("'{}' takes three values: start mid end", key));
  return {v[0], v[1], v[2], breakpoint};
}

template <class T>
T get(const pt::ptree& tree, const char* key, T fallback) {
  try {
    return tree.get<T>(key, fallback);
  } catch (const pt::ptree_error&) {
    throw ConfigError(fmt::format("bad value for '{}'", key));
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }
  const auto resolve = [&](const std::string& p) { return (base_dir / p).lexically_normal(); };

  ExperimentConfig cfg;
  if (auto v = tree.get_optional<std::string>("model.grid")) cfg.grid = resolve(*v);
  if (auto v = tree.get_optional<std::string>("model.mdp")) cfg.mdp = resolve(*v);
  if (cfg.grid.has_value() == cfg.mdp.has_value()) throw ConfigError("[model] needs exactly one of 'grid' and 'mdp'");
  const auto ldba = tree.get_optional<std::string>("model.ldba");
  if (!ldba) throw ConfigError("[model] needs 'ldba'");
  cfg.ldba = resolve(*ldba);
  if (auto v = tree.get_optional<std::string>("model.formula")) cfg.formula = *v;

  cfg.gamma = get(tree, "reward.gamma", cfg.gamma);
  if (auto v = tree.get_optional<std::string>("reward.gamma_b_schedule")) {
    try {
      cfg.schedule = GammaSchedule::parse(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    cfg.gamma_b.reset();
  } else {
    cfg.gamma_b = get(tree, "reward.gamma_b", *cfg.gamma_b);
  }
  try {
    (void)cfg.scheme();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  LearnConfig& l = cfg.learn;
  l.episodes = get<std::size_t>(tree, "learn.episodes", 0);
  l.horizon = get<std::size_t>(tree, "learn.horizon", 100);
  const auto start = get<std::string>(tree, "learn.start", "random");
  if (start == "random") {
    l.start = StartMode::random_state;
  } else if (start == "initial") {
    l.start = StartMode::fixed_initial;
  } else {
    throw ConfigError(fmt::format("'start' must be 'random' or 'initial', got '{}'", start));
  }
  const double breakpoint = get(tree, "learn.breakpoint", 0.5);
  l.epsilon = parse_schedule(get<std::string>(tree, "learn.epsilon", "1.0 0.1 0.001"), breakpoint, "epsilon");
  l.alpha = parse_schedule(get<std::string>(tree, "learn.alpha", "1.0 0.1 0.001"), breakpoint, "alpha");
  l.seed = get<std::uint64_t>(tree, "learn.seed", 1);
  l.q_init = get(tree, "learn.q_init", 0.0);
  l.log_interval = get<std::size_t>(tree, "learn.log_interval", 1);
  try {
    l.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  cfg.replications = get<std::size_t>(tree, "experiment.replications", 1);
  if (cfg.replications == 0) throw ConfigError("'replications' must be at least 1");
  cfg.budgets = parse_list<std::size_t>(get<std::string>(tree, "experiment.budgets", ""), "budgets");
  cfg.out = resolve(get<std::string>(tree, "experiment.out", "out"));
  cfg.simulate_steps = get<std::size_t>(tree, "experiment.steps", 20);
  const auto evaluate = get<std::string>(tree, "experiment.evaluate", "reachable");
  if (evaluate != "reachable" && evaluate != "all") {
    throw ConfigError(fmt::format("'evaluate' must be 'reachable' or 'all', got '{}'", evaluate));
  }
  cfg.evaluate_all = evaluate == "all";
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_config(text, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {

template <class F>
auto with_file_context(const std::filesystem::path& path, F&& f) {
  try {
    return f(read_file(path));
  } catch (const ParseError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

Model load_model(const ExperimentConfig& cfg) {
  Model model;
  if (cfg.grid) {
    model.mdp = with_file_context(*cfg.grid, [](const std::string& text) {
      return std::make_shared<const LabeledMdp>(build_gridworld(parse_grid(text)));
    });
  } else {
    model.mdp = with_file_context(*cfg.mdp, [](const std::string& text) {
      return std::make_shared<const LabeledMdp>(parse_mdp(text));
    });
  }
  model.ldba = with_file_context(cfg.ldba, [](const std::string& text) {
    return std::make_shared<const Ldba>(parse_ldba(text));
  });
  try {
    model.product = std::make_shared<const ProductMdp>(model.mdp, model.ldba);
  } catch (const ValidationError& e) {
    throw ConfigError(fmt::format("{}: {}", cfg.ldba.string(), e.what()));
  }
  if (cfg.formula) {
    try {
      model.formula = parse_ltl(*cfg.formula, model.mdp->ap);
    } catch (const std::runtime_error& e) {
      throw ConfigError(fmt::format("formula '{}': {}", *cfg.formula, e.what()));
    }
  }
  return model;
}

std::vector<char> evaluation_mask(const ExperimentConfig& cfg, const ProductMdp& product) {
  if (cfg.evaluate_all) return std::vector<char>(product.num_states(), 1);
  if (cfg.learn.start == StartMode::fixed_initial) return product.reachable();
  std::vector<StateId> starts;
  for (StateId s = 0; s < product.mdp().num_states(); ++s) starts.push_back(product.index(s, product.ldba().initial()));
  return product.reachable_from(starts);
}

}  // namespace ltlrl
