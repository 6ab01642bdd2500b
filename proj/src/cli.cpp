#include "ltlrl/cli.hpp"

#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ltlrl/config.hpp"
#include "ltlrl/errors.hpp"
#include "ltlrl/io.hpp"
#include "ltlrl/learn.hpp"
#include "ltlrl/oracle.hpp"
#include "ltlrl/render.hpp"

namespace ltlrl::cli {

namespace {

struct Session {
  ExperimentConfig cfg;
  Model model;
  std::filesystem::path out_dir;
  Execution exec;
};

Session open_session(const Options& opt) {
  Session s{load_config(opt.config), {}, {}, opt.serial ? Execution::serial : Execution::parallel};
  if (opt.seed) s.cfg.learn.seed = *opt.seed;
  if (opt.episodes) s.cfg.learn.episodes = *opt.episodes;
  if (opt.replications) {
    if (*opt.replications == 0) throw ConfigError("--replications must be at least 1");
    s.cfg.replications = *opt.replications;
  }
  if (opt.steps) s.cfg.simulate_steps = *opt.steps;
  s.out_dir = opt.out.value_or(s.cfg.out);
  s.model = load_model(s.cfg);
  return s;
}

template <class T, class F>
T read_input(const std::filesystem::path& path, F&& parse) {
  try {
    return parse(read_file(path));
  } catch (const ParseError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> read_values(const std::filesystem::path& path, std::size_t expected) {
  auto v = read_input<std::vector<double>>(path, [](const std::string& t) { return parse_values_csv(t); });
  if (v.size() != expected) {
    throw ConfigError(fmt::format("{}: {} values for a product of {} states", path.string(), v.size(), expected));
  }
  return v;
}

std::optional<std::vector<double>> oracle_vector(const Options& opt, const Session& s) {
  if (opt.oracle) return read_values(*opt.oracle, s.model.product->num_states());
  if (opt.compute_oracle) return max_buchi_probability(*s.model.product, s.exec);
  return std::nullopt;
}

std::size_t count(const std::vector<char>& mask) {
  std::size_t n = 0;
  for (char c : mask) n += c ? 1 : 0;
  return n;
}

}  // namespace

int check(const Options& opt, std::ostream& out) {
  const Session s = open_session(opt);
  const ProductMdp& p = *s.model.product;
  const auto values = max_buchi_probability(p, s.exec);
  const auto shown = evaluation_mask(s.cfg, p);

  write_file(s.out_dir / "values.csv", values_csv(p, values));
  write_file(s.out_dir / "product.txt", dump_product(p));
  fmt::print(out, "product: {} states ({} MDP x {} automaton), {} reachable from the episode starts\n",
             p.num_states(), p.mdp().num_states(), p.num_automaton_states(), count(shown));
  fmt::print(out, "Pr_max at {}: {:.17g}\n", p.state_name(p.initial()), values[p.initial()]);
  std::string rendering;
  if (p.mdp().grid) {
    rendering = render_values(p, values, shown);
  } else {
    rendering = render_table(p, values, shown);
  }
  write_file(s.out_dir / "values.txt", rendering);
  out << rendering;
  fmt::print(out, "wrote {}\n", (s.out_dir / "values.csv").string());
  return exit_ok;
}

int learn(const Options& opt, std::ostream& out) {
  const Session s = open_session(opt);
  const ProductMdp& p = *s.model.product;
  const RewardScheme scheme = s.cfg.scheme();
  const ProductEnvironment env(p);
  const auto oracle = oracle_vector(opt, s);
  const auto mask = evaluation_mask(s.cfg, p);
  const LearnConfig& cfg = s.cfg.learn;

  if (cfg.episodes == 0) fmt::print(out, "warning: 0 episodes; the policy is the tie-break default\n");
  const LearnResult result = oracle ? run_learning(env, scheme, cfg, *oracle, mask) : run_learning(env, scheme, cfg);
  const auto learned = state_values(result.q);
  const auto policy = greedy_policy(result.q);

  write_file(s.out_dir / "qtable.csv", qtable_csv(p, result.q));
  write_file(s.out_dir / "policy.csv", policy_csv(p, policy));
  write_file(s.out_dir / "learned_values.csv", values_csv(p, learned));
  write_file(s.out_dir / "training_log.csv", training_log_csv(result.log));
  fmt::print(out, "episodes: {}  horizon: {}  gamma: {}  gamma_B: {}  seed: {}\n", cfg.episodes, cfg.horizon,
             scheme.gamma(), scheme.gamma_b(), cfg.seed);

  if (oracle) {
    fmt::print(out, "final L2 error: {:.17g}\n", l2_distance(learned, *oracle, mask));
    fmt::print(out, "final max error: {:.17g}\n", linf_distance(learned, *oracle, mask));
    const auto achieved = policy_buchi_probability(p, policy);
    std::size_t optimal = 0;
    for (StateId x = 0; x < p.num_states(); ++x) {
      if (mask[x] && achieved[x] >= (*oracle)[x] - 1e-9) ++optimal;
    }
    fmt::print(out, "greedy policy attains Pr_max at {}/{} evaluated states; Pr at {}: {:.17g}\n", optimal,
               count(mask), p.state_name(p.initial()), achieved[p.initial()]);

    if (s.cfg.replications > 1) {
      std::vector<std::size_t> budgets = s.cfg.budgets;
      if (budgets.empty()) budgets.push_back(cfg.episodes);
      const auto curve = error_curve(env, scheme, cfg, budgets, s.cfg.replications, *oracle, mask, s.exec);
      write_file(s.out_dir / "error_curve.csv", error_curve_csv(curve));
      for (const auto& pt : curve) {
        fmt::print(out, "budget {:>8}: mean L2 {:.6f}  sd {:.6f}  ({} replications)\n", pt.episodes, pt.mean, pt.stddev,
                   pt.replications);
      }
    }
  } else if (s.cfg.replications > 1) {
    fmt::print(out, "note: replications need an oracle (--oracle); skipped the error curve\n");
  }
  fmt::print(out, "wrote {}\n", s.out_dir.string());
  return exit_ok;
}

int simulate(const Options& opt, std::ostream& out) {
  const Session s = open_session(opt);
  const ProductMdp& p = *s.model.product;
  if (!opt.policy) throw ConfigError("simulate needs --policy");
  const auto policy = read_input<MemorylessPolicy>(
      *opt.policy, [&](const std::string& t) { return parse_policy_csv(t, p.num_states()); });
  Rng rng(s.cfg.learn.seed);
  const Trace trace = ltlrl::simulate(s.model.product, policy, s.cfg.simulate_steps, rng, s.model.formula);

  fmt::print(out, "step,state,label,arrival_q,epsilons,acting_q,action\n");
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& st = trace.steps[t];
    std::string eps;
    for (ActionId e : st.epsilons) eps += (eps.empty() ? "" : " ") + p.action_name(e);
    fmt::print(out, "{},\"{}\",\"{}\",{},{},{},{}\n", t, p.mdp().state_names[st.state],
               p.mdp().ap.format(p.mdp().labels[st.state]), st.arrival, eps, st.acting, p.action_name(st.action));
  }
  if (trace.loop_start) {
    fmt::print(out, "lasso: prefix {} steps, cycle {} steps\n", *trace.loop_start, *trace.loop_end - *trace.loop_start);
    fmt::print(out, "buchi accepting: {}\n", trace.buchi_accepting ? "yes" : "no");
    if (trace.formula_holds) fmt::print(out, "formula holds on lasso: {}\n", *trace.formula_holds ? "yes" : "no");
  } else {
    fmt::print(out, "lasso: none within {} steps\n", trace.steps.size());
  }
  return exit_ok;
}

int render(const Options& opt, std::ostream& out) {
  const Session s = open_session(opt);
  const ProductMdp& p = *s.model.product;
  const auto shown = evaluation_mask(s.cfg, p);
  if (opt.values.has_value() == opt.policy.has_value()) throw ConfigError("render needs exactly one of --values and --policy");
  if (opt.values) {
    const auto values = read_values(*opt.values, p.num_states());
    if (!p.mdp().grid) {
      out << "the MDP has no grid layout; listing values as a table\n" << render_table(p, values, shown);
    } else {
      out << render_values(p, values, shown);
    }
    return exit_ok;
  }
  const auto policy = read_input<MemorylessPolicy>(
      *opt.policy, [&](const std::string& t) { return parse_policy_csv(t, p.num_states()); });
  validate_policy(p.transitions(), policy);
  if (!p.mdp().grid) {
    out << "the MDP has no grid layout; listing the policy as a table\n";
    for (StateId x = 0; x < p.num_states(); ++x) {
      if (shown[x]) fmt::print(out, "{:<16} {}\n", p.state_name(x), p.action_name(policy.choice[x]));
    }
  } else {
    out << render_policy(p, policy, shown);
  }
  return exit_ok;
}

int compare(const Options& opt, std::ostream& out) {
  const Session s = open_session(opt);
  const ProductMdp& p = *s.model.product;
  const auto mask = evaluation_mask(s.cfg, p);
  if (!opt.oracle) throw ConfigError("compare needs --oracle");
  const auto oracle = read_values(*opt.oracle, p.num_states());
  std::vector<double> learned;
  if (opt.qtable) {
    const ProductEnvironment env(p);
    learned = state_values(read_input<QTable>(*opt.qtable, [&](const std::string& t) { return parse_qtable_csv(t, env); }));
  } else if (opt.values) {
    learned = read_values(*opt.values, p.num_states());
  } else {
    throw ConfigError("compare needs --qtable or --values");
  }
  fmt::print(out, "L2 error: {:.17g}\n", l2_distance(learned, oracle, mask));
  fmt::print(out, "max error: {:.17g}\n", linf_distance(learned, oracle, mask));
  return exit_ok;
}

int dispatch(const std::string& command, const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    if (command == "check") return check(opt, out);
    if (command == "learn") return learn(opt, out);
    if (command == "simulate") return simulate(opt, out);
    if (command == "render") return render(opt, out);
    if (command == "compare") return compare(opt, out);
    fmt::print(err, "unknown command '{}'\n", command);
    return exit_validation;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_validation;
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_validation;
  } catch (const ValidationError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_validation;
  } catch (const std::exception& e) {
    fmt::print(err, "runtime error: {}\n", e.what());
    return exit_runtime;
  }
}

}  // namespace ltlrl::cli
