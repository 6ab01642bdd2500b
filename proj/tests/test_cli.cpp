#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include <unistd.h>

#include "ltlrl/cli.hpp"
#include "ltlrl/config.hpp"
#include "ltlrl/errors.hpp"
#include "ltlrl/io.hpp"
#include "ltlrl/learn.hpp"
#include "support.hpp"

using namespace ltlrl;
namespace fs = std::filesystem;

namespace {

// Scratch directory holding copies of the shipped data, removed afterwards.
struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / ("ltlrl_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& e : fs::directory_iterator(support::data_dir())) fs::copy_file(e.path(), dir / e.path().filename());
  }
  ~Scratch() { fs::remove_all(dir); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;

  fs::path write(const std::string& name, const std::string& text) const {
    write_file(dir / name, text);
    return dir / name;
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& command, const cli::Options& opt) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::dispatch(command, opt, out, err);
  return {code, out.str(), err.str()};
}

cli::Options options(const fs::path& config, const fs::path& out) {
  cli::Options o;
  o.config = config;
  o.out = out;
  return o;
}

std::string line_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size();
  return text.substr(start, text.find('\n', start) - start);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check reports the fig2 oracle") {
    const Scratch s;
    const auto r = run("check", options(s.dir / "fig2.ini", s.dir / "out"));
    CHECK(r.code == cli::exit_ok);
    CHECK(r.out.find("Pr_max at <s0,q0>: 1\n") != std::string::npos);
    const auto values = parse_values_csv(read_file(s.dir / "out" / "values.csv"));
    CHECK(values.size() == 8);
    CHECK(fs::exists(s.dir / "out" / "product.txt"));
  }

  TEST_CASE("validation failures exit with 1 and name the violation") {
    const Scratch s;
    std::string ldba = read_file(s.dir / "fig1.ldba");
    ldba += "1 -> 2 : eps\n";
    s.write("fig1.ldba", ldba);
    auto r = run("check", options(s.dir / "fig2.ini", s.dir / "out"));
    CHECK(r.code == cli::exit_validation);
    CHECK(r.err.find("bipartition") != std::string::npos);
    CHECK(r.err.find("fig1.ldba") != std::string::npos);

    r = run("check", options(s.dir / "missing.ini", s.dir / "out"));
    CHECK(r.code == cli::exit_validation);

    s.write("bad.ini", "[model]\nmdp = fig2.mdp\nldba = phi1.ldba\n");
    r = run("check", options(s.dir / "bad.ini", s.dir / "out"));
    CHECK(r.code == cli::exit_validation);
    CHECK(r.err.find("alphabet") != std::string::npos);

    s.write("bad_start.ini", "[model]\nmdp = fig2.mdp\nldba = fig1.ldba\n[learn]\nstart = sometimes\n");
    r = run("learn", options(s.dir / "bad_start.ini", s.dir / "out"));
    CHECK(r.code == cli::exit_validation);

    CHECK(run("frobnicate", options(s.dir / "fig2.ini", s.dir / "out")).code == cli::exit_validation);
  }

  TEST_CASE("learn is deterministic and compare reproduces its error") {
    const Scratch s;
    auto opt = options(s.dir / "fig2.ini", s.dir / "a");
    opt.episodes = 300;
    opt.compute_oracle = true;
    const auto first = run("learn", opt);
    REQUIRE(first.code == cli::exit_ok);
    opt.out = s.dir / "b";
    opt.serial = true;
    const auto second = run("learn", opt);
    REQUIRE(second.code == cli::exit_ok);
    for (const char* f : {"qtable.csv", "policy.csv", "learned_values.csv", "training_log.csv"}) {
      CHECK(read_file(s.dir / "a" / f) == read_file(s.dir / "b" / f));
    }

    REQUIRE(run("check", options(s.dir / "fig2.ini", s.dir / "oracle")).code == cli::exit_ok);
    auto cmp = options(s.dir / "fig2.ini", s.dir / "a");
    cmp.oracle = s.dir / "oracle" / "values.csv";
    cmp.qtable = s.dir / "a" / "qtable.csv";
    const auto c = run("compare", cmp);
    REQUIRE(c.code == cli::exit_ok);
    CHECK(line_after(c.out, "L2 error: ") == line_after(first.out, "final L2 error: "));
    CHECK_FALSE(line_after(c.out, "L2 error: ").empty());
  }

  TEST_CASE("simulate and render") {
    const Scratch s;
    auto opt = options(s.dir / "fig2.ini", s.dir / "out");
    opt.episodes = 2000;
    REQUIRE(run("learn", opt).code == cli::exit_ok);
    opt.policy = s.dir / "out" / "policy.csv";
    const auto sim = run("simulate", opt);
    CHECK(sim.code == cli::exit_ok);
    CHECK(sim.out.find("lasso: prefix") != std::string::npos);
    const auto ren = run("render", opt);
    CHECK(ren.code == cli::exit_ok);

    auto grid = options(s.dir / "phi1.ini", s.dir / "phi1");
    REQUIRE(run("check", grid).code == cli::exit_ok);
    grid.values = s.dir / "phi1" / "values.csv";
    const auto panels = run("render", grid);
    CHECK(panels.code == cli::exit_ok);
    CHECK(panels.out.find("0.80") != std::string::npos);

    auto none = options(s.dir / "fig2.ini", s.dir / "out");
    CHECK(run("simulate", none).code == cli::exit_validation);
  }

  TEST_CASE("config parsing") {
    const auto cfg = parse_config(
        "[model]\ngrid = g.grid\nldba = l.ldba\n[reward]\ngamma = 0.9\ngamma_b_schedule = power:0.5\n"
        "[learn]\nepisodes = 5\nstart = initial\nepsilon = 0.5 0.2 0.01\n[experiment]\nbudgets = 10 100\n"
        "evaluate = all\n",
        "/base");
    CHECK(cfg.grid == fs::path("/base/g.grid"));
    CHECK(cfg.ldba == fs::path("/base/l.ldba"));
    CHECK(cfg.learn.episodes == 5);
    CHECK(cfg.learn.start == StartMode::fixed_initial);
    CHECK(cfg.learn.epsilon.mid == 0.2);
    CHECK(cfg.budgets == std::vector<std::size_t>{10, 100});
    CHECK(cfg.evaluate_all);
    CHECK(cfg.scheme().gamma_b() == doctest::Approx(1.0 - std::sqrt(0.1)));
    CHECK_THROWS_AS(parse_config("[model]\nldba = l.ldba\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nmdp = m\nldba = l\n[learn]\nhorizon = 0\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nmdp = m\nldba = l\n[reward]\ngamma = 1.5\n", "/"), ConfigError);
  }

  TEST_CASE("tables read back exactly") {
    const auto p = support::fig2_product();
    const ProductEnvironment env(*p);
    LearnConfig cfg;
    cfg.episodes = 100;
    cfg.horizon = 10;
    cfg.seed = 4;
    const auto result = run_learning(env, RewardScheme(0.99, 0.9), cfg);
    CHECK(parse_qtable_csv(qtable_csv(*p, result.q), env) == result.q);
    const auto values = state_values(result.q);
    CHECK(parse_values_csv(values_csv(*p, values)) == values);
    const auto pol = greedy_policy(result.q);
    CHECK(parse_policy_csv(policy_csv(*p, pol), p->num_states()).choice == pol.choice);
    CHECK_THROWS_AS(parse_values_csv("index,state,mdp_state,automaton_state,accepting,value\n0,x,0,0,0,zz\n"),
                    ParseError);
    CHECK(split_csv("1,\"<s0,q0>\",\"a \"\"b\"\"\"") == std::vector<std::string>{"1", "<s0,q0>", "a \"b\""});
  }
}
