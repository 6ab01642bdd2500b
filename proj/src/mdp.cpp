#include "ltlrl/mdp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "ltlrl/errors.hpp"
#include "ltlrl/graph.hpp"
#include "text_util.hpp"

namespace ltlrl {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  // Lemire's multiply-shift with rejection.
  const std::uint64_t range = n;
  std::uint64_t x = rng();
  __uint128_t m = static_cast<__uint128_t>(x) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = -range % range;
    while (low < threshold) {
      x = rng();
      m = static_cast<__uint128_t>(x) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// SparseMdp

SparseMdp::Builder::Builder(std::size_t num_states) : num_states_(num_states), rows_(num_states) {}

SparseMdp::Builder& SparseMdp::Builder::add_choice(StateId state, ActionId action, std::vector<Outcome> outcomes) {
  if (state >= num_states_) throw std::out_of_range(fmt::format("state {} out of range", state));
  rows_[state].emplace_back(action, std::move(outcomes));
  return *this;
}

SparseMdp SparseMdp::Builder::build() && {
  using Kind = ValidationError::Kind;
  SparseMdp m;
  m.state_begin_.reserve(num_states_ + 1);
  m.state_begin_.push_back(0);
  m.choice_begin_.push_back(0);
  for (std::size_t s = 0; s < num_states_; ++s) {
    auto& row = rows_[s];
    if (row.empty()) throw ValidationError(Kind::structure, fmt::format("state {} has no available action", s));
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& [action, outcomes] = row[i];
      if (i > 0 && row[i - 1].first == action) {
        throw ValidationError(Kind::structure, fmt::format("state {} lists action {} twice", s, action));
      }
      if (outcomes.empty()) {
        throw ValidationError(Kind::probability, fmt::format("state {} action {} has no outcomes", s, action));
      }
      double total = 0.0;
      for (const auto& o : outcomes) {
        if (o.target >= num_states_) {
          throw ValidationError(Kind::structure, fmt::format("state {} action {} targets unknown state {}", s, action, o.target));
        }
        if (!(o.probability > 0.0) || o.probability > 1.0 + probability_tolerance) {
          throw ValidationError(Kind::probability,
                                fmt::format("state {} action {} has probability {} outside (0,1]", s, action, o.probability));
        }
        total += o.probability;
        m.outcome_target_.push_back(o.target);
        m.outcome_prob_.push_back(o.probability);
      }
      if (std::abs(total - 1.0) > probability_tolerance) {
        throw ValidationError(Kind::probability,
                              fmt::format("state {} action {} probabilities sum to {:.12g}", s, action, total));
      }
      m.choice_action_.push_back(action);
      m.choice_begin_.push_back(m.outcome_target_.size());
    }
    m.state_begin_.push_back(m.choice_action_.size());
  }
  return m;
}

std::optional<ChoiceId> SparseMdp::find_choice(StateId s, ActionId a) const {
  if (s >= num_states()) return std::nullopt;
  const auto acts = actions(s);
  auto it = std::lower_bound(acts.begin(), acts.end(), a);
  if (it == acts.end() || *it != a) return std::nullopt;
  return static_cast<ChoiceId>(state_begin_[s] + static_cast<std::size_t>(it - acts.begin()));
}

std::vector<std::vector<std::uint32_t>> SparseMdp::graph() const {
  std::vector<std::vector<std::uint32_t>> adj(num_states());
  for (StateId s = 0; s < num_states(); ++s) {
    auto& out = adj[s];
    for (ChoiceId c = first_choice(s); c < end_choice(s); ++c) {
      for (StateId t : targets(c)) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return adj;
}

// ---------------------------------------------------------------------------
// LabeledMdp

std::optional<StateId> LabeledMdp::find_state(std::string_view name) const {
  auto it = std::find(state_names.begin(), state_names.end(), name);
  if (it == state_names.end()) return std::nullopt;
  return static_cast<StateId>(it - state_names.begin());
}

std::optional<ActionId> LabeledMdp::find_action(std::string_view name) const {
  auto it = std::find(action_names.begin(), action_names.end(), name);
  if (it == action_names.end()) return std::nullopt;
  return static_cast<ActionId>(it - action_names.begin());
}

void validate(const LabeledMdp& m) {
  using Kind = ValidationError::Kind;
  const std::size_t n = m.num_states();
  if (n == 0) throw ValidationError(Kind::structure, "MDP has no states");
  if (m.state_names.size() != n) throw ValidationError(Kind::structure, "state name count differs from state count");
  if (m.labels.size() != n) throw ValidationError(Kind::structure, "label count differs from state count");
  if (m.initial >= n) throw ValidationError(Kind::structure, "initial state out of range");
  const Label all = m.ap.size() >= 32 ? ~Label{0} : (Label{1} << m.ap.size()) - 1;
  for (std::size_t s = 0; s < n; ++s) {
    if (m.labels[s] & ~all) throw ValidationError(Kind::structure, fmt::format("state {} carries undeclared labels", s));
    for (ActionId a : m.transitions.actions(static_cast<StateId>(s))) {
      if (a >= m.action_names.size()) throw ValidationError(Kind::structure, fmt::format("action id {} has no name", a));
    }
  }
}

void validate_policy(const SparseMdp& m, const MemorylessPolicy& p) {
  if (p.choice.size() != m.num_states()) {
    throw ValidationError(ValidationError::Kind::invalid_policy,
                          fmt::format("policy covers {} states, model has {}", p.choice.size(), m.num_states()));
  }
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (!m.has_action(s, p.choice[s])) {
      throw ValidationError(ValidationError::Kind::invalid_policy,
                            fmt::format("policy selects unavailable action {} in state {}", p.choice[s], s));
    }
  }
}

// ---------------------------------------------------------------------------
// Markov chains

MarkovChain::MarkovChain(std::vector<std::size_t> row_begin, std::vector<StateId> target, std::vector<double> prob,
                         StateId initial)
    : row_begin_(std::move(row_begin)), target_(std::move(target)), prob_(std::move(prob)), initial_(initial) {
  for (std::size_t s = 0; s + 1 < row_begin_.size(); ++s) {
    double total = 0.0;
    for (std::size_t k = row_begin_[s]; k < row_begin_[s + 1]; ++k) total += prob_[k];
    if (std::abs(total - 1.0) > probability_tolerance) {
      throw ValidationError(ValidationError::Kind::probability, fmt::format("chain row {} sums to {:.12g}", s, total));
    }
  }
}

std::vector<std::vector<std::uint32_t>> MarkovChain::graph() const {
  std::vector<std::vector<std::uint32_t>> adj(num_states());
  for (StateId s = 0; s < num_states(); ++s) {
    for (std::size_t k = 0; k < targets(s).size(); ++k) {
      if (probabilities(s)[k] > 0.0) adj[s].push_back(targets(s)[k]);
    }
  }
  return adj;
}

MarkovChain induce_chain(const SparseMdp& m, const MemorylessPolicy& p, StateId initial) {
  validate_policy(m, p);
  std::vector<std::size_t> row_begin{0};
  std::vector<StateId> target;
  std::vector<double> prob;
  for (StateId s = 0; s < m.num_states(); ++s) {
    const ChoiceId c = *m.find_choice(s, p.choice[s]);
    const auto ts = m.targets(c);
    const auto ps = m.probabilities(c);
    target.insert(target.end(), ts.begin(), ts.end());
    prob.insert(prob.end(), ps.begin(), ps.end());
    row_begin.push_back(target.size());
  }
  return MarkovChain(std::move(row_begin), std::move(target), std::move(prob), initial);
}

std::vector<std::vector<StateId>> bsccs(const MarkovChain& c) {
  const auto adj = c.graph();
  const auto scc = strongly_connected_components(adj);
  std::vector<char> has_exit(scc.count, 0);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (auto w : adj[v]) {
      if (scc.component[w] != scc.component[v]) has_exit[scc.component[v]] = 1;
    }
  }
  std::map<std::uint32_t, std::vector<StateId>> groups;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (!has_exit[scc.component[v]]) groups[scc.component[v]].push_back(static_cast<StateId>(v));
  }
  std::vector<std::vector<StateId>> out;
  for (auto& [id, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

StateId sample_step(const SparseMdp& m, StateId s, ActionId a, Rng& rng) {
  const auto c = m.find_choice(s, a);
  if (!c) throw std::invalid_argument(fmt::format("action {} is not available in state {}", a, s));
  const auto ts = m.targets(*c);
  const auto ps = m.probabilities(*c);
  if (ts.size() == 1) return ts[0];
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    acc += ps[k];
    if (u < acc) return ts[k];
  }
  return ts.back();
}

// ---------------------------------------------------------------------------
// Edge-list format

namespace {

class NameTable {
 public:
  std::uint32_t intern(std::string_view name) {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it != names_.end()) return static_cast<std::uint32_t>(it - names_.begin());
    names_.emplace_back(name);
    return static_cast<std::uint32_t>(names_.size() - 1);
  }
  std::vector<std::string>& names() { return names_; }

 private:
  std::vector<std::string> names_;
};

double parse_probability(std::string_view token, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(fmt::format("expected a probability, got '{}'", token), line, 0);
  }
  return v;
}

}  // namespace

LabeledMdp parse_mdp(std::string_view text) {
  NameTable states;
  NameTable actions;
  std::vector<std::pair<StateId, std::vector<std::string>>> label_lines;
  struct Edge {
    StateId from;
    ActionId action;
    StateId to;
    double p;
    std::size_t line;
  };
  std::vector<Edge> edges;
  std::optional<std::string> initial;
  std::vector<std::string> ap_names;
  bool have_ap = false;

  std::size_t line_no = 0;
  for (auto raw : text::lines(text)) {
    ++line_no;
    const std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon != std::string_view::npos) {
      const std::string_view head = text::trim(line.substr(0, colon));
      const auto values = text::split_ws(line.substr(colon + 1));
      if (head == "ap") {
        for (auto v : values) ap_names.emplace_back(v);
        have_ap = true;
      } else if (head == "states") {
        for (auto v : values) states.intern(v);
      } else if (head == "actions") {
        for (auto v : values) actions.intern(v);
      } else if (head == "initial") {
        if (values.size() != 1) throw ParseError("'initial:' takes one state", line_no, 0);
        initial = std::string(values[0]);
        states.intern(values[0]);
      } else if (head.starts_with("label")) {
        const auto parts = text::split_ws(head);
        if (parts.size() != 2 || parts[0] != "label") throw ParseError("expected 'label <state>: <props>'", line_no, 0);
        std::vector<std::string> props;
        for (auto v : values) props.emplace_back(v);
        label_lines.emplace_back(states.intern(parts[1]), std::move(props));
      } else {
        throw ParseError(fmt::format("unknown key '{}'", head), line_no, 0);
      }
      continue;
    }
    const auto tok = text::split_ws(line);
    if (tok.size() != 4) throw ParseError("expected '<state> <action> <successor> <probability>'", line_no, 0);
    const StateId from = states.intern(tok[0]);
    const ActionId act = actions.intern(tok[1]);
    const StateId to = states.intern(tok[2]);
    edges.push_back({from, act, to, parse_probability(tok[3], line_no), line_no});
  }
  if (!have_ap) throw ParseError("missing 'ap:' line", line_no, 0);
  if (!initial) throw ParseError("missing 'initial:' line", line_no, 0);

  LabeledMdp m;
  m.ap = AtomSet(std::move(ap_names));
  m.state_names = std::move(states.names());
  m.action_names = std::move(actions.names());
  m.initial = *m.find_state(*initial);
  m.labels.assign(m.state_names.size(), 0);
  for (auto& [s, props] : label_lines) m.labels[s] |= m.ap.label_of(props);

  // Group edges per (state, action), preserving first-use order of outcomes.
  std::map<std::pair<StateId, ActionId>, std::vector<Outcome>> rows;
  for (const auto& e : edges) {
    auto& row = rows[{e.from, e.action}];
    auto it = std::find_if(row.begin(), row.end(), [&](const Outcome& o) { return o.target == e.to; });
    if (it != row.end()) {
      throw ParseError(fmt::format("duplicate edge {} {} {}", m.state_names[e.from], m.action_names[e.action],
                                   m.state_names[e.to]),
                       e.line, 0);
    }
    row.push_back({e.to, e.p});
  }
  SparseMdp::Builder builder(m.state_names.size());
  for (auto& [key, outcomes] : rows) builder.add_choice(key.first, key.second, std::move(outcomes));
  m.transitions = std::move(builder).build();
  validate(m);
  return m;
}

}  // namespace ltlrl
