#include "ltlrl/ldba.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <fmt/format.h>

#include "ltlrl/errors.hpp"
#include "ltlrl/graph.hpp"
#include "text_util.hpp"

namespace ltlrl {

namespace {

constexpr std::size_t max_ldba_atoms = 16;

void check_state(const LdbaDescription& d, AutomatonState q, const char* what) {
  if (q >= d.num_states) {
    throw ValidationError(ValidationError::Kind::structure,
                          fmt::format("{} refers to state {} but the automaton has {} states", what, q, d.num_states));
  }
}

}  // namespace

Ldba::Ldba(LdbaDescription description) : desc_(std::move(description)) {
  using Kind = ValidationError::Kind;
  const std::size_t n = desc_.num_states;
  if (n == 0) throw ValidationError(Kind::structure, "automaton has no states");
  if (desc_.ap.size() > max_ldba_atoms) {
    throw ValidationError(Kind::structure, fmt::format("at most {} propositions are supported", max_ldba_atoms));
  }
  check_state(desc_, desc_.initial, "initial");

  accepting_.assign(n, 0);
  for (auto q : desc_.accepting) {
    check_state(desc_, q, "accepting");
    accepting_[q] = 1;
  }
  initial_component_.assign(n, 0);
  for (auto q : desc_.initial_component) {
    check_state(desc_, q, "initial_component");
    initial_component_[q] = 1;
  }
  for (const auto& e : desc_.edges) {
    check_state(desc_, e.from, "edge source");
    check_state(desc_, e.to, "edge target");
    if (!is_propositional(e.guard)) {
      throw ValidationError(Kind::structure,
                            fmt::format("guard '{}' on {} -> {} uses temporal operators", to_string(e.guard), e.from, e.to));
    }
  }
  for (const auto& m : desc_.epsilon_moves) {
    check_state(desc_, m.from, "epsilon source");
    check_state(desc_, m.to, "epsilon target");
  }

  // Determinism and totality over every label.
  const std::size_t labels = desc_.ap.label_count();
  constexpr AutomatonState none = ~AutomatonState{0};
  table_.assign(n * labels, none);
  std::vector<std::vector<const LdbaEdge*>> by_source(n);
  for (const auto& e : desc_.edges) by_source[e.from].push_back(&e);
  for (std::size_t q = 0; q < n; ++q) {
    for (Label l = 0; l < labels; ++l) {
      const LdbaEdge* enabled = nullptr;
      for (const LdbaEdge* e : by_source[q]) {
        if (!holds(e->guard, l)) continue;
        if (enabled) {
          throw ValidationError(Kind::determinism,
                                fmt::format("state {} has two transitions enabled on {} (to {} and {})", q,
                                            desc_.ap.format(l), enabled->to, e->to));
        }
        enabled = e;
      }
      if (!enabled) {
        throw ValidationError(Kind::totality,
                              fmt::format("state {} has no transition enabled on {}", q, desc_.ap.format(l)));
      }
      table_[q * labels + l] = enabled->to;
    }
  }

  // Bipartition into the initial component Q_I and accepting component Q_A.
  for (const auto& m : desc_.epsilon_moves) {
    if (!initial_component_[m.from]) {
      throw ValidationError(Kind::bipartition,
                            fmt::format("epsilon move {} -> {} leaves the accepting component", m.from, m.to));
    }
  }
  for (std::size_t q = 0; q < n; ++q) {
    if (initial_component_[q]) continue;
    for (Label l = 0; l < labels; ++l) {
      const AutomatonState t = table_[q * labels + l];
      if (initial_component_[t]) {
        throw ValidationError(Kind::bipartition,
                              fmt::format("accepting-component state {} moves to initial-component state {} on {}", q,
                                          t, desc_.ap.format(l)));
      }
    }
  }
  for (auto q : desc_.accepting) {
    if (initial_component_[q]) {
      throw ValidationError(Kind::bipartition, fmt::format("accepting state {} lies in the initial component", q));
    }
  }

  // Epsilon successors grouped per source, ordered by epsilon index.
  for (const auto& m : desc_.epsilon_moves) {
    if (std::find(epsilon_targets_.begin(), epsilon_targets_.end(), m.to) == epsilon_targets_.end()) {
      epsilon_targets_.push_back(m.to);
    }
  }
  std::vector<std::vector<AutomatonState>> succ(n);
  for (const auto& m : desc_.epsilon_moves) {
    auto& s = succ[m.from];
    if (std::find(s.begin(), s.end(), m.to) == s.end()) s.push_back(m.to);
  }
  epsilon_begin_.assign(n + 1, 0);
  for (std::size_t q = 0; q < n; ++q) {
    std::sort(succ[q].begin(), succ[q].end(),
              [&](AutomatonState a, AutomatonState b) { return epsilon_index(a) < epsilon_index(b); });
    epsilon_begin_[q + 1] = epsilon_begin_[q] + succ[q].size();
    epsilon_flat_.insert(epsilon_flat_.end(), succ[q].begin(), succ[q].end());
  }
}

std::span<const AutomatonState> Ldba::epsilon_successors(AutomatonState q) const {
  return std::span<const AutomatonState>(epsilon_flat_).subspan(epsilon_begin_.at(q),
                                                                epsilon_begin_.at(q + 1) - epsilon_begin_[q]);
}

std::size_t Ldba::epsilon_index(AutomatonState target) const {
  auto it = std::find(epsilon_targets_.begin(), epsilon_targets_.end(), target);
  if (it == epsilon_targets_.end()) throw std::out_of_range(fmt::format("no epsilon move targets state {}", target));
  return static_cast<std::size_t>(it - epsilon_targets_.begin());
}

std::string Ldba::epsilon_name(std::size_t index) { return fmt::format("eps_{}", index + 1); }

bool operator==(const Ldba& a, const Ldba& b) {
  const auto& x = a.desc_;
  const auto& y = b.desc_;
  if (!(x.ap == y.ap) || x.num_states != y.num_states || x.initial != y.initial || x.accepting != y.accepting ||
      x.initial_component != y.initial_component || x.edges.size() != y.edges.size() ||
      x.epsilon_moves.size() != y.epsilon_moves.size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.edges.size(); ++i) {
    if (x.edges[i].from != y.edges[i].from || x.edges[i].to != y.edges[i].to || !(x.edges[i].guard == y.edges[i].guard)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < x.epsilon_moves.size(); ++i) {
    if (x.epsilon_moves[i].from != y.epsilon_moves[i].from || x.epsilon_moves[i].to != y.epsilon_moves[i].to) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

AutomatonState parse_state(std::string_view token, std::size_t line) {
  AutomatonState v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(fmt::format("expected a state number, got '{}'", token), line, 0);
  }
  return v;
}

std::vector<AutomatonState> parse_states(std::string_view rest, std::size_t line) {
  std::vector<AutomatonState> out;
  for (auto tok : text::split_ws(rest)) out.push_back(parse_state(tok, line));
  return out;
}

}  // namespace

Ldba parse_ldba(std::string_view text) {
  LdbaDescription d;
  bool have_ap = false;
  bool have_states = false;
  bool have_initial = false;
  std::size_t line_no = 0;
  for (auto raw : text::lines(text)) {
    ++line_no;
    const std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'key: value' or 'src -> dst : guard'", line_no, 0);
    const std::string_view head = text::trim(line.substr(0, colon));
    const std::string_view rest = text::trim(line.substr(colon + 1));

    if (const auto arrow = head.find("->"); arrow != std::string_view::npos) {
      if (!have_ap) throw ParseError("'ap:' must precede the edges", line_no, 0);
      const auto from = parse_state(text::trim(head.substr(0, arrow)), line_no);
      const auto to = parse_state(text::trim(head.substr(arrow + 2)), line_no);
      if (rest == "eps" || rest == "epsilon") {
        d.epsilon_moves.push_back({from, to});
        continue;
      }
      if (rest.empty()) throw ParseError("missing guard", line_no, 0);
      try {
        d.edges.push_back({from, to, parse_ltl(rest, d.ap)});
      } catch (const ParseError& e) {
        throw ParseError(fmt::format("bad guard '{}': {}", rest, e.what()), line_no, e.column());
      } catch (const ValidationError& e) {
        throw ParseError(fmt::format("bad guard '{}': {}", rest, e.what()), line_no, 0);
      }
      continue;
    }

    if (head == "ap") {
      std::vector<std::string> names;
      for (auto tok : text::split_ws(rest)) names.emplace_back(tok);
      try {
        d.ap = AtomSet(std::move(names));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, 0);
      }
      have_ap = true;
    } else if (head == "states") {
      d.num_states = parse_state(rest, line_no);
      have_states = true;
    } else if (head == "initial") {
      d.initial = parse_state(rest, line_no);
      have_initial = true;
    } else if (head == "accepting") {
      d.accepting = parse_states(rest, line_no);
    } else if (head == "initial_component") {
      d.initial_component = parse_states(rest, line_no);
    } else {
      throw ParseError(fmt::format("unknown key '{}'", head), line_no, 0);
    }
  }
  if (!have_ap) throw ParseError("missing 'ap:' line", line_no, 0);
  if (!have_states) throw ParseError("missing 'states:' line", line_no, 0);
  if (!have_initial) throw ParseError("missing 'initial:' line", line_no, 0);
  return Ldba(std::move(d));
}

std::string render_ldba(const Ldba& ldba) {
  const auto& d = ldba.description();
  std::ostringstream out;
  auto join = [](const std::vector<AutomatonState>& v) {
    std::string s;
    for (auto q : v) s += " " + std::to_string(q);
    return s;
  };
  out << "ap:";
  for (const auto& n : d.ap.names()) out << ' ' << n;
  out << "\nstates: " << d.num_states << "\ninitial: " << d.initial << "\naccepting:" << join(d.accepting)
      << "\ninitial_component:" << join(d.initial_component) << '\n';
  for (const auto& e : d.edges) out << e.from << " -> " << e.to << " : " << to_string(e.guard) << '\n';
  for (const auto& m : d.epsilon_moves) out << m.from << " -> " << m.to << " : eps\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Acceptance

bool buchi_accepts(const Ldba& ldba, const StateLasso& run) {
  return std::any_of(run.cycle.begin(), run.cycle.end(), [&](AutomatonState q) { return ldba.is_accepting(q); });
}

bool accepts_lasso(const Ldba& ldba, const LassoWord& word) {
  if (word.cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  const std::size_t positions = word.positions();
  const std::size_t n = ldba.num_states() * positions;
  auto node = [&](std::size_t q, std::size_t pos) { return static_cast<std::uint32_t>(q * positions + pos); };
  Adjacency adj(n);
  for (std::size_t q = 0; q < ldba.num_states(); ++q) {
    for (std::size_t pos = 0; pos < positions; ++pos) {
      auto& out = adj[node(q, pos)];
      out.push_back(node(ldba.step(static_cast<AutomatonState>(q), word.at(pos)), word.successor(pos)));
      for (auto t : ldba.epsilon_successors(static_cast<AutomatonState>(q))) out.push_back(node(t, pos));
    }
  }
  std::vector<char> start(n, 0);
  start[node(ldba.initial(), 0)] = 1;
  const auto reach = forward_reachable(adj, start);
  const auto scc = strongly_connected_components(adj, reach);
  std::vector<std::size_t> size(scc.count, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (reach[v]) ++size[scc.component[v]];
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!reach[v] || !ldba.is_accepting(static_cast<AutomatonState>(v / positions))) continue;
    const auto c = scc.component[v];
    if (size[c] > 1) return true;
    if (std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end()) return true;
  }
  return false;
}

}  // namespace ltlrl
