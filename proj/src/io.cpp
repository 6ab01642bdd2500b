#include "ltlrl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "ltlrl/errors.hpp"
#include "text_util.hpp"

namespace ltlrl {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) { return fmt::format("{:.17g}", v); }

template <class T>
T parse_field(const std::string& field, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    if constexpr (std::is_floating_point_v<T>) {
      if (field == "nan") return std::numeric_limits<T>::quiet_NaN();
    }
    throw ParseError(fmt::format("bad numeric field '{}'", field), line, 0);
  }
  return v;
}

/// Data rows of a CSV with the expected header.
std::vector<std::pair<std::vector<std::string>, std::size_t>> rows(std::string_view text, std::string_view header,
                                                                   std::size_t width) {
  const auto all = text::lines(text);
  if (all.empty() || text::trim(all.front()) != header) {
    throw ParseError(fmt::format("expected header '{}'", header), 1, 0);
  }
  std::vector<std::pair<std::vector<std::string>, std::size_t>> out;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (text::trim(all[i]).empty()) continue;
    auto fields = split_csv(all[i]);
    if (fields.size() != width) {
      throw ParseError(fmt::format("expected {} fields, got {}", width, fields.size()), i + 1, 0);
    }
    out.emplace_back(std::move(fields), i + 1);
  }
  return out;
}

constexpr std::string_view values_header = "index,state,mdp_state,automaton_state,accepting,value";
constexpr std::string_view qtable_header = "index,state,action_id,action,value";
constexpr std::string_view policy_header = "index,state,action_id,action";

}  // namespace

std::string values_csv(const ProductMdp& p, std::span<const double> values) {
  std::string out = std::string(values_header) + "\n";
  for (StateId x = 0; x < p.num_states(); ++x) {
    out += fmt::format("{},{},{},{},{},{}\n", x, quote(p.state_name(x)), quote(p.mdp().state_names[p.mdp_state(x)]),
                       p.automaton_state(x), p.is_accepting(x) ? 1 : 0, number(values[x]));
  }
  return out;
}

std::vector<double> parse_values_csv(std::string_view text) {
  const auto data = rows(text, values_header, 6);
  std::vector<double> v(data.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& [fields, line] : data) {
    const auto idx = parse_field<std::size_t>(fields[0], line);
    if (idx >= v.size() || !std::isnan(v[idx])) throw ParseError(fmt::format("bad or repeated index {}", idx), line, 0);
    v[idx] = parse_field<double>(fields[5], line);
  }
  return v;
}

std::string qtable_csv(const ProductMdp& p, const QTable& q) {
  std::string out = std::string(qtable_header) + "\n";
  for (StateId x = 0; x < q.num_states(); ++x) {
    const auto acts = q.actions(x);
    const auto vals = q.values(x);
    for (std::size_t i = 0; i < acts.size(); ++i) {
      out += fmt::format("{},{},{},{},{}\n", x, quote(p.state_name(x)), acts[i], p.action_name(acts[i]), number(vals[i]));
    }
  }
  return out;
}

QTable parse_qtable_csv(std::string_view text, const Environment& env) {
  QTable q(env, std::numeric_limits<double>::quiet_NaN());
  for (const auto& [fields, line] : rows(text, qtable_header, 5)) {
    const auto x = parse_field<StateId>(fields[0], line);
    const auto a = parse_field<ActionId>(fields[2], line);
    if (x >= q.num_states()) throw ParseError(fmt::format("state {} out of range", x), line, 0);
    try {
      q.at(x, a) = parse_field<double>(fields[4], line);
    } catch (const std::invalid_argument&) {
      throw ParseError(fmt::format("action {} unavailable in state {}", a, x), line, 0);
    }
  }
  for (StateId x = 0; x < q.num_states(); ++x) {
    for (double v : q.values(x)) {
      if (std::isnan(v)) throw ParseError(fmt::format("Q table misses entries of state {}", x), 0, 0);
    }
  }
  return q;
}

std::string policy_csv(const ProductMdp& p, const MemorylessPolicy& policy) {
  std::string out = std::string(policy_header) + "\n";
  for (StateId x = 0; x < policy.choice.size(); ++x) {
    const ActionId a = policy.choice[x];
    out += fmt::format("{},{},{},{}\n", x, quote(p.state_name(x)), a, p.action_name(a));
  }
  return out;
}

MemorylessPolicy parse_policy_csv(std::string_view text, std::size_t num_states) {
  constexpr auto unset = std::numeric_limits<ActionId>::max();
  MemorylessPolicy policy{std::vector<ActionId>(num_states, unset)};
  for (const auto& [fields, line] : rows(text, policy_header, 4)) {
    const auto x = parse_field<StateId>(fields[0], line);
    if (x >= num_states) throw ParseError(fmt::format("state {} out of range", x), line, 0);
    policy.choice[x] = parse_field<ActionId>(fields[2], line);
  }
  for (StateId x = 0; x < num_states; ++x) {
    if (policy.choice[x] == unset) throw ParseError(fmt::format("policy misses state {}", x), 0, 0);
  }
  return policy;
}

std::string training_log_csv(std::span<const LogRow> log) {
  std::string out = "episode,steps,accepting_visits,return,l2_error\n";
  for (const auto& r : log) {
    out += fmt::format("{},{},{},{},{}\n", r.episode, r.steps, r.accepting_visits, number(r.episode_return),
                       std::isnan(r.l2_error) ? std::string() : number(r.l2_error));
  }
  return out;
}

std::string error_curve_csv(std::span<const ErrorCurvePoint> curve) {
  std::string out = "episodes,replications,mean_l2,stddev_l2\n";
  for (const auto& pt : curve) {
    out += fmt::format("{},{},{},{}\n", pt.episodes, pt.replications, number(pt.mean), number(pt.stddev));
  }
  return out;
}

}  // namespace ltlrl
