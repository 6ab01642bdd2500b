#include "ltlrl/gridworld.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "ltlrl/errors.hpp"
#include "text_util.hpp"

namespace ltlrl {

const char* direction_name(Direction d) noexcept {
  switch (d) {
    case Direction::top: return "top";
    case Direction::left: return "left";
    case Direction::down: return "down";
    case Direction::right: return "right";
  }
  return "?";
}

namespace {

// Headings rotated a quarter turn counter-clockwise / clockwise.
Direction left_of(Direction d) {
  switch (d) {
    case Direction::top: return Direction::left;
    case Direction::left: return Direction::down;
    case Direction::down: return Direction::right;
    case Direction::right: return Direction::top;
  }
  return d;
}

Direction right_of(Direction d) {
  switch (d) {
    case Direction::top: return Direction::right;
    case Direction::right: return Direction::down;
    case Direction::down: return Direction::left;
    case Direction::left: return Direction::top;
  }
  return d;
}

void check_cell(const GridSpec& g, const Cell& c, const char* what) {
  if (c.first >= g.rows || c.second >= g.cols) {
    throw ValidationError(ValidationError::Kind::structure,
                          fmt::format("{} cell ({},{}) lies outside the {}x{} grid", what, c.first, c.second, g.rows, g.cols));
  }
}

}  // namespace

LabeledMdp build_gridworld(const GridSpec& g) {
  using Kind = ValidationError::Kind;
  if (g.rows == 0 || g.cols == 0) throw ValidationError(Kind::structure, "grid is empty");
  for (const auto& [c, l] : g.labels) check_cell(g, c, "labeled");
  for (const auto& c : g.obstacles) check_cell(g, c, "obstacle");
  for (const auto& c : g.absorbing) check_cell(g, c, "absorbing");
  for (const auto& [c, acts] : g.restricted) {
    check_cell(g, c, "restricted");
    if (acts.empty()) throw ValidationError(Kind::structure, fmt::format("cell ({},{}) allows no action", c.first, c.second));
  }
  check_cell(g, g.initial, "initial");
  if (g.obstacles.count(g.initial)) throw ValidationError(Kind::structure, "initial cell is an obstacle");
  const unsigned total_weight = g.slip.forward + g.slip.left + g.slip.right;
  if (total_weight == 0) throw ValidationError(Kind::probability, "slip weights are all zero");

  GridGeometry geo;
  geo.rows = g.rows;
  geo.cols = g.cols;
  geo.state_of_cell.assign(g.rows * g.cols, std::nullopt);
  LabeledMdp m;
  m.ap = g.ap;
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      if (g.obstacles.count({r, c})) continue;
      const auto id = static_cast<StateId>(geo.cell_of_state.size());
      geo.state_of_cell[r * g.cols + c] = id;
      geo.cell_of_state.emplace_back(r, c);
      geo.absorbing.push_back(g.absorbing.count({r, c}) ? 1 : 0);
      m.state_names.push_back(fmt::format("({},{})", r, c));
      auto it = g.labels.find({r, c});
      m.labels.push_back(it == g.labels.end() ? 0 : it->second);
    }
  }
  if (geo.cell_of_state.empty()) throw ValidationError(Kind::structure, "every cell is an obstacle");
  for (Direction d : all_directions) m.action_names.emplace_back(direction_name(d));

  auto move = [&](Cell from, Direction d) -> StateId {
    long r = static_cast<long>(from.first);
    long c = static_cast<long>(from.second);
    switch (d) {
      case Direction::top: --r; break;
      case Direction::down: ++r; break;
      case Direction::left: --c; break;
      case Direction::right: ++c; break;
    }
    if (r < 0 || c < 0 || r >= static_cast<long>(g.rows) || c >= static_cast<long>(g.cols)) {
      return *geo.state_at(from.first, from.second);
    }
    const auto target = geo.state_at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    return target ? *target : *geo.state_at(from.first, from.second);
  };

  SparseMdp::Builder builder(geo.cell_of_state.size());
  for (StateId s = 0; s < geo.cell_of_state.size(); ++s) {
    const Cell cell = geo.cell_of_state[s];
    std::vector<Direction> allowed(all_directions.begin(), all_directions.end());
    if (auto it = g.restricted.find(cell); it != g.restricted.end()) allowed = it->second;
    std::sort(allowed.begin(), allowed.end());
    allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
    for (Direction d : allowed) {
      if (geo.absorbing[s]) {
        builder.add_choice(s, static_cast<ActionId>(d), {{s, 1.0}});
        continue;
      }
      // Integer weights per successor, converted once so each row sums exactly.
      std::vector<std::pair<StateId, unsigned>> weights;
      auto add = [&](StateId t, unsigned w) {
        if (w == 0) return;
        auto it = std::find_if(weights.begin(), weights.end(), [&](const auto& p) { return p.first == t; });
        if (it == weights.end()) {
          weights.emplace_back(t, w);
        } else {
          it->second += w;
        }
      };
      add(move(cell, d), g.slip.forward);
      add(move(cell, left_of(d)), g.slip.left);
      add(move(cell, right_of(d)), g.slip.right);
      std::vector<Outcome> outcomes;
      for (auto [t, w] : weights) outcomes.push_back({t, static_cast<double>(w) / total_weight});
      builder.add_choice(s, static_cast<ActionId>(d), std::move(outcomes));
    }
  }
  m.transitions = std::move(builder).build();
  m.initial = *geo.state_at(g.initial.first, g.initial.second);
  m.grid = std::move(geo);
  validate(m);
  return m;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::size_t parse_count(std::string_view token, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(fmt::format("expected a nonnegative integer, got '{}'", token), line, 0);
  }
  return v;
}

Direction parse_direction(std::string_view name, std::size_t line) {
  for (Direction d : all_directions) {
    if (name == direction_name(d)) return d;
  }
  throw ParseError(fmt::format("unknown action '{}'", name), line, 0);
}

struct Glyph {
  std::vector<std::string> props;
  bool obstacle = false;
  bool absorbing = false;
  std::vector<Direction> actions;
};

}  // namespace

GridSpec parse_grid(std::string_view text) {
  GridSpec g;
  std::map<char, Glyph> glyphs{{'.', Glyph{}}};
  std::vector<std::pair<std::string, std::size_t>> layout;
  bool in_layout = false;
  bool have_ap = false;
  std::size_t line_no = 0;

  for (auto raw : text::lines(text)) {
    ++line_no;
    if (in_layout) {
      std::string row;
      for (char c : raw) {
        if (c != ' ' && c != '\t' && c != '\r') row += c;
      }
      if (!row.empty()) layout.emplace_back(std::move(row), line_no);
      continue;
    }
    const std::string_view trimmed = text::trim(raw);
    if (trimmed.starts_with("glyph")) {
      // "glyph X : ..."; the glyph itself may be '#', so strip comments after it.
      const auto rest = text::trim(trimmed.substr(5));
      if (rest.size() < 2 || text::trim(rest.substr(1)).front() != ':') {
        throw ParseError("expected 'glyph <char> : <attributes>'", line_no, 0);
      }
      const char symbol = rest.front();
      const auto attrs = text::trim(text::trim(rest.substr(1)).substr(1));
      Glyph glyph;
      for (auto tok : text::split_ws(text::strip_comment(attrs))) {
        if (tok == "obstacle") {
          glyph.obstacle = true;
        } else if (tok == "absorbing") {
          glyph.absorbing = true;
        } else if (tok.starts_with("actions=")) {
          std::string_view list = tok.substr(8);
          while (!list.empty()) {
            const auto comma = list.find(',');
            glyph.actions.push_back(parse_direction(list.substr(0, comma), line_no));
            list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
          }
        } else {
          glyph.props.emplace_back(tok);
        }
      }
      glyphs[symbol] = std::move(glyph);
      continue;
    }
    const std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'key: value'", line_no, 0);
    const std::string_view key = text::trim(line.substr(0, colon));
    const auto values = text::split_ws(line.substr(colon + 1));
    if (key == "rows") {
      g.rows = parse_count(values.at(0), line_no);
    } else if (key == "cols") {
      g.cols = parse_count(values.at(0), line_no);
    } else if (key == "ap") {
      std::vector<std::string> names;
      for (auto v : values) names.emplace_back(v);
      g.ap = AtomSet(std::move(names));
      have_ap = true;
    } else if (key == "initial") {
      if (values.size() != 2) throw ParseError("'initial:' takes a row and a column", line_no, 0);
      g.initial = {parse_count(values[0], line_no), parse_count(values[1], line_no)};
    } else if (key == "slip") {
      if (values.size() != 3) throw ParseError("'slip:' takes three integer weights", line_no, 0);
      g.slip = {static_cast<unsigned>(parse_count(values[0], line_no)),
                static_cast<unsigned>(parse_count(values[1], line_no)),
                static_cast<unsigned>(parse_count(values[2], line_no))};
    } else if (key == "layout") {
      in_layout = true;
    } else {
      throw ParseError(fmt::format("unknown key '{}'", key), line_no, 0);
    }
  }
  if (!have_ap) throw ParseError("missing 'ap:' line", line_no, 0);
  if (!in_layout) throw ParseError("missing 'layout:' section", line_no, 0);
  if (layout.size() != g.rows) {
    throw ParseError(fmt::format("layout has {} rows, expected {}", layout.size(), g.rows), line_no, 0);
  }
  for (std::size_t r = 0; r < g.rows; ++r) {
    const auto& [row, row_line] = layout[r];
    if (row.size() != g.cols) {
      throw ParseError(fmt::format("layout row has {} cells, expected {}", row.size(), g.cols), row_line, 0);
    }
    for (std::size_t c = 0; c < g.cols; ++c) {
      auto it = glyphs.find(row[c]);
      if (it == glyphs.end()) throw ParseError(fmt::format("undeclared glyph '{}'", row[c]), row_line, c);
      const Glyph& glyph = it->second;
      if (!glyph.props.empty()) g.labels[{r, c}] = g.ap.label_of(glyph.props);
      if (glyph.obstacle) g.obstacles.insert({r, c});
      if (glyph.absorbing) g.absorbing.insert({r, c});
      if (!glyph.actions.empty()) g.restricted[{r, c}] = glyph.actions;
    }
  }
  return g;
}

}  // namespace ltlrl
