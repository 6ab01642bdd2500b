#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltlrl/mdp.hpp"

namespace ltlrl {

/// Grid actions, in action-id order.
enum class Direction : ActionId { top = 0, left = 1, down = 2, right = 3 };
inline constexpr std::array<Direction, 4> all_directions{Direction::top, Direction::left, Direction::down,
                                                         Direction::right};
const char* direction_name(Direction d) noexcept;

using Cell = std::pair<std::size_t, std::size_t>;  // (row, col), row 0 at the top

/// Integer weights for moving forward, to the left of the heading, and to the
/// right of the heading. Probabilities are weight / total.
struct SlipModel {
  unsigned forward = 8;
  unsigned left = 1;
  unsigned right = 1;
};

struct GridSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  AtomSet ap;
  std::map<Cell, Label> labels;
  std::set<Cell> obstacles;
  std::set<Cell> absorbing;
  std::map<Cell, std::vector<Direction>> restricted;  // cell -> allowed actions
  Cell initial{0, 0};
  SlipModel slip;
};

/// One state per non-obstacle cell in row-major order, named "(r,c)". Moves
/// blocked by the border or an obstacle leave the robot in place; absorbing
/// cells self-loop under every action. Throws ValidationError on an empty grid
/// or cells outside the bounds.
LabeledMdp build_gridworld(const GridSpec& spec);

/// Reads the grid format:
///
///   rows: 5
///   cols: 4
///   ap: a b c
///   initial: 0 0
///   slip: 8 1 1                 (optional)
///   glyph A : a absorbing
///   glyph # : obstacle
///   glyph L : b actions=left
///   layout:
///   ..c.
///   ...
///
/// `.` is predeclared as an empty cell. Layout rows may contain spaces.
GridSpec parse_grid(std::string_view text);

}  // namespace ltlrl
