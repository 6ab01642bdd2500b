#include "ltlrl/render.hpp"

#include <functional>
#include <stdexcept>

#include <fmt/format.h>

namespace ltlrl {

namespace {

std::string panels(const ProductMdp& p, std::span<const char> shown,
                   const std::function<std::string(StateId)>& cell_text) {
  if (!p.mdp().grid) throw std::invalid_argument("the MDP has no grid layout; use the table output instead");
  const GridGeometry& g = *p.mdp().grid;
  std::string out;
  for (AutomatonState q = 0; q < p.num_automaton_states(); ++q) {
    bool any = shown.empty();
    for (StateId s = 0; s < p.mdp().num_states() && !any; ++s) any = shown[p.index(s, q)] != 0;
    if (!any) continue;
    out += fmt::format("q{}{}\n", q, p.ldba().is_accepting(q) ? " (accepting)" : "");
    for (std::size_t r = 0; r < g.rows; ++r) {
      for (std::size_t c = 0; c < g.cols; ++c) {
        const auto s = g.state_at(r, c);
        out += fmt::format(" {:>5}", s ? cell_text(p.index(*s, q)) : std::string("####"));
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

std::string action_glyph(const ProductMdp& p, ActionId a) {
  if (p.is_epsilon(a)) return fmt::format("e{}", a - p.num_mdp_actions() + 1);
  if (p.mdp().action_names.at(a) == "top") return "^";
  if (p.mdp().action_names[a] == "left") return "<";
  if (p.mdp().action_names[a] == "down") return "v";
  if (p.mdp().action_names[a] == "right") return ">";
  return p.mdp().action_names[a];
}

}  // namespace

std::string render_values(const ProductMdp& p, std::span<const double> values, std::span<const char> shown) {
  return panels(p, shown, [&](StateId x) { return fmt::format("{:.2f}", values[x]); });
}

std::string render_policy(const ProductMdp& p, const MemorylessPolicy& policy, std::span<const char> shown) {
  return panels(p, shown, [&](StateId x) { return action_glyph(p, policy.choice.at(x)); });
}

std::string render_table(const ProductMdp& p, std::span<const double> values, std::span<const char> shown) {
  std::string out;
  for (StateId x = 0; x < p.num_states(); ++x) {
    if (!shown.empty() && !shown[x]) continue;
    out += fmt::format("{:<16} {:.2f}\n", p.state_name(x), values[x]);
  }
  return out;
}

}  // namespace ltlrl
