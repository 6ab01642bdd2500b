#include "ltlrl/graph.hpp"

#include <algorithm>
#include <limits>

namespace ltlrl {

namespace {
constexpr std::uint32_t unvisited = std::numeric_limits<std::uint32_t>::max();
}

SccDecomposition strongly_connected_components(const Adjacency& adj, std::span<const char> active) {
  const std::size_t n = adj.size();
  auto is_active = [&](std::size_t v) { return active.empty() || active[v] != 0; };

  SccDecomposition out;
  out.component.assign(n, unvisited);
  std::vector<std::uint32_t> index(n, unvisited);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  // (vertex, next edge position)
  std::vector<std::pair<std::uint32_t, std::size_t>> call;
  std::uint32_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (!is_active(root) || index[root] != unvisited) continue;
    call.emplace_back(static_cast<std::uint32_t>(root), 0);
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos == 0 && index[v] == unvisited) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (pos < adj[v].size()) {
        const std::uint32_t w = adj[v][pos++];
        if (!is_active(w)) continue;
        if (index[w] == unvisited) {
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      const std::uint32_t done = v;
      if (low[done] == index[done]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          out.component[w] = static_cast<std::uint32_t>(out.count);
        } while (w != done);
        ++out.count;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::uint32_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return out;
}

Adjacency reverse(const Adjacency& adj) {
  Adjacency rev(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (std::uint32_t w : adj[v]) rev[w].push_back(static_cast<std::uint32_t>(v));
  }
  return rev;
}

std::vector<char> forward_reachable(const Adjacency& adj, std::span<const char> sources) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::uint32_t> work;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (sources[v]) {
      seen[v] = 1;
      work.push_back(static_cast<std::uint32_t>(v));
    }
  }
  while (!work.empty()) {
    const std::uint32_t v = work.back();
    work.pop_back();
    for (std::uint32_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        work.push_back(w);
      }
    }
  }
  return seen;
}

std::vector<char> backward_reachable(const Adjacency& adj, std::span<const char> targets) {
  return forward_reachable(reverse(adj), targets);
}

}  // namespace ltlrl
