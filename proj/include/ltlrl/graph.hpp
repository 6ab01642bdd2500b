#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ltlrl {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

struct SccDecomposition {
  /// component[v] in [0, count). Tarjan numbering: a component's successors
  /// always have smaller ids, so id 0 is a bottom component.
  std::vector<std::uint32_t> component;
  std::size_t count = 0;
};

/// Iterative Tarjan; vertices with `active[v] == 0` are ignored and get
/// component id UINT32_MAX. An empty `active` span means all vertices.
SccDecomposition strongly_connected_components(const Adjacency& adj, std::span<const char> active = {});

/// Vertices that can reach some target (targets included).
std::vector<char> backward_reachable(const Adjacency& adj, std::span<const char> targets);
/// Vertices reachable from some source (sources included).
std::vector<char> forward_reachable(const Adjacency& adj, std::span<const char> sources);

Adjacency reverse(const Adjacency& adj);

}  // namespace ltlrl
