#pragma once

#include <vector>

namespace freqmc::graph {

using Adjacency = std::vector<std::vector<int>>;

struct SccDecomposition {
  std::vector<int> component;             ///< component index per vertex
  std::vector<std::vector<int>> members;  ///< sinks first (reverse topological)
};

/// Tarjan's algorithm, iterative. Components come out in reverse topological
/// order: every edge leaving component c enters a component with a smaller
/// index.
SccDecomposition strongly_connected_components(const Adjacency& adj);

/// Vertices that can reach some vertex in `targets`.
std::vector<bool> backward_reachable(const Adjacency& adj, const std::vector<bool>& targets);

/// Vertices reachable from some vertex in `sources`.
std::vector<bool> forward_reachable(const Adjacency& adj, const std::vector<bool>& sources);

/// Components with no edge leaving them.
std::vector<bool> bottom_components(const Adjacency& adj, const SccDecomposition& scc);

}  // namespace freqmc::graph
