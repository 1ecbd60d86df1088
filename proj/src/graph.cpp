#include "freqmc/graph.hpp"

#include <algorithm>
#include <utility>

namespace freqmc::graph {

SccDecomposition strongly_connected_components(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  SccDecomposition out;
  out.component.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;  // vertex, next edge
  int counter = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < adj[v].size()) {
        const int w = adj[v][edge++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<int> members;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component[w] = static_cast<int>(out.members.size());
          members.push_back(w);
        } while (w != done);
        std::sort(members.begin(), members.end());
        out.members.push_back(std::move(members));
      }
    }
  }
  return out;
}

std::vector<bool> backward_reachable(const Adjacency& adj, const std::vector<bool>& targets) {
  const int n = static_cast<int>(adj.size());
  Adjacency rev(n);
  for (int v = 0; v < n; ++v)
    for (int w : adj[v]) rev[w].push_back(v);
  return forward_reachable(rev, targets);
}

std::vector<bool> forward_reachable(const Adjacency& adj, const std::vector<bool>& sources) {
  std::vector<bool> seen = sources;
  std::vector<int> work;
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    if (seen[v]) work.push_back(v);
  while (!work.empty()) {
    const int v = work.back();
    work.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        work.push_back(w);
      }
  }
  return seen;
}

std::vector<bool> bottom_components(const Adjacency& adj, const SccDecomposition& scc) {
  std::vector<bool> bottom(scc.members.size(), true);
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    for (int w : adj[v])
      if (scc.component[w] != scc.component[v]) bottom[scc.component[v]] = false;
  return bottom;
}

}  // namespace freqmc::graph
