#include "freqmc/graph.hpp"
#include "freqmc/strategy.hpp"

#include <functional>
#include <map>

namespace freqmc {

namespace {

struct MonitorProduct {
  int dra_states = 0;
  graph::Adjacency adj;
  std::vector<int> q;  ///< automaton state per vertex

  int vertex(int s, int state) const { return s * dra_states + state; }
};

MonitorProduct monitor_product(const Model& model, const Dra& dra) {
  MonitorProduct p;
  p.dra_states = dra.num_states();
  const auto succ = model.successor_graph();
  p.adj.resize(static_cast<std::size_t>(model.num_states()) * p.dra_states);
  p.q.resize(p.adj.size());
  for (int s = 0; s < model.num_states(); ++s) {
    const Letter a = dra.letter_of(model.label(s));
    for (int q = 0; q < p.dra_states; ++q) {
      const int v = p.vertex(s, q);
      p.q[v] = q;
      for (int t : succ[s]) p.adj[v].push_back(p.vertex(t, dra.step(q, a)));
    }
  }
  return p;
}

bool is_cycle(const graph::Adjacency& adj, const std::vector<int>& members, const std::vector<bool>& inside) {
  if (members.size() > 1) return true;
  const int v = members[0];
  for (int w : adj[v])
    if (w == v && inside[v]) return true;
  return false;
}

// SCCs of the subgraph induced by `inside`, as vertex lists.
std::vector<std::vector<int>> sub_components(const graph::Adjacency& adj, const std::vector<bool>& inside) {
  graph::Adjacency sub(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (!inside[v]) continue;
    for (int w : adj[v])
      if (inside[w]) sub[v].push_back(w);
  }
  const auto scc = graph::strongly_connected_components(sub);
  std::vector<std::vector<int>> out;
  for (const auto& c : scc.members)
    if (inside[c[0]]) out.push_back(c);
  return out;
}

// Marks vertices of strongly connected sets whose visits satisfy no Rabin
// pair. A pair with F met and E avoided must have F dropped from any such
// set, so we recurse without those vertices.
void mark_rejecting(const MonitorProduct& p, const Dra& dra, const std::vector<bool>& inside,
                    std::vector<bool>& marked) {
  for (const auto& c : sub_components(p.adj, inside)) {
    if (!is_cycle(p.adj, c, inside)) continue;
    int blocking = -1;
    for (std::size_t i = 0; i < dra.pairs().size() && blocking < 0; ++i) {
      const auto& pair = dra.pairs()[i];
      bool hits_e = false, hits_f = false;
      for (int v : c) {
        hits_e = hits_e || pair.avoid[p.q[v]];
        hits_f = hits_f || pair.visit[p.q[v]];
      }
      if (!hits_e && hits_f) blocking = static_cast<int>(i);
    }
    if (blocking < 0) {
      for (int v : c) marked[v] = true;
      continue;
    }
    std::vector<bool> rest(p.adj.size(), false);
    for (int v : c) rest[v] = !dra.pairs()[blocking].visit[p.q[v]];
    mark_rejecting(p, dra, rest, marked);
  }
}

std::vector<bool> accepting_cycles(const MonitorProduct& p, const Dra& dra) {
  std::vector<bool> marked(p.adj.size(), false);
  for (const auto& pair : dra.pairs()) {
    std::vector<bool> inside(p.adj.size());
    for (std::size_t v = 0; v < inside.size(); ++v) inside[v] = !pair.avoid[p.q[v]];
    for (const auto& c : sub_components(p.adj, inside)) {
      if (!is_cycle(p.adj, c, inside)) continue;
      bool hits_f = false;
      for (int v : c) hits_f = hits_f || pair.visit[p.q[v]];
      if (hits_f)
        for (int v : c) marked[v] = true;
    }
  }
  return marked;
}

}  // namespace

MonitorVerdicts::MonitorVerdicts(const Model& model, const Dra& dra, MonitorMode mode)
    : dra_states_(dra.num_states()) {
  const MonitorProduct p = monitor_product(model, dra);
  verdict_.assign(p.adj.size(), -1);
  if (mode == MonitorMode::Chain) {
    const auto scc = graph::strongly_connected_components(p.adj);
    const auto bottom = graph::bottom_components(p.adj, scc);
    for (std::size_t c = 0; c < scc.members.size(); ++c) {
      if (!bottom[c]) continue;
      std::vector<bool> inf(dra.num_states(), false);
      for (int v : scc.members[c]) inf[p.q[v]] = true;
      const int value = rabin_accepts(dra, inf) ? 1 : 0;
      for (int v : scc.members[c]) verdict_[v] = value;
    }
    return;
  }
  const auto can_accept = graph::backward_reachable(p.adj, accepting_cycles(p, dra));
  std::vector<bool> rejecting(p.adj.size(), false);
  mark_rejecting(p, dra, std::vector<bool>(p.adj.size(), true), rejecting);
  const auto can_reject = graph::backward_reachable(p.adj, rejecting);
  for (std::size_t v = 0; v < p.adj.size(); ++v) {
    if (!can_accept[v]) verdict_[v] = 0;
    else if (!can_reject[v]) verdict_[v] = 1;
  }
}

FrequencyEstimate empirical_frequency(const Model& model, const std::vector<int>& states,
                                      const Dra& dra, MonitorMode mode) {
  const MonitorVerdicts verdicts(model, dra, mode);
  std::vector<Letter> letters(model.num_states());
  for (int s = 0; s < model.num_states(); ++s) letters[s] = dra.letter_of(model.label(s));

  // Monitors in the same automaton state behave identically from here on,
  // so only counts are kept.
  std::vector<std::uint64_t> active(dra.num_states(), 0), next(dra.num_states(), 0);
  FrequencyEstimate out;
  for (int s : states) {
    ++out.positions;
    ++active[dra.initial()];
    std::fill(next.begin(), next.end(), 0);
    for (int q = 0; q < dra.num_states(); ++q) {
      if (active[q] == 0) continue;
      const int v = verdicts.verdict(s, q);
      if (v >= 0) {
        out.resolved += active[q];
        if (v == 1) out.satisfied += active[q];
      } else {
        next[dra.step(q, letters[s])] += active[q];
      }
    }
    std::swap(active, next);
  }
  for (auto c : active) out.unresolved += c;
  out.estimate = out.resolved ? static_cast<double>(out.satisfied) / out.resolved : 0.0;
  out.inconclusive = 2 * out.resolved < out.positions;
  return out;
}

}  // namespace freqmc
