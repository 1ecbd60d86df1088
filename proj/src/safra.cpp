// Degeneralization and Safra determinization.

#include "freqmc/automata.hpp"
#include "freqmc/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace freqmc {

namespace {

/// State-based Buchi automaton with explicit per-letter successor sets.
struct Buchi {
  Letter letters = 1;
  std::vector<std::vector<std::vector<int>>> succ;  // [state][letter] -> sorted
  std::vector<bool> accepting;
  std::vector<int> initial;

  int size() const { return static_cast<int>(succ.size()); }
};

// Counter degeneralization. States are (g, j, wrapped) where j is the next
// acceptance set awaited and `wrapped` records that the last edge completed
// a round; wrapped states are the accepting ones.
Buchi degeneralize(const GeneralizedBuchi& g) {
  const int k = g.num_acceptance_sets;
  Buchi out;
  out.letters = g.num_letters();
  std::map<std::tuple<int, int, bool>, int> ids;
  std::vector<std::tuple<int, int, bool>> states;
  std::queue<int> work;
  auto lookup = [&](int q, int j, bool wrapped) {
    auto key = std::make_tuple(q, j, wrapped);
    auto [it, inserted] = ids.emplace(key, static_cast<int>(states.size()));
    if (inserted) {
      states.push_back(key);
      out.succ.emplace_back(out.letters);
      out.accepting.push_back(wrapped);
      work.push(it->second);
    }
    return it->second;
  };
  for (int q : g.initial) out.initial.push_back(lookup(q, 0, k == 0));

  while (!work.empty()) {
    const int id = work.front();
    work.pop();
    const auto [q, j, wrapped] = states[id];
    (void)wrapped;
    for (const auto& e : g.edges[q]) {
      int nj = j;
      while (nj < k && ((e.acceptance >> nj) & 1ULL)) ++nj;
      const bool wraps = nj == k;
      const int target = lookup(e.target, wraps ? 0 : nj, wraps);
      for (Letter a = 0; a < out.letters; ++a)
        if (e.enabled(a)) out.succ[id][a].push_back(target);
    }
  }
  for (auto& row : out.succ)
    for (auto& s : row) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
  std::sort(out.initial.begin(), out.initial.end());
  out.initial.erase(std::unique(out.initial.begin(), out.initial.end()), out.initial.end());
  return out;
}

// Removes states from which no accepting cycle is reachable.
void trim(Buchi& b) {
  const int n = b.size();
  std::vector<std::vector<int>> adj(n);
  for (int s = 0; s < n; ++s) {
    for (const auto& row : b.succ[s]) adj[s].insert(adj[s].end(), row.begin(), row.end());
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  const auto scc = graph::strongly_connected_components(adj);
  std::vector<bool> good(n, false);
  for (int s = 0; s < n; ++s) {
    if (!b.accepting[s]) continue;
    for (int t : adj[s])
      if (scc.component[t] == scc.component[s]) good[s] = true;
  }
  const auto productive = graph::backward_reachable(adj, good);
  for (auto& row : b.succ)
    for (auto& s : row)
      std::erase_if(s, [&](int t) { return !productive[t]; });
  std::erase_if(b.initial, [&](int t) { return !productive[t]; });
}

bool is_deterministic(const Buchi& b) {
  if (b.initial.size() > 1) return false;
  for (const auto& row : b.succ)
    for (const auto& s : row)
      if (s.size() > 1) return false;
  return true;
}

// Deterministic Buchi automaton read as a one-pair Rabin automaton.
Dra from_deterministic(const Buchi& b, const std::vector<std::string>& atoms, const Formula& source) {
  const int sink = b.size();
  std::vector<std::vector<int>> delta(sink + 1, std::vector<int>(b.letters, sink));
  for (int s = 0; s < sink; ++s)
    for (Letter a = 0; a < b.letters; ++a)
      if (!b.succ[s][a].empty()) delta[s][a] = b.succ[s][a][0];
  RabinPair pair{std::vector<bool>(sink + 1, false), std::vector<bool>(sink + 1, false)};
  for (int s = 0; s < sink; ++s) pair.visit[s] = b.accepting[s];
  const int init = b.initial.empty() ? sink : b.initial[0];
  return Dra(atoms, std::move(delta), init, {std::move(pair)}, source);
}

struct SafraNode {
  int name = 0;
  bool marked = false;
  std::vector<int> label;  // sorted
  std::vector<SafraNode> children;
};

class Safra {
 public:
  Safra(const Buchi& b) : b_(b) {}

  Dra run(const std::vector<std::string>& atoms, std::size_t max_states, const Formula& source) {
    std::vector<SafraNode> init;
    if (!b_.initial.empty()) init.push_back(SafraNode{1, false, b_.initial, {}});
    lookup(init);

    std::vector<std::vector<int>> delta;
    for (std::size_t id = 0; id < trees_.size(); ++id) {
      delta.emplace_back(b_.letters);
      for (Letter a = 0; a < b_.letters; ++a) {
        std::vector<SafraNode> next = trees_[id];
        step(next, a);
        delta[id][a] = lookup(next);
        if (trees_.size() > max_states)
          throw BudgetExceeded("Safra construction exceeded " + std::to_string(max_states) +
                               " states");
      }
    }

    const int n = static_cast<int>(trees_.size());
    std::vector<RabinPair> pairs;
    for (int name = 1; name <= max_name_; ++name) {
      RabinPair p{std::vector<bool>(n, true), std::vector<bool>(n, false)};
      for (int s = 0; s < n; ++s) {
        if (const SafraNode* node = find(trees_[s], name)) {
          p.avoid[s] = false;
          p.visit[s] = node->marked;
        }
      }
      pairs.push_back(std::move(p));
    }
    return Dra(atoms, std::move(delta), 0, std::move(pairs), source);
  }

 private:
  static const SafraNode* find(const std::vector<SafraNode>& forest, int name) {
    for (const auto& n : forest) {
      if (n.name == name) return &n;
      if (const SafraNode* hit = find(n.children, name)) return hit;
    }
    return nullptr;
  }

  static void collect_names(const std::vector<SafraNode>& forest, std::vector<bool>& used) {
    for (const auto& n : forest) {
      if (static_cast<std::size_t>(n.name) >= used.size()) used.resize(n.name + 1, false);
      used[n.name] = true;
      collect_names(n.children, used);
    }
  }

  int fresh_name(std::vector<bool>& used) {
    int name = 1;
    while (static_cast<std::size_t>(name) < used.size() && used[name]) ++name;
    if (static_cast<std::size_t>(name) >= used.size()) used.resize(name + 1, false);
    used[name] = true;
    max_name_ = std::max(max_name_, name);
    return name;
  }

  void unmark_and_spawn(SafraNode& n, std::vector<bool>& used) {
    n.marked = false;
    for (auto& c : n.children) unmark_and_spawn(c, used);
    std::vector<int> acc;
    for (int q : n.label)
      if (b_.accepting[q]) acc.push_back(q);
    if (!acc.empty()) n.children.push_back(SafraNode{fresh_name(used), false, std::move(acc), {}});
  }

  void successors(SafraNode& n, Letter a) {
    std::vector<int> next;
    for (int q : n.label) {
      const auto& s = b_.succ[q][a];
      next.insert(next.end(), s.begin(), s.end());
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    n.label = std::move(next);
    for (auto& c : n.children) successors(c, a);
  }

  static void remove_states(SafraNode& n, const std::vector<int>& gone) {
    std::vector<int> kept;
    std::set_difference(n.label.begin(), n.label.end(), gone.begin(), gone.end(),
                        std::back_inserter(kept));
    n.label = std::move(kept);
    for (auto& c : n.children) remove_states(c, gone);
  }

  // A state claimed by an older sibling is removed from younger ones.
  static void horizontal_merge(SafraNode& n) {
    std::vector<int> seen;
    for (auto& c : n.children) {
      remove_states(c, seen);
      std::vector<int> merged;
      std::set_union(seen.begin(), seen.end(), c.label.begin(), c.label.end(),
                     std::back_inserter(merged));
      seen = std::move(merged);
      horizontal_merge(c);
    }
  }

  static void remove_empty(std::vector<SafraNode>& forest) {
    std::erase_if(forest, [](const SafraNode& n) { return n.label.empty(); });
    for (auto& n : forest) remove_empty(n.children);
  }

  static void vertical_merge(SafraNode& n) {
    std::size_t covered = 0;
    for (const auto& c : n.children) covered += c.label.size();
    if (!n.children.empty() && covered == n.label.size()) {
      n.children.clear();
      n.marked = true;
      return;
    }
    for (auto& c : n.children) vertical_merge(c);
  }

  void step(std::vector<SafraNode>& forest, Letter a) {
    std::vector<bool> used;
    collect_names(forest, used);
    for (auto& n : forest) unmark_and_spawn(n, used);
    for (auto& n : forest) successors(n, a);
    for (auto& n : forest) horizontal_merge(n);
    remove_empty(forest);
    for (auto& n : forest) vertical_merge(n);
  }

  static void encode(const std::vector<SafraNode>& forest, std::vector<int>& out) {
    out.push_back(static_cast<int>(forest.size()));
    for (const auto& n : forest) {
      out.push_back(n.name);
      out.push_back(n.marked ? 1 : 0);
      out.push_back(static_cast<int>(n.label.size()));
      out.insert(out.end(), n.label.begin(), n.label.end());
      encode(n.children, out);
    }
  }

  int lookup(const std::vector<SafraNode>& forest) {
    std::vector<int> key;
    encode(forest, key);
    auto [it, inserted] = ids_.emplace(std::move(key), static_cast<int>(trees_.size()));
    if (inserted) trees_.push_back(forest);
    return it->second;
  }

  struct KeyHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = v.size();
      for (int x : v) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  const Buchi& b_;
  std::vector<std::vector<SafraNode>> trees_;
  std::unordered_map<std::vector<int>, int, KeyHash> ids_;
  int max_name_ = 1;
};

}  // namespace

Dra determinize(const GeneralizedBuchi& nba, const TranslationOptions& options,
                const Formula& source) {
  Buchi b = degeneralize(nba);
  trim(b);
  Dra raw = is_deterministic(b) ? from_deterministic(b, nba.atoms, source)
                                : Safra(b).run(nba.atoms, options.max_states, source);
  return options.minimize ? minimize(raw) : raw;
}

Dra ltl_to_dra(const Formula& f, const TranslationOptions& options) {
  const auto atom_set = atoms_of(f);
  std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  return determinize(ltl_to_nba(f, atoms), options, f);
}

}  // namespace freqmc
