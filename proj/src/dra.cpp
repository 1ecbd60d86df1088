#include "freqmc/automata.hpp"
#include "freqmc/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace freqmc {

Dra::Dra(std::vector<std::string> atoms, std::vector<std::vector<int>> delta, int initial,
         std::vector<RabinPair> pairs, Formula source)
    : atoms_(std::move(atoms)),
      delta_(std::move(delta)),
      initial_(initial),
      pairs_(std::move(pairs)),
      source_(std::move(source)) {}

Letter Dra::letter_of(const Valuation& valuation) const {
  Letter a = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (valuation.count(atoms_[i])) a |= Letter{1} << i;
  return a;
}

void Dra::validate() const {
  const int n = num_states();
  if (initial_ < 0 || initial_ >= n) throw std::logic_error("DRA initial state out of range");
  for (const auto& row : delta_) {
    if (row.size() != num_letters()) throw std::logic_error("DRA transition row is not total");
    for (int t : row)
      if (t < 0 || t >= n) throw std::logic_error("DRA successor out of range");
  }
  for (const auto& p : pairs_)
    if (static_cast<int>(p.avoid.size()) != n || static_cast<int>(p.visit.size()) != n)
      throw std::logic_error("DRA acceptance pair has the wrong size");
}

namespace {

// visit := visit \ avoid, then drop empty, duplicate and dominated pairs.
std::vector<RabinPair> simplify_pairs(std::vector<RabinPair> pairs) {
  for (auto& p : pairs)
    for (std::size_t s = 0; s < p.visit.size(); ++s)
      if (p.avoid[s]) p.visit[s] = false;
  std::erase_if(pairs, [](const RabinPair& p) {
    return std::none_of(p.visit.begin(), p.visit.end(), [](bool b) { return b; });
  });
  auto subset = [](const std::vector<bool>& a, const std::vector<bool>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] && !b[i]) return false;
    return true;
  };
  std::vector<RabinPair> kept;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pairs.size() && !dominated; ++j) {
      if (i == j) continue;
      // Pair j accepts whenever pair i does.
      if (subset(pairs[j].avoid, pairs[i].avoid) && subset(pairs[i].visit, pairs[j].visit)) {
        const bool equal = pairs[i].avoid == pairs[j].avoid && pairs[i].visit == pairs[j].visit;
        dominated = !equal || j < i;
      }
    }
    if (!dominated) kept.push_back(pairs[i]);
  }
  return kept;
}

}  // namespace

Dra minimize(const Dra& dra) {
  const int n = dra.num_states();
  const Letter letters = dra.num_letters();

  // Reachable part only.
  graph::Adjacency adj(n);
  for (int s = 0; s < n; ++s) {
    adj[s] = dra.row(s);
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  std::vector<bool> init(n, false);
  init[dra.initial()] = true;
  const auto reachable = graph::forward_reachable(adj, init);

  // States on no cycle are seen at most once; their pair membership is
  // irrelevant and is cleared so that they can merge.
  const auto scc = graph::strongly_connected_components(adj);
  std::vector<bool> cyclic(n, false);
  for (int s = 0; s < n; ++s)
    for (int t : adj[s])
      if (scc.component[t] == scc.component[s]) cyclic[s] = true;
  auto pairs = dra.pairs();
  for (auto& p : pairs)
    for (int s = 0; s < n; ++s)
      if (!cyclic[s]) p.avoid[s] = p.visit[s] = false;
  pairs = simplify_pairs(std::move(pairs));

  // Moore refinement starting from the acceptance signature.
  std::vector<int> cls(n, -1);
  {
    std::map<std::vector<bool>, int> ids;
    for (int s = 0; s < n; ++s) {
      if (!reachable[s]) continue;
      std::vector<bool> sig;
      for (const auto& p : pairs) {
        sig.push_back(p.avoid[s]);
        sig.push_back(p.visit[s]);
      }
      cls[s] = ids.emplace(sig, static_cast<int>(ids.size())).first->second;
    }
  }
  std::size_t count = 0;
  while (true) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> next(n, -1);
    for (int s = 0; s < n; ++s) {
      if (!reachable[s]) continue;
      std::vector<int> key{cls[s]};
      for (Letter a = 0; a < letters; ++a) key.push_back(cls[dra.step(s, a)]);
      next[s] = ids.emplace(std::move(key), static_cast<int>(ids.size())).first->second;
    }
    cls = std::move(next);
    if (ids.size() == count) break;
    count = ids.size();
  }

  // Renumber classes in BFS order from the initial state for stable output.
  std::vector<int> order(count, -1);
  std::vector<int> rep;
  std::vector<int> queue{dra.initial()};
  order[cls[dra.initial()]] = 0;
  rep.push_back(dra.initial());
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int s = queue[head];
    for (Letter a = 0; a < letters; ++a) {
      const int t = dra.step(s, a);
      if (order[cls[t]] < 0) {
        order[cls[t]] = static_cast<int>(rep.size());
        rep.push_back(t);
        queue.push_back(t);
      }
    }
  }
  const int m = static_cast<int>(rep.size());
  std::vector<std::vector<int>> delta(m, std::vector<int>(letters));
  for (int c = 0; c < m; ++c)
    for (Letter a = 0; a < letters; ++a) delta[c][a] = order[cls[dra.step(rep[c], a)]];
  std::vector<RabinPair> qpairs;
  for (const auto& p : pairs) {
    RabinPair q{std::vector<bool>(m), std::vector<bool>(m)};
    for (int c = 0; c < m; ++c) {
      q.avoid[c] = p.avoid[rep[c]];
      q.visit[c] = p.visit[rep[c]];
    }
    qpairs.push_back(std::move(q));
  }
  return Dra(dra.atoms(), std::move(delta), 0, simplify_pairs(std::move(qpairs)), dra.source());
}

bool rabin_accepts(const Dra& dra, const std::vector<bool>& infinitely_often) {
  for (const auto& p : dra.pairs()) {
    bool hits_avoid = false, hits_visit = false;
    for (int s = 0; s < dra.num_states(); ++s) {
      if (!infinitely_often[s]) continue;
      hits_avoid |= p.avoid[s];
      hits_visit |= p.visit[s];
    }
    if (!hits_avoid && hits_visit) return true;
  }
  return false;
}

bool dra_accepts_lasso(const Dra& dra, const LassoWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  int q = dra.initial();
  for (const auto& v : w.stem) q = dra.step(q, dra.letter_of(v));
  const std::size_t loop = w.loop.size();
  std::vector<Letter> letters;
  for (const auto& v : w.loop) letters.push_back(dra.letter_of(v));

  // Iterate whole loop traversals until the state at the loop start repeats.
  std::map<int, std::size_t> seen;
  std::vector<int> starts;
  while (!seen.count(q)) {
    seen.emplace(q, starts.size());
    starts.push_back(q);
    for (std::size_t i = 0; i < loop; ++i) q = dra.step(q, letters[i]);
  }
  std::vector<bool> inf(dra.num_states(), false);
  for (std::size_t k = seen[q]; k < starts.size(); ++k) {
    int p = starts[k];
    for (std::size_t i = 0; i < loop; ++i) {
      inf[p] = true;
      p = dra.step(p, letters[i]);
    }
  }
  return rabin_accepts(dra, inf);
}

std::string to_dot(const Dra& dra) {
  std::ostringstream out;
  out << "digraph dra {\n  rankdir=LR;\n  init [shape=point];\n  init -> q" << dra.initial()
      << ";\n";
  for (int s = 0; s < dra.num_states(); ++s) {
    std::string ann;
    for (std::size_t i = 0; i < dra.pairs().size(); ++i) {
      if (dra.pairs()[i].avoid[s]) ann += " E" + std::to_string(i);
      if (dra.pairs()[i].visit[s]) ann += " F" + std::to_string(i);
    }
    out << "  q" << s << " [label=\"q" << s << (ann.empty() ? "" : "\\n" + ann.substr(1))
        << "\"];\n";
  }
  for (int s = 0; s < dra.num_states(); ++s) {
    std::map<int, std::vector<Letter>> by_target;
    for (Letter a = 0; a < dra.num_letters(); ++a) by_target[dra.step(s, a)].push_back(a);
    for (const auto& [t, letters] : by_target) {
      std::string label;
      for (Letter a : letters) {
        std::string l = "{";
        for (std::size_t i = 0; i < dra.atoms().size(); ++i)
          if ((a >> i) & 1U) l += (l.size() > 1 ? "," : "") + dra.atoms()[i];
        label += (label.empty() ? "" : " ") + l + "}";
      }
      out << "  q" << s << " -> q" << t << " [label=\"" << label << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace freqmc
