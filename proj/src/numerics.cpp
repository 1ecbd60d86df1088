#include "freqmc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace freqmc {

ExactMdp to_exact_mdp(const Model& model) {
  ExactMdp out;
  out.choices.resize(model.num_states());
  for (int s = 0; s < model.num_states(); ++s)
    for (const auto& c : model.choices(s)) {
      auto& d = out.choices[s].emplace_back();
      for (const auto& t : c.distribution) d.push_back({t.target, t.probability});
    }
  return out;
}

FloatMdp to_float(const ExactMdp& mdp) {
  FloatMdp out;
  out.choices.resize(mdp.choices.size());
  for (std::size_t s = 0; s < mdp.choices.size(); ++s)
    for (const auto& d : mdp.choices[s]) {
      auto& f = out.choices[s].emplace_back();
      for (const auto& e : d) f.push_back({e.target, e.probability.get_d()});
    }
  return out;
}

namespace {

graph::Adjacency adjacency(const ChoiceSupport& mdp) {
  graph::Adjacency adj(mdp.size());
  for (std::size_t s = 0; s < mdp.size(); ++s) {
    for (const auto& succ : mdp[s]) adj[s].insert(adj[s].end(), succ.begin(), succ.end());
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  return adj;
}

// x = b + C x over variables 0..n-1, assuming I - C is a nonsingular
// M-matrix so that elimination in index order never meets a zero pivot.
struct LinearRow {
  std::map<int, Rational> coeff;
  Rational constant;
};

RationalVector solve_fixed_point(std::vector<LinearRow> rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::set<int>> users(n);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, c] : rows[i].coeff) users[j].insert(i);

  for (int k = 0; k < n; ++k) {
    LinearRow& rk = rows[k];
    if (auto self = rk.coeff.find(k); self != rk.coeff.end()) {
      const Rational scale = 1 / (1 - self->second);
      rk.coeff.erase(self);
      for (auto& [j, c] : rk.coeff) c *= scale;
      rk.constant *= scale;
    }
    for (int i : users[k]) {
      if (i <= k) continue;
      LinearRow& ri = rows[i];
      auto it = ri.coeff.find(k);
      if (it == ri.coeff.end()) continue;
      const Rational f = it->second;
      ri.coeff.erase(it);
      ri.constant += f * rk.constant;
      for (const auto& [j, c] : rk.coeff) {
        auto [pos, inserted] = ri.coeff.emplace(j, 0);
        pos->second += f * c;
        if (inserted) users[j].insert(i);
        if (pos->second == 0) ri.coeff.erase(pos);
      }
    }
  }
  RationalVector x(n);
  for (int k = n; k-- > 0;) {
    Rational v = rows[k].constant;
    for (const auto& [j, c] : rows[k].coeff) v += c * x[j];
    x[k] = v;
  }
  return x;
}

}  // namespace

RationalVector stationary_distribution(const Model& mc, const std::vector<int>& members) {
  const int k = static_cast<int>(members.size());
  if (k == 0) return {};
  std::map<int, int> pos;
  for (int i = 0; i < k; ++i) pos.emplace(members[i], i);
  // Unnormalised weights with w[0] = 1: w_s = sum_t w_t P(t,s) for s != members[0].
  std::vector<LinearRow> rows(k - 1);
  for (int i = 0; i < k; ++i) {
    const auto& choices = mc.choices(members[i]);
    if (choices.size() != 1) throw std::invalid_argument("stationary distribution needs a Markov chain");
    for (const auto& t : choices[0].distribution) {
      auto it = pos.find(t.target);
      if (it == pos.end()) throw std::invalid_argument("state set is not closed");
      if (it->second == 0) continue;
      LinearRow& row = rows[it->second - 1];
      if (i == 0)
        row.constant += t.probability;
      else
        row.coeff[i - 1] += t.probability;
    }
  }
  RationalVector w = solve_fixed_point(std::move(rows));
  w.insert(w.begin(), Rational(1));
  Rational total = 0;
  for (const auto& x : w) total += x;
  for (auto& x : w) x /= total;
  return w;
}

RationalVector reach_probability(const ExactMdp& mc, const std::vector<bool>& target) {
  const int n = mc.num_states();
  for (const auto& cs : mc.choices)
    if (cs.size() != 1) throw std::invalid_argument("reach_probability needs a Markov chain");
  const auto adj = adjacency(support_of(mc));
  const auto can_reach = graph::backward_reachable(adj, target);
  std::vector<bool> zero(n);
  for (int s = 0; s < n; ++s) zero[s] = !can_reach[s];
  // Probability one: cannot reach a zero state without passing the target.
  graph::Adjacency cut = adj;
  for (int s = 0; s < n; ++s)
    if (target[s]) cut[s].clear();
  const auto leaks = graph::backward_reachable(cut, zero);

  RationalVector out(n, Rational(0));
  std::vector<int> var(n, -1);
  std::vector<int> states;
  for (int s = 0; s < n; ++s) {
    if (target[s] || !leaks[s])
      out[s] = 1;
    else if (!zero[s]) {
      var[s] = static_cast<int>(states.size());
      states.push_back(s);
    }
  }
  std::vector<LinearRow> rows(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    for (const auto& e : mc.choices[states[i]][0]) {
      if (var[e.target] >= 0)
        rows[i].coeff[var[e.target]] += e.probability;
      else if (out[e.target] == 1)
        rows[i].constant += e.probability;
    }
  const auto x = solve_fixed_point(std::move(rows));
  for (std::size_t i = 0; i < states.size(); ++i) out[states[i]] = x[i];
  return out;
}

RationalVector reach_probability(const Model& mc, const std::vector<bool>& target) {
  return reach_probability(to_exact_mdp(mc), target);
}

namespace {

// Choices flattened to global ids with reverse edges, for attractors.
struct FlatSupport {
  std::vector<int> owner;                 // choice -> state
  std::vector<int> first;                 // state -> first choice id
  std::vector<std::vector<int>> preds;    // state -> choices with it as successor

  explicit FlatSupport(const ChoiceSupport& mdp) : first(mdp.size() + 1, 0), preds(mdp.size()) {
    for (std::size_t s = 0; s < mdp.size(); ++s) {
      first[s] = static_cast<int>(owner.size());
      for (const auto& succ : mdp[s]) {
        const int id = static_cast<int>(owner.size());
        owner.push_back(static_cast<int>(s));
        for (int t : succ)
          if (preds[t].empty() || preds[t].back() != id) preds[t].push_back(id);
      }
    }
    first[mdp.size()] = static_cast<int>(owner.size());
  }
};

}  // namespace

QualitativeResult almost_sure_reach(const ChoiceSupport& mdp, const std::vector<bool>& target) {
  const int n = static_cast<int>(mdp.size());
  const FlatSupport flat(mdp);
  std::vector<bool> winning(n, true);
  std::vector<int> choice(n, -1);
  std::vector<bool> safe(flat.owner.size());

  while (true) {
    for (int s = 0; s < n; ++s)
      for (int c = flat.first[s]; c < flat.first[s + 1]; ++c) {
        const auto& succ = mdp[s][c - flat.first[s]];
        safe[c] = winning[s] &&
                  std::all_of(succ.begin(), succ.end(), [&](int t) { return winning[t]; });
      }
    // Attractor of the target through safe choices, layer by layer so that
    // the recorded choice is the lowest one making progress.
    std::vector<bool> attracted(n, false);
    std::vector<int> frontier;
    std::fill(choice.begin(), choice.end(), -1);
    for (int s = 0; s < n; ++s)
      if (winning[s] && target[s]) {
        attracted[s] = true;
        frontier.push_back(s);
      }
    while (!frontier.empty()) {
      std::vector<int> candidates;
      for (int t : frontier)
        for (int c : flat.preds[t])
          if (safe[c] && !attracted[flat.owner[c]]) candidates.push_back(flat.owner[c]);
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      std::vector<int> next;
      for (int s : candidates) {
        for (int c = flat.first[s]; c < flat.first[s + 1]; ++c) {
          if (!safe[c]) continue;
          const auto& succ = mdp[s][c - flat.first[s]];
          if (std::any_of(succ.begin(), succ.end(), [&](int t) { return attracted[t]; })) {
            choice[s] = c - flat.first[s];
            next.push_back(s);
            break;
          }
        }
      }
      for (int s : next) attracted[s] = true;
      frontier = std::move(next);
    }
    if (attracted == winning) break;
    winning = std::move(attracted);
  }

  for (int s = 0; s < n; ++s)
    if (winning[s] && target[s])
      for (int c = flat.first[s]; c < flat.first[s + 1]; ++c)
        if (safe[c]) {
          choice[s] = c - flat.first[s];
          break;
        }
  return {std::move(winning), Strategy{std::move(choice)}};
}

TwoPhaseResult almost_sure_fulfilled_then(const ChoiceSupport& mdp,
                                          const std::vector<bool>& fulfilled,
                                          const std::vector<bool>& goal) {
  const int n = static_cast<int>(mdp.size());
  // State (x, b) has index 2x + b; b records that a fulfilled state was seen,
  // including x itself.
  ChoiceSupport doubled(2 * n);
  std::vector<bool> target(2 * n, false);
  for (int x = 0; x < n; ++x)
    for (int b = 0; b < 2; ++b) {
      auto& out = doubled[2 * x + b];
      for (const auto& succ : mdp[x]) {
        auto& row = out.emplace_back();
        for (int y : succ) row.push_back(2 * y + ((b || fulfilled[y]) ? 1 : 0));
      }
      if (b == 1 && goal[x]) target[2 * x + 1] = true;
    }
  const auto as = almost_sure_reach(doubled, target);
  TwoPhaseResult out;
  out.winning.resize(n);
  out.choice[0].resize(n);
  out.choice[1].resize(n);
  for (int x = 0; x < n; ++x) {
    out.winning[x] = as.winning[2 * x + (fulfilled[x] ? 1 : 0)];
    out.choice[0][x] = as.strategy.choice[2 * x];
    out.choice[1][x] = as.strategy.choice[2 * x + 1];
  }
  return out;
}

namespace {

// Probability-0 states, almost-sure states and the almost-sure witness.
struct Anchors {
  std::vector<bool> zero;
  QualitativeResult sure;
};

Anchors anchors(const ChoiceSupport& support, const std::vector<bool>& target) {
  const auto adj = adjacency(support);
  const auto can_reach = graph::backward_reachable(adj, target);
  Anchors a;
  a.zero.resize(support.size());
  for (std::size_t s = 0; s < support.size(); ++s) a.zero[s] = !can_reach[s];
  a.sure = almost_sure_reach(support, target);
  return a;
}

// Layered choice assignment: a state picks the lowest allowed choice with a
// successor in the already reached set.
template <class Allowed>
void attract(const ChoiceSupport& support, std::vector<bool> reached, std::vector<int>& choice,
             const std::vector<bool>& eligible, Allowed allowed) {
  const int n = static_cast<int>(support.size());
  const FlatSupport flat(support);
  std::vector<int> frontier;
  for (int s = 0; s < n; ++s)
    if (reached[s]) frontier.push_back(s);
  while (!frontier.empty()) {
    std::vector<int> candidates;
    for (int t : frontier)
      for (int c : flat.preds[t]) {
        const int s = flat.owner[c];
        if (!reached[s] && eligible[s]) candidates.push_back(s);
      }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::vector<int> next;
    for (int s : candidates)
      for (int c = 0; c < static_cast<int>(support[s].size()); ++c) {
        if (!allowed(s, c)) continue;
        const auto& succ = support[s][c];
        if (std::any_of(succ.begin(), succ.end(), [&](int t) { return reached[t]; })) {
          choice[s] = c;
          next.push_back(s);
          break;
        }
      }
    for (int s : next) reached[s] = true;
    frontier = std::move(next);
  }
}

}  // namespace

MaxReachResult max_reach(const FloatMdp& mdp, const std::vector<bool>& target, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const int n = mdp.num_states();
  const auto support = support_of(mdp);
  const Anchors anc = anchors(support, target);

  MaxReachResult out;
  out.value.assign(n, 0.0);
  std::vector<bool> fixed(n, false);
  for (int s = 0; s < n; ++s) {
    if (target[s] || anc.sure.winning[s]) {
      out.value[s] = 1.0;
      fixed[s] = true;
    } else if (anc.zero[s]) {
      fixed[s] = true;
    }
  }

  auto q_value = [&](int s, int c) {
    double v = 0;
    for (const auto& e : mdp.choices[s][c]) v += e.probability * out.value[e.target];
    return v;
  };

  // Gauss-Seidel from below, one SCC at a time, successors first.
  const auto scc = graph::strongly_connected_components(adjacency(support));
  for (const auto& members : scc.members) {
    bool open = false;
    for (int s : members) open |= !fixed[s];
    if (!open) continue;
    while (true) {
      double delta = 0;
      for (int s : members) {
        if (fixed[s]) continue;
        double best = out.value[s];
        for (int c = 0; c < static_cast<int>(mdp.choices[s].size()); ++c) best = std::max(best, q_value(s, c));
        delta = std::max(delta, best - out.value[s]);
        out.value[s] = best;
      }
      if (delta < tol) break;
    }
  }

  // Strategy: almost-sure witness on the probability-one region, otherwise
  // progress towards it through near-optimal choices.
  const double slack = std::max(1e-9, 1e3 * tol);
  out.strategy.choice.assign(n, -1);
  std::vector<bool> reached(n, false), eligible(n, false);
  for (int s = 0; s < n; ++s) {
    if (target[s]) {
      reached[s] = true;
    } else if (anc.sure.winning[s]) {
      reached[s] = true;
      out.strategy.choice[s] = anc.sure.strategy.choice[s];
    } else if (anc.zero[s]) {
      out.strategy.choice[s] = 0;
    } else {
      eligible[s] = true;
    }
  }
  attract(support, reached, out.strategy.choice, eligible,
          [&](int s, int c) { return q_value(s, c) >= out.value[s] - slack; });
  for (int s = 0; s < n; ++s) {
    if (!eligible[s] || out.strategy.choice[s] >= 0) continue;
    int best = 0;
    for (int c = 1; c < static_cast<int>(mdp.choices[s].size()); ++c)
      if (q_value(s, c) > q_value(s, best)) best = c;
    out.strategy.choice[s] = best;
  }
  return out;
}

RationalVector reach_under(const ExactMdp& mdp, const Strategy& strategy,
                           const std::vector<bool>& target) {
  ExactMdp chain;
  chain.choices.resize(mdp.choices.size());
  for (std::size_t s = 0; s < mdp.choices.size(); ++s) {
    const int c = std::max(0, strategy.choice[s]);
    chain.choices[s].push_back(mdp.choices[s][c]);
  }
  return reach_probability(chain, target);
}

ExactMaxReachResult max_reach_exact(const ExactMdp& mdp, const std::vector<bool>& target) {
  const int n = mdp.num_states();
  const auto support = support_of(mdp);
  const Anchors anc = anchors(support, target);

  // Initial policy: almost-sure witness where it applies, otherwise a choice
  // reaching the target with positive probability.
  Strategy policy{std::vector<int>(n, -1)};
  std::vector<bool> reached(n, false), eligible(n, false), open(n, false);
  for (int s = 0; s < n; ++s) {
    if (target[s]) {
      reached[s] = true;
      policy.choice[s] = 0;
    } else if (anc.sure.winning[s]) {
      reached[s] = true;
      policy.choice[s] = anc.sure.strategy.choice[s];
    } else if (anc.zero[s]) {
      policy.choice[s] = 0;
    } else {
      eligible[s] = open[s] = true;
    }
  }
  attract(support, reached, policy.choice, eligible, [](int, int) { return true; });

  while (true) {
    RationalVector v = reach_under(mdp, policy, target);
    bool improved = false;
    for (int s = 0; s < n; ++s) {
      if (!open[s]) continue;
      int best = policy.choice[s];
      Rational best_value = v[s];
      for (int c = 0; c < static_cast<int>(mdp.choices[s].size()); ++c) {
        Rational q = 0;
        for (const auto& e : mdp.choices[s][c]) q += e.probability * v[e.target];
        if (q > best_value) {
          best_value = q;
          best = c;
        }
      }
      if (best != policy.choice[s]) {
        policy.choice[s] = best;
        improved = true;
      }
    }
    if (!improved) return {std::move(v), std::move(policy)};
  }
}

}  // namespace freqmc
