#include "freqmc/mdp_engine.hpp"

#include <chrono>

namespace freqmc {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Prunes N-actions leaving M and M-states without N-actions until stable.
void trunc(const ProductFragment& f, std::vector<bool>& in_m, std::vector<std::vector<bool>>& in_n) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < f.num_states(); ++x) {
      if (!in_m[x]) continue;
      bool any = false;
      for (std::size_t a = 0; a < f.actions[x].size(); ++a) {
        if (!in_n[x][a]) continue;
        const auto& succ = f.actions[x][a].successors;
        if (!std::all_of(succ.begin(), succ.end(), [&](int y) { return in_m[y]; })) {
          in_n[x][a] = false;
          continue;
        }
        any = true;
      }
      if (!any) {
        in_m[x] = false;
        changed = true;
      }
    }
  }
  for (int x = 0; x < f.num_states(); ++x)
    if (!in_m[x]) std::fill(in_n[x].begin(), in_n[x].end(), false);
}

}  // namespace

MnResult largest_mn(const ProductFragment& f) {
  const int n = f.num_states();
  const ChoiceSupport support = f.support();
  MnResult r;
  r.in_m.assign(n, true);
  r.in_n.resize(n);
  for (int x = 0; x < n; ++x)
    for (const auto& a : f.actions[x]) r.in_n[x].push_back(a.accumulating);

  while (true) {
    ++r.iterations;
    const auto before = r.in_m;
    trunc(f, r.in_m, r.in_n);
    r.zeta = almost_sure_fulfilled_then(support, f.fulfilled, r.in_m);
    for (int x = 0; x < n; ++x)
      if (r.in_m[x] && !r.zeta.winning[x]) r.in_m[x] = false;
    if (r.in_m == before) break;
  }
  r.pi.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    if (!r.in_m[x]) continue;
    for (std::size_t a = 0; a < r.in_n[x].size(); ++a)
      if (r.in_n[x][a]) {
        r.pi[x] = static_cast<int>(a);
        break;
      }
  }
  return r;
}

ContextResult solve_context(const RabinFamily& family, const Model& model, Commitment I,
                            const SynthesisOptions& options) {
  ContextResult out;
  out.commitment = I;
  out.main_automaton = family.main_automaton(I);
  const Dra& main = family.automaton(out.main_automaton);
  std::vector<std::pair<int, Collection>> initial;
  for (int s = 0; s < model.num_states(); ++s)
    for (int q = 0; q < main.num_states(); ++q)
      initial.emplace_back(s, Collection{{family.global_state(out.main_automaton, q), Element::kStar}});
  out.fragment = build_fragment(family, model, accumulating_seeds(family, I), initial,
                                options.max_product_states);
  out.mn = largest_mn(out.fragment);

  // The seeds are the first states of the fragment, in the order above. The
  // zeta witness was computed against the final M, so its winning set is the
  // two-phase test from each seed.
  std::size_t k = 0;
  for (int s = 0; s < model.num_states(); ++s)
    for (int q = 0; q < main.num_states(); ++q, ++k) {
      const int x = static_cast<int>(k);
      if (out.mn.zeta.winning[x]) out.upsilon.emplace(std::make_pair(s, q), x);
    }
  return out;
}

NaiveProduct build_naive_product(const RabinFamily& family, const Model& model,
                                 const std::vector<ContextResult>& contexts,
                                 std::size_t max_states) {
  NaiveProduct p;
  p.component.resize(family.num_commitments());
  for (Commitment I = 0; I < family.num_commitments(); ++I) {
    const int k = family.main_automaton(I);
    auto it = std::find(p.automata.begin(), p.automata.end(), k);
    p.component[I] = static_cast<int>(it - p.automata.begin());
    if (it == p.automata.end()) p.automata.push_back(k);
  }
  const std::size_t m = p.automata.size();

  auto lookup = [&](std::vector<int> key) {
    auto [it, inserted] = p.index.emplace(key, static_cast<int>(p.states.size()));
    if (inserted) {
      if (p.states.size() >= max_states)
        throw BudgetExceeded("naive product exceeded " + std::to_string(max_states) + " states");
      p.states.push_back(std::move(key));
    }
    return it->second;
  };
  std::vector<int> init{model.initial()};
  for (int k : p.automata) init.push_back(family.automaton(k).initial());
  lookup(init);

  for (std::size_t x = 0; x < p.states.size(); ++x) {
    const std::vector<int> cur = p.states[x];
    const int s = cur[0];
    std::vector<int> next(m);
    for (std::size_t c = 0; c < m; ++c) {
      const Dra& dra = family.automaton(p.automata[c]);
      next[c] = dra.step(cur[c + 1], dra.letter_of(model.label(s)));
    }
    auto& choices = p.mdp.choices.emplace_back();
    for (const auto& ch : model.choices(s)) {
      ExactMdp::Distribution d;
      for (const auto& t : ch.distribution) {
        std::vector<int> key{t.target};
        key.insert(key.end(), next.begin(), next.end());
        d.push_back({lookup(std::move(key)), t.probability});
      }
      choices.push_back(std::move(d));
    }
  }

  p.target.assign(p.states.size(), false);
  for (std::size_t x = 0; x < p.states.size(); ++x)
    for (const auto& ctx : contexts) {
      const int q = p.states[x][1 + p.component[ctx.commitment]];
      if (ctx.upsilon.count({p.states[x][0], q})) {
        p.target[x] = true;
        break;
      }
    }
  return p;
}

void check_synthesis_formula(const Formula& psi) {
  if (!has_unnegated_unit_frequencies(psi))
    throw std::invalid_argument(
        "synthesis supports frequency operators with bound 1 that are not under a negation");
  if (psi.op() == Op::FreqGlobally)
    throw std::invalid_argument(
        "G{1} as the outermost operator is not supported; conjoin it with true, e.g. 'true & " +
        to_string(psi) + "'");
}

SynthesisResult synthesize(const Model& model, const Formula& psi, const SynthesisOptions& options) {
  check_synthesis_formula(psi);
  SynthesisResult r;
  auto start = Clock::now();
  r.family = RabinFamily(psi, options.automaton);
  r.seconds["automata"] = since(start);

  start = Clock::now();
  for (Commitment I = 0; I < r.family.num_commitments(); ++I)
    r.contexts.push_back(solve_context(r.family, model, I, options));
  r.seconds["contexts"] = since(start);

  start = Clock::now();
  r.naive = build_naive_product(r.family, model, r.contexts, options.max_product_states);
  if (options.exact) {
    auto e = max_reach_exact(r.naive.mdp, r.naive.target);
    r.exact_probability = e.value[0];
    r.probability = e.value[0].get_d();
    r.reach = std::move(e.strategy);
  } else {
    auto f = max_reach(to_float(r.naive.mdp), r.naive.target, options.tolerance);
    r.probability = f.value[0];
    r.reach = std::move(f.strategy);
  }
  r.seconds["reach"] = since(start);
  return r;
}

}  // namespace freqmc
