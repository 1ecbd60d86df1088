#include "freqmc/mc_engine.hpp"

#include "freqmc/numerics.hpp"

#include <unordered_map>

namespace freqmc {

namespace {

struct ChainProduct {
  std::vector<std::pair<int, int>> states;  // (model state, automaton state)
  ExactMdp chain;
  std::vector<bool> accepting_bscc;
};

// (s, q) where q is the automaton state before reading the label of s.
ChainProduct build_product(const Model& mc, const Dra& dra, std::size_t max_states) {
  ChainProduct p;
  std::unordered_map<long long, int> ids;
  const long long width = dra.num_states();
  auto lookup = [&](int s, int q) {
    auto [it, inserted] = ids.emplace(s * width + q, static_cast<int>(p.states.size()));
    if (inserted) {
      if (p.states.size() >= max_states)
        throw BudgetExceeded("product exceeded " + std::to_string(max_states) + " states");
      p.states.emplace_back(s, q);
    }
    return it->second;
  };
  for (int s = 0; s < mc.num_states(); ++s) lookup(s, dra.initial());
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    const auto [s, q] = p.states[i];
    const int next_q = dra.step(q, dra.letter_of(mc.label(s)));
    ExactMdp::Distribution d;
    for (const auto& t : mc.choices(s)[0].distribution) d.push_back({lookup(t.target, next_q), t.probability});
    p.chain.choices.push_back({std::move(d)});
  }

  const auto support = support_of(p.chain);
  graph::Adjacency adj(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) adj[i] = support[i][0];
  const auto scc = graph::strongly_connected_components(adj);
  const auto bottom = graph::bottom_components(adj, scc);
  p.accepting_bscc.assign(p.states.size(), false);
  for (std::size_t c = 0; c < scc.members.size(); ++c) {
    if (!bottom[c]) continue;
    std::vector<bool> inf(dra.num_states(), false);
    for (int v : scc.members[c]) inf[p.states[v].second] = true;
    if (!rabin_accepts(dra, inf)) continue;
    for (int v : scc.members[c]) p.accepting_bscc[v] = true;
  }
  return p;
}

}  // namespace

RationalVector ltl_probabilities(const Model& mc, const Formula& phi, const McOptions& options,
                                 std::size_t* product_states) {
  if (!mc.is_markov_chain()) throw std::invalid_argument("model is not a Markov chain");
  if (!is_ltl(phi)) throw std::invalid_argument("formula is not pure LTL");
  const Dra dra = ltl_to_dra(phi, options.automaton);
  const ChainProduct p = build_product(mc, dra, options.max_product_states);
  if (product_states) *product_states = p.states.size();
  const auto reach = reach_probability(p.chain, p.accepting_bscc);
  // The first num_states() product states are (s, q_in) in order.
  return RationalVector(reach.begin(), reach.begin() + mc.num_states());
}

Rational ltl_probability(const Model& mc, int state, const Formula& phi, const McOptions& options) {
  return ltl_probabilities(mc, phi, options)[state];
}

Elimination eliminate_innermost_frequency(const Formula& psi, const Model& mc,
                                          const McOptions& options) {
  const auto node = innermost_frequency_node(psi);
  if (!node) throw std::invalid_argument("formula has no frequency operator");
  const Formula& body = node->child(0);

  Elimination out;
  const auto p = ltl_probabilities(mc, body, options, &out.product_states);

  const auto used = atoms_of(psi);
  const auto model_atoms = mc.atoms();
  std::string alpha;
  for (int k = 0;; ++k) {
    alpha = "__freq_" + std::to_string(k);
    if (!used.count(alpha) && !model_atoms.count(alpha)) break;
  }

  auto labels = mc.labels();
  out.certificate.atom = alpha;
  out.certificate.body = body;
  out.certificate.bound = node->bound();
  for (const auto& b : bsccs(mc).bsccs) {
    const auto pi = stationary_distribution(mc, b);
    FrequencyCertificate::Entry e{b, 0, false};
    for (std::size_t i = 0; i < b.size(); ++i) e.value += pi[i] * p[b[i]];
    e.holds = e.value >= node->bound();
    if (e.holds)
      for (int s : b) labels[s].insert(alpha);
    out.certificate.entries.push_back(std::move(e));
  }
  out.model = mc.relabeled(std::move(labels));
  out.formula = replace_freq_with_reach(psi, *node, alpha);
  return out;
}

McReport check_mc(const Model& mc, const Formula& psi, const McOptions& options) {
  if (!mc.is_markov_chain()) throw std::invalid_argument("model is not a Markov chain");
  McReport report;
  Formula current = psi;
  Model model = mc;
  while (!is_ltl(current)) {
    Elimination e = eliminate_innermost_frequency(current, model, options);
    report.certificates.push_back(std::move(e.certificate));
    report.product_states.push_back(e.product_states);
    current = std::move(e.formula);
    model = std::move(e.model);
  }
  std::size_t size = 0;
  report.probability = ltl_probabilities(model, current, options, &size)[model.initial()];
  report.product_states.push_back(size);
  report.residual = current;
  return report;
}

}  // namespace freqmc
