#include "freqmc/product.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace freqmc {

RabinFamily::RabinFamily(const Formula& psi, const TranslationOptions& options)
    : psi_(psi), bodies_(collect_frequency_subformulas(psi)) {
  if (bodies_.size() > 16) throw std::invalid_argument("too many frequency subformulas");
  const Commitment count = num_commitments();
  main_.resize(count);
  body_.assign(bodies_.size(), std::vector<int>(count, -1));
  for (Commitment I = 0; I < count; ++I) {
    main_[I] = intern(substitute_commitment(psi_, bodies_, I), options);
    for (std::size_t i = 0; i < bodies_.size(); ++i)
      if ((I >> i) & 1U) body_[i][I] = intern(substitute_commitment(bodies_[i], bodies_, I), options);
  }
}

int RabinFamily::intern(const Formula& f, const TranslationOptions& options) {
  for (std::size_t k = 0; k < formulas_.size(); ++k)
    if (formulas_[k] == f) return static_cast<int>(k);
  automata_.push_back(ltl_to_dra(f, options));
  formulas_.push_back(f);
  offset_.push_back(static_cast<int>(owner_.size()));
  const int k = static_cast<int>(automata_.size()) - 1;
  owner_.insert(owner_.end(), automata_.back().num_states(), k);
  return k;
}

void normalize(Collection& c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
}

bool is_fulfilled(const Collection& c) {
  return !c.empty() && std::all_of(c.begin(), c.end(), [](const Element& e) { return e.recently_fulfilled(); });
}

bool is_violated(const Collection& c) {
  return std::any_of(c.begin(), c.end(), [](const Element& e) { return e.bottom(); });
}

Collection evolve(const RabinFamily& family, const Collection& chosen, const Valuation& label,
                  bool source_fulfilled) {
  Collection out;
  out.reserve(chosen.size());
  std::vector<int> letters(family.num_automata(), -1);
  for (const Element& e : chosen) {
    const int k = family.automaton_of(e.q);
    const Dra& dra = family.automaton(k);
    if (letters[k] < 0) letters[k] = static_cast<int>(dra.letter_of(label));
    const int next = dra.step(family.local_state(e.q), static_cast<Letter>(letters[k]));
    Element n{family.global_state(k, next), e.tag};
    if (!e.star() && !e.bottom()) {
      const RabinPair& p = dra.pairs()[e.pair()];
      if (p.avoid[next])
        n.tag = Element::kBottom;
      else if (p.visit[next])
        n = Element::committed(n.q, e.pair(), true);
      else if (source_fulfilled)
        n = Element::committed(n.q, e.pair(), false);
    }
    out.push_back(n);
  }
  normalize(out);
  return out;
}

std::vector<LegalAction> legal_actions(const RabinFamily& family, const Model& model, int s,
                                       const Collection& current, const Collection& seeds) {
  Collection fixed;
  std::vector<Element> pending;
  for (const Element& e : current) (e.star() ? pending : fixed).push_back(e);
  // Options per pending element: stay pending, or commit to pair j.
  std::vector<int> radix;
  for (const Element& e : pending)
    radix.push_back(1 + static_cast<int>(family.automaton(family.automaton_of(e.q)).pairs().size()));

  std::set<Collection> chosen;
  std::vector<int> digit(pending.size(), 0);
  while (true) {
    Collection c = fixed;
    for (std::size_t i = 0; i < pending.size(); ++i)
      c.push_back(digit[i] == 0 ? pending[i] : Element::committed(pending[i].q, digit[i] - 1, false));
    normalize(c);
    chosen.insert(c);
    Collection with_seeds = c;
    with_seeds.insert(with_seeds.end(), seeds.begin(), seeds.end());
    normalize(with_seeds);
    chosen.insert(std::move(with_seeds));

    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == radix[i]) digit[i++] = 0;
    if (i == digit.size()) break;
  }

  std::vector<LegalAction> out;
  for (int a = 0; a < model.num_choices(s); ++a)
    for (const auto& c : chosen) {
      const bool acc = std::includes(c.begin(), c.end(), seeds.begin(), seeds.end());
      out.push_back({a, c, acc});
    }
  return out;
}

int ProductFragment::find(int s, int collection) const {
  auto it = index.find((static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(collection));
  return it == index.end() ? -1 : it->second;
}

ChoiceSupport ProductFragment::support() const {
  ChoiceSupport out(states.size());
  for (std::size_t x = 0; x < states.size(); ++x)
    for (const auto& a : actions[x]) out[x].push_back(a.successors);
  return out;
}

Collection accumulating_seeds(const RabinFamily& family, Commitment I) {
  Collection seeds;
  for (int i = 0; i < family.num_frequency(); ++i)
    if ((I >> i) & 1U) {
      const int k = family.body_automaton(i, I);
      seeds.push_back({family.global_state(k, family.automaton(k).initial()), Element::kStar});
    }
  normalize(seeds);
  return seeds;
}

ProductFragment build_fragment(const RabinFamily& family, const Model& model,
                               const Collection& seeds,
                               const std::vector<std::pair<int, Collection>>& initial,
                               std::size_t max_states) {
  ProductFragment f;
  std::map<Collection, int> ids;
  f.collections.emplace_back();  // dead
  auto intern = [&](Collection c) {
    if (is_violated(c)) return ProductFragment::kDead;
    auto [it, inserted] = ids.emplace(c, static_cast<int>(f.collections.size()));
    if (inserted) f.collections.push_back(std::move(c));
    return it->second;
  };
  auto lookup = [&](int s, int cid) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(cid);
    auto [it, inserted] = f.index.emplace(key, static_cast<int>(f.states.size()));
    if (inserted) {
      if (f.states.size() >= max_states)
        throw BudgetExceeded("collection product exceeded " + std::to_string(max_states) + " states");
      f.states.emplace_back(s, cid);
      f.fulfilled.push_back(cid != ProductFragment::kDead && is_fulfilled(f.collections[cid]));
    }
    return it->second;
  };
  for (const auto& [s, c] : initial) {
    Collection n = c;
    normalize(n);
    lookup(s, intern(std::move(n)));
  }

  for (std::size_t x = 0; x < f.states.size(); ++x) {
    const auto [s, cid] = f.states[x];
    std::vector<ProductFragment::Action> acts;
    auto add = [&](int choice, bool acc, int next) {
      for (const auto& a : acts)
        if (a.choice == choice && a.accumulating == acc && a.next_collection == next) return;
      ProductFragment::Action a{choice, acc, next, {}};
      for (const auto& t : model.choices(s)[choice].distribution) a.successors.push_back(lookup(t.target, next));
      acts.push_back(std::move(a));
    };
    if (cid == ProductFragment::kDead) {
      for (int a = 0; a < model.num_choices(s); ++a) add(a, false, ProductFragment::kDead);
    } else {
      const Collection current = f.collections[cid];
      const bool source_fulfilled = f.fulfilled[x];
      for (const auto& la : legal_actions(family, model, s, current, seeds))
        add(la.choice, la.accumulating,
            intern(evolve(family, la.collection, model.label(s), source_fulfilled)));
    }
    f.actions.push_back(std::move(acts));
  }
  return f;
}

}  // namespace freqmc
