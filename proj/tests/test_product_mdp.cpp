#include "doctest.h"

#include "freqmc/mdp_engine.hpp"
#include "support/ltl_oracle.hpp"
#include "support/random_instances.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace freqmc;

namespace {

Model maintenance() { return load_model(std::filesystem::path(FREQMC_SOURCE_DIR) / "models/maintenance.mdl"); }

const char* kExample = "X q & G F m & G{1}(q -> X r)";
const char* kAlways = "G F m & G{1}(q -> X r)";

// Almost-sure reachability by the textbook double fixpoint over explicit
// successor lists.
std::vector<bool> oracle_almost_sure(const std::vector<std::vector<std::vector<int>>>& succ,
                                     const std::vector<bool>& target) {
  const std::size_t n = succ.size();
  std::vector<bool> keep(n, true);
  while (true) {
    std::vector<bool> reach = target;
    for (std::size_t x = 0; x < n; ++x) reach[x] = reach[x] && keep[x];
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t x = 0; x < n; ++x) {
        if (reach[x] || !keep[x]) continue;
        for (const auto& a : succ[x]) {
          const bool safe = std::all_of(a.begin(), a.end(), [&](int y) { return keep[y]; });
          const bool hits = std::any_of(a.begin(), a.end(), [&](int y) { return reach[y]; });
          if (safe && hits) {
            reach[x] = grew = true;
            break;
          }
        }
      }
    }
    if (reach == keep) return keep;
    keep = reach;
  }
}

// Greatest (M, N) computed on the doubled state space (x, seen fulfilled).
std::vector<bool> oracle_mn(const ProductFragment& f) {
  const int n = f.num_states();
  std::vector<bool> m(n, true);
  while (true) {
    std::vector<bool> next = m;
    for (bool changed = true; changed;) {
      changed = false;
      for (int x = 0; x < n; ++x) {
        if (!next[x]) continue;
        bool ok = false;
        for (const auto& a : f.actions[x])
          ok = ok || (a.accumulating && std::all_of(a.successors.begin(), a.successors.end(),
                                                    [&](int y) { return next[y]; }));
        if (!ok) next[x] = false, changed = true;
      }
    }
    std::vector<std::vector<std::vector<int>>> succ(2 * n);
    std::vector<bool> target(2 * n, false);
    for (int x = 0; x < n; ++x)
      for (int b = 0; b < 2; ++b) {
        target[2 * x + b] = b == 1 && next[x];
        for (const auto& a : f.actions[x]) {
          std::vector<int> ys;
          for (int y : a.successors) ys.push_back(2 * y + (b || f.fulfilled[y] ? 1 : 0));
          succ[2 * x + b].push_back(ys);
        }
      }
    const auto win = oracle_almost_sure(succ, target);
    for (int x = 0; x < n; ++x)
      if (next[x] && !win[2 * x + (f.fulfilled[x] ? 1 : 0)]) next[x] = false;
    if (next == m) return m;
    m = next;
  }
}

Formula random_synthesis_formula(std::mt19937_64& rng, int size) {
  testing::FormulaShape shape;
  shape.frequencies = true;
  shape.unit_only = true;
  while (true) {
    Formula f = testing::random_formula(rng, size, shape);
    if (f.op() == Op::FreqGlobally) f = Formula::conjunction(Formula::tt(), f);
    if (has_unnegated_unit_frequencies(f)) return f;
  }
}

Formula replace_all_frequencies(const Formula& f, bool with_true) {
  Formula out = f;
  while (auto node = innermost_frequency_node(out))
    out = replace_subformula(out, *node, with_true ? Formula::tt() : Formula::globally(node->child(0)));
  return out;
}

}  // namespace

TEST_CASE("collections") {
  const RabinFamily family(parse_formula(kAlways));
  REQUIRE(family.num_frequency() == 1);
  const Collection seeds = accumulating_seeds(family, 1);
  REQUIRE(seeds.size() == 1);
  CHECK(seeds[0].star());
  CHECK(accumulating_seeds(family, 0).empty());

  Collection c{Element::committed(0, 0, true), Element::committed(1, 0, true)};
  CHECK(is_fulfilled(c));
  CHECK_FALSE(is_violated(c));
  c.push_back(Element{2, Element::kStar});
  CHECK_FALSE(is_fulfilled(c));
  c.push_back(Element{3, Element::kBottom});
  CHECK(is_violated(c));
  CHECK_FALSE(is_fulfilled(Collection{}));

  Collection d{Element{1, Element::kStar}, Element{0, Element::kStar}, Element{1, Element::kStar}};
  normalize(d);
  CHECK(d.size() == 2);
  CHECK(d[0].q == 0);
}

TEST_CASE("legal actions on the maintenance model") {
  const Model model = maintenance();
  const RabinFamily family(parse_formula(kAlways));
  const Collection seeds = accumulating_seeds(family, 1);
  // Seeds are added pending; per model choice there is one action without
  // and one with them.
  const auto fresh = legal_actions(family, model, 0, {}, seeds);
  CHECK(fresh.size() == 4);
  for (const auto& a : fresh) CHECK(a.accumulating == !a.collection.empty());
  // A pending element stays pending or commits to one of the pairs.
  const int body = family.body_automaton(0, 1);
  const int pairs = static_cast<int>(family.automaton(body).pairs().size());
  const auto later = legal_actions(family, model, 0, seeds, seeds);
  CHECK(later.size() == static_cast<std::size_t>(2 * (1 + pairs) * 2 - 2));
}

TEST_CASE("evolve moves every element along the label") {
  const RabinFamily family(parse_formula(kAlways));
  const int body = family.body_automaton(0, 1);
  const Dra& dra = family.automaton(body);
  const Valuation label{"q"};
  const Collection pending{Element{family.global_state(body, dra.initial()), Element::kStar}};
  const Collection next = evolve(family, pending, label, false);
  REQUIRE(next.size() == 1);
  CHECK(next[0].star());
  CHECK(family.local_state(next[0].q) == dra.step(dra.initial(), dra.letter_of(label)));
}

TEST_CASE("largest (M, N) matches the doubled-state oracle") {
  const Model model = maintenance();
  for (const char* text : {kExample, kAlways, "G{1} F m & G F q", "true & G{1} (F m & F r)"}) {
    const RabinFamily family(parse_formula(text));
    for (Commitment I = 0; I < family.num_commitments(); ++I) {
      const ContextResult ctx = solve_context(family, model, I);
      CHECK(ctx.mn.in_m == oracle_mn(ctx.fragment));
      for (int x = 0; x < ctx.fragment.num_states(); ++x) {
        if (!ctx.mn.in_m[x]) continue;
        const auto& a = ctx.fragment.actions[x][ctx.mn.pi[x]];
        CHECK(a.accumulating);
        for (int y : a.successors) CHECK(ctx.mn.in_m[y]);
      }
    }
  }
  std::mt19937_64 rng(11);
  for (int round = 0; round < 40; ++round) {
    const Model m = testing::random_model(rng, 2 + rng() % 4, 2, {"a", "b"});
    const Formula psi = random_synthesis_formula(rng, 5);
    const RabinFamily family(psi);
    const Commitment I = family.num_commitments() - 1;
    const ContextResult ctx = solve_context(family, m, I);
    CHECK_MESSAGE(ctx.mn.in_m == oracle_mn(ctx.fragment), to_string(psi));
  }
}

TEST_CASE("maintenance example") {
  const Model model = maintenance();
  SynthesisOptions options;
  const SynthesisResult r = synthesize(model, parse_formula(kExample), options);
  CHECK(std::abs(r.probability - 0.5) < 1e-9);
  options.exact = true;
  const SynthesisResult e = synthesize(model, parse_formula(kExample), options);
  REQUIRE(e.exact_probability);
  CHECK(*e.exact_probability == Rational(1, 2));

  // After reading s0 the play is in s1 with the frequency assumption made.
  const ContextResult& ctx = e.contexts[1];
  const Dra& main = e.family.automaton(ctx.main_automaton);
  const int q = main.step(main.initial(), main.letter_of(model.label(0)));
  CHECK(ctx.upsilon.count({1, q}) == 1);
  CHECK(e.contexts[0].upsilon.empty());
}

TEST_CASE("maintenance model satisfies the frequency property almost surely") {
  const Model model = maintenance();
  SynthesisOptions options;
  options.exact = true;
  const SynthesisResult r = synthesize(model, parse_formula(kAlways), options);
  CHECK(*r.exact_probability == 1);
  const ContextResult& ctx = r.contexts[1];
  // The accumulating choice at s0 is w: taking m while accumulating lands in
  // s4 where q is read without a following r.
  for (int x = 0; x < ctx.fragment.num_states(); ++x) {
    if (!ctx.mn.in_m[x] || ctx.fragment.states[x].first != 0) continue;
    const int choice = ctx.fragment.actions[x][ctx.mn.pi[x]].choice;
    CHECK(model.choices(0)[choice].action == "w");
  }
}

TEST_CASE("unsupported formulas are rejected") {
  const Model model = maintenance();
  CHECK_THROWS_AS(synthesize(model, parse_formula("G{1/2} m")), std::invalid_argument);
  CHECK_THROWS_AS(synthesize(model, parse_formula("!G{1} m")), std::invalid_argument);
  CHECK_THROWS_AS(synthesize(model, parse_formula("G{1} m")), std::invalid_argument);
  CHECK_NOTHROW(synthesize(model, parse_formula("true & G{1} F m")));
}

TEST_CASE("budget") {
  SynthesisOptions options;
  options.max_product_states = 3;
  CHECK_THROWS_AS(synthesize(maintenance(), parse_formula(kAlways), options), BudgetExceeded);
}

TEST_CASE("pure LTL matches the oracle") {
  std::mt19937_64 rng(5);
  testing::FormulaShape shape;
  int compared = 0;
  for (int round = 0; round < 60; ++round) {
    const Model m = testing::random_model(rng, 2 + rng() % 5, 3, {"a", "b"});
    const Formula phi = testing::random_formula(rng, 2 + rng() % 6, shape);
    const double expected = testing::oracle_ltl_values(m, phi)[m.initial()];
    const SynthesisResult r = synthesize(m, phi);
    CHECK_MESSAGE(std::abs(r.probability - expected) < 1e-8, to_string(phi));
    ++compared;
  }
  CHECK(compared == 60);
}

TEST_CASE("frequency values lie between the LTL bounds") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 40; ++round) {
    const Model m = testing::random_model(rng, 2 + rng() % 4, 2, {"a", "b"});
    const Formula psi = random_synthesis_formula(rng, 2 + rng() % 5);
    const double lower = testing::oracle_ltl_values(m, replace_all_frequencies(psi, false))[m.initial()];
    const double upper = testing::oracle_ltl_values(m, replace_all_frequencies(psi, true))[m.initial()];
    const double value = synthesize(m, psi).probability;
    CHECK_MESSAGE(value >= lower - 1e-8, to_string(psi));
    CHECK_MESSAGE(value <= upper + 1e-8, to_string(psi));
  }
}
