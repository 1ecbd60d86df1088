#include "doctest.h"

#include "freqmc/mc_engine.hpp"
#include "support/ltl_oracle.hpp"
#include "support/random_instances.hpp"

#include <cmath>

using namespace freqmc;

namespace {

const char* kCycle = "state s a\nstate t\ninit s\ntrans s - t:1\ntrans t - s:1\n";
const char* kBranch =
    "state s\nstate u a\nstate v\ninit s\ntrans s - u:0.3 v:0.7\ntrans u - u:1\ntrans v - v:1\n";
// Two closed classes: {u1,u2} labelled a everywhere, {v1,v2} never.
const char* kTwoClasses = R"(
state s
state u1 a
state u2 a
state v1
state v2
init s
trans s - u1:3/10 v1:7/10
trans u1 - u2:1
trans u2 - u1:1/2 u2:1/2
trans v1 - v2:1
trans v2 - v1:1
)";

Rational check(const char* model, const char* formula) {
  return check_mc(parse_model(model), parse_formula(formula)).probability;
}

// Independent value of a formula whose frequency operators all have pure
// LTL bodies: floating-point stationary distributions by power iteration,
// oracle LTL values, and a fresh atom per operator. Returns NaN when a
// threshold comparison is too close to call in floating point.
double oracle_value(const Model& mc, Formula psi) {
  Model model = mc;
  int fresh = 0;
  while (auto node = innermost_frequency_node(psi)) {
    const auto values = testing::oracle_ltl_values(model, node->child(0));
    const std::string alpha = "__oracle_" + std::to_string(fresh++);
    auto labels = model.labels();
    for (const auto& b : bsccs(model).bsccs) {
      std::vector<double> pi(b.size(), 1.0 / b.size());
      for (int it = 0; it < 100000; ++it) {
        std::vector<double> next(b.size(), 0.0);
        for (std::size_t i = 0; i < b.size(); ++i) {
          next[i] += 0.5 * pi[i];
          for (const auto& t : model.choices(b[i])[0].distribution)
            next[std::find(b.begin(), b.end(), t.target) - b.begin()] += 0.5 * pi[i] * t.probability.get_d();
        }
        pi = std::move(next);
      }
      double value = 0;
      for (std::size_t i = 0; i < b.size(); ++i) value += pi[i] * values[b[i]];
      const double bound = node->bound().get_d();
      if (std::abs(value - bound) < 1e-7) return std::nan("");
      if (value >= bound)
        for (int s : b) labels[s].insert(alpha);
    }
    model = model.relabeled(std::move(labels));
    psi = replace_freq_with_reach(psi, *node, alpha);
  }
  return testing::oracle_ltl_values(model, psi)[model.initial()];
}

}  // namespace

TEST_CASE("LTL probabilities on small chains") {
  const Model cycle = parse_model(kCycle);
  CHECK(ltl_probability(cycle, 0, parse_formula("true")) == 1);
  CHECK(ltl_probability(cycle, 0, parse_formula("F a")) == 1);
  CHECK(ltl_probability(cycle, 1, parse_formula("F a")) == 1);
  CHECK(ltl_probability(cycle, 1, parse_formula("a")) == 0);
  const Model branch = parse_model(kBranch);
  CHECK(ltl_probability(branch, 0, parse_formula("F a")) == Rational(3, 10));
  CHECK(ltl_probability(branch, 0, parse_formula("X G a")) == Rational(3, 10));
  CHECK(ltl_probabilities(branch, parse_formula("G !a")) ==
        RationalVector{Rational(7, 10), 0, 1});
  CHECK_THROWS_AS(ltl_probability(branch, 0, parse_formula("G{1} a")), std::invalid_argument);
}

TEST_CASE("eliminating a frequency operator") {
  const Model cycle = parse_model(kCycle);
  auto e = eliminate_innermost_frequency(parse_formula("G{1/2} a"), cycle);
  CHECK(e.formula == Formula::eventually(Formula::atom("__freq_0")));
  REQUIRE(e.certificate.entries.size() == 1);
  CHECK(e.certificate.entries[0].value == Rational(1, 2));
  CHECK(e.certificate.entries[0].holds);
  CHECK(e.model.label(0).count("__freq_0"));
  CHECK(e.model.label(1).count("__freq_0"));

  e = eliminate_innermost_frequency(parse_formula("G{0.6} a"), cycle);
  CHECK_FALSE(e.certificate.entries[0].holds);
  CHECK_FALSE(e.model.label(0).count("__freq_0"));

  e = eliminate_innermost_frequency(parse_formula("G{0} a"), parse_model(kTwoClasses));
  for (const auto& entry : e.certificate.entries) CHECK(entry.holds);
  CHECK_FALSE(e.model.label(0).count("__freq_0"));  // transient

  // The fresh atom avoids names already in use.
  const Model taken = parse_model("state s __freq_0\ninit s\ntrans s - s:1\n");
  e = eliminate_innermost_frequency(parse_formula("G{1} __freq_0"), taken);
  CHECK(e.certificate.atom == "__freq_1");
}

TEST_CASE("whole-formula checks") {
  CHECK(check(kCycle, "true") == 1);
  CHECK(check(kCycle, "G{1/2} a") == 1);
  CHECK(check(kCycle, "G{0.6} a") == 0);
  CHECK(check(kCycle, "G{1/2} X a") == 1);
  CHECK(check(kTwoClasses, "G{1} a") == Rational(3, 10));
  CHECK(check(kTwoClasses, "G{1} !a") == Rational(7, 10));
  CHECK(check(kTwoClasses, "G{1} G{1} a") == Rational(3, 10));
  CHECK(check(kTwoClasses, "!a & G{1/2} F a") == Rational(3, 10));
  CHECK(check(kTwoClasses, "G{1} G{1/2} a | G{1/2} !a") == 1);

  const McReport r = check_mc(parse_model(kTwoClasses), parse_formula("G{1} G{1/2} a"));
  CHECK(r.certificates.size() == 2);
  CHECK(r.product_states.size() == 3);
  CHECK(is_ltl(r.residual));
  CHECK_THROWS_AS(check_mc(parse_model("state s\ninit s\ntrans s x s:1\ntrans s y s:1\n"),
                           parse_formula("true")),
                  std::invalid_argument);
}

TEST_CASE("product budget") {
  McOptions tiny;
  tiny.max_product_states = 1;
  CHECK_THROWS_AS(check_mc(parse_model(kCycle), parse_formula("F a"), tiny), BudgetExceeded);
}

TEST_CASE("random chains against the floating-point oracle") {
  std::mt19937_64 rng(53);
  testing::FormulaShape body_shape;
  testing::FormulaShape outer_shape;
  outer_shape.frequencies = true;
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    const Model mc = testing::random_model(rng, 1 + static_cast<int>(rng() % 6), 1, {"a", "b"});
    const Formula psi = testing::random_formula(rng, 1 + static_cast<int>(rng() % 7), outer_shape);
    const double expected = oracle_value(mc, psi);
    if (std::isnan(expected)) continue;
    ++compared;
    INFO(to_string(psi), "\n", serialize(mc));
    CHECK(std::abs(check_mc(mc, psi).probability.get_d() - expected) < 1e-8);
  }
  CHECK(compared > 100);
}

TEST_CASE("logical identities on random chains") {
  std::mt19937_64 rng(59);
  testing::FormulaShape shape;
  shape.frequencies = true;
  const Rational bounds[] = {0, Rational(1, 4), Rational(1, 2), Rational(2, 3), 1};
  for (int i = 0; i < 100; ++i) {
    const Model mc = testing::random_model(rng, 1 + static_cast<int>(rng() % 6), 1, {"a", "b"});
    const Formula phi = testing::random_formula(rng, 1 + static_cast<int>(rng() % 4), shape);
    const Formula chi = testing::random_formula(rng, 1 + static_cast<int>(rng() % 4), shape);
    const Rational base = check_mc(mc, chi).probability;
    CHECK(base >= 0);
    CHECK(base <= 1);
    CHECK(check_mc(mc, Formula::conjunction(Formula::freq_globally(0, phi), chi)).probability == base);
    Rational previous = 1;
    for (const auto& p : bounds) {
      const Rational v = check_mc(mc, Formula::freq_globally(p, phi)).probability;
      CHECK(v <= previous);
      previous = v;
    }
    CHECK(check_mc(mc, Formula::globally(phi)).probability <=
          check_mc(mc, Formula::freq_globally(1, phi)).probability);
  }
}
