#pragma once

#include "freqmc/automata.hpp"
#include "freqmc/model.hpp"
#include "freqmc/rational.hpp"

#include <string>
#include <vector>

namespace freqmc {

struct McOptions {
  TranslationOptions automaton;
  std::size_t max_product_states = 2'000'000;
};

/// Outcome of eliminating one G^p node: the long-run share of positions
/// satisfying the body inside each BSCC.
struct FrequencyCertificate {
  struct Entry {
    std::vector<int> bscc;
    Rational value;  ///< sum over t in B of x_t * P_t[body]
    bool holds = false;
  };

  std::string atom;
  Formula body = Formula::tt();
  Rational bound;
  std::vector<Entry> entries;
};

/// Satisfaction probability of a pure LTL formula from every state.
/// `product_states`, if given, receives the size of the product built.
RationalVector ltl_probabilities(const Model& mc, const Formula& phi, const McOptions& options = {},
                                 std::size_t* product_states = nullptr);

Rational ltl_probability(const Model& mc, int state, const Formula& phi,
                         const McOptions& options = {});

struct Elimination {
  Formula formula = Formula::tt();
  Model model;
  FrequencyCertificate certificate;
  std::size_t product_states = 0;
};

/// Replaces the leftmost innermost G^p node by F alpha, where alpha is a
/// fresh atom labelling exactly the BSCCs in which the body holds with long-
/// run frequency at least p.
Elimination eliminate_innermost_frequency(const Formula& psi, const Model& mc,
                                          const McOptions& options = {});

struct McReport {
  Rational probability;
  Formula residual = Formula::tt();  ///< LTL formula checked last
  std::vector<FrequencyCertificate> certificates;
  std::vector<std::size_t> product_states;  ///< one per product built
};

/// Probability that the chain satisfies psi from its initial state.
McReport check_mc(const Model& mc, const Formula& psi, const McOptions& options = {});

}  // namespace freqmc
