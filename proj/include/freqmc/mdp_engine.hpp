#pragma once

#include "freqmc/numerics.hpp"
#include "freqmc/product.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace freqmc {

struct SynthesisOptions {
  TranslationOptions automaton;
  std::size_t max_product_states = 2'000'000;
  double tolerance = 1e-10;
  bool exact = false;
};

/// Largest (M, N): M-states each keep an accumulating N-action whose
/// successors stay in M, and from every M-state a fulfilled state and then
/// M again are reached almost surely.
struct MnResult {
  std::vector<bool> in_m;
  std::vector<std::vector<bool>> in_n;  ///< [state][action]
  std::vector<int> pi;                  ///< N-action per M-state, -1 elsewhere
  TwoPhaseResult zeta;                  ///< witness for the final M
  int iterations = 0;
};

MnResult largest_mn(const ProductFragment& fragment);

struct ContextResult {
  Commitment commitment = 0;
  int main_automaton = 0;
  ProductFragment fragment;
  MnResult mn;
  /// Upsilon entries of this commitment: (model state, main automaton state)
  /// with the fragment state of the singleton seed.
  std::map<std::pair<int, int>, int> upsilon;
};

/// Builds the fragment seeded with every (s, {(q, pending)}) for q a state of
/// the main automaton and computes (M, N) and Upsilon for commitment I.
ContextResult solve_context(const RabinFamily& family, const Model& model, Commitment I,
                            const SynthesisOptions& options = {});

/// Lockstep product of the model with the distinct main automata.
struct NaiveProduct {
  std::vector<int> automata;    ///< family automaton ids, one per component
  std::vector<int> component;   ///< commitment -> component index
  std::vector<std::vector<int>> states;  ///< [model state, q_0, ..., q_{m-1}]
  ExactMdp mdp;
  std::vector<bool> target;     ///< some commitment's Upsilon is reached

  std::map<std::vector<int>, int> index;
};

NaiveProduct build_naive_product(const RabinFamily& family, const Model& model,
                                 const std::vector<ContextResult>& contexts,
                                 std::size_t max_states);

struct SynthesisResult {
  RabinFamily family;
  std::vector<ContextResult> contexts;
  NaiveProduct naive;
  double probability = 0;
  std::optional<Rational> exact_probability;
  Strategy reach;  ///< on the naive product
  std::map<std::string, double> seconds;
};

/// Throws std::invalid_argument when psi is outside the supported fragment
/// (bounds other than 1, G{1} under a negation, or G{1} as the outermost
/// operator).
void check_synthesis_formula(const Formula& psi);

SynthesisResult synthesize(const Model& model, const Formula& psi,
                           const SynthesisOptions& options = {});

}  // namespace freqmc
