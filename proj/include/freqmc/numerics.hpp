#pragma once

#include "freqmc/model.hpp"
#include "freqmc/rational.hpp"

#include <vector>

namespace freqmc {

/// Dense-index MDP used by every solver. Models and products are both
/// lowered to this form.
template <class Scalar>
struct BasicMdp {
  struct Edge {
    int target;
    Scalar probability;
  };
  using Distribution = std::vector<Edge>;

  std::vector<std::vector<Distribution>> choices;  ///< [state][choice]

  int num_states() const { return static_cast<int>(choices.size()); }
};

using ExactMdp = BasicMdp<Rational>;
using FloatMdp = BasicMdp<double>;

/// Successor sets per (state, choice); all qualitative algorithms work on it.
using ChoiceSupport = std::vector<std::vector<std::vector<int>>>;

ExactMdp to_exact_mdp(const Model& model);
FloatMdp to_float(const ExactMdp& mdp);

template <class Scalar>
ChoiceSupport support_of(const BasicMdp<Scalar>& mdp) {
  ChoiceSupport out(mdp.choices.size());
  for (std::size_t s = 0; s < mdp.choices.size(); ++s)
    for (const auto& d : mdp.choices[s]) {
      auto& succ = out[s].emplace_back();
      for (const auto& e : d) succ.push_back(e.target);
    }
  return out;
}

/// Stationary distribution of a Markov chain restricted to the BSCC `members`,
/// returned in the order of `members`.
RationalVector stationary_distribution(const Model& mc, const std::vector<int>& members);

/// Exact probability of eventually reaching `target` in a Markov chain (every
/// state must have exactly one choice).
RationalVector reach_probability(const ExactMdp& mc, const std::vector<bool>& target);
RationalVector reach_probability(const Model& mc, const std::vector<bool>& target);

struct Strategy {
  std::vector<int> choice;  ///< -1 where any choice will do
};

struct QualitativeResult {
  std::vector<bool> winning;
  Strategy strategy;  ///< witness on winning states
};

/// States with a strategy reaching `target` with probability one. The witness
/// is memoryless; on target states it picks a choice staying in the winning
/// region when there is one.
QualitativeResult almost_sure_reach(const ChoiceSupport& mdp, const std::vector<bool>& target);

/// Two-phase objective: almost surely visit a `fulfilled` state and
/// afterwards (or at the same time) a state of `goal`.
struct TwoPhaseResult {
  std::vector<bool> winning;    ///< per state, with nothing fulfilled seen yet
  std::vector<int> choice[2];   ///< [fulfilled seen][state]
};

TwoPhaseResult almost_sure_fulfilled_then(const ChoiceSupport& mdp,
                                          const std::vector<bool>& fulfilled,
                                          const std::vector<bool>& goal);

struct MaxReachResult {
  std::vector<double> value;
  Strategy strategy;
};

struct ExactMaxReachResult {
  RationalVector value;
  Strategy strategy;
};

/// Maximal reachability probabilities by value iteration over the SCC
/// order, with probability-0 and probability-1 states fixed beforehand.
/// The strategy picks, among actions within tolerance of the optimum, one
/// that makes progress towards the target.
MaxReachResult max_reach(const FloatMdp& mdp, const std::vector<bool>& target, double tol = 1e-10);

/// Exact maximal reachability by policy iteration.
ExactMaxReachResult max_reach_exact(const ExactMdp& mdp, const std::vector<bool>& target);

/// Probability of reaching `target` in the chain induced by a memoryless
/// strategy.
RationalVector reach_under(const ExactMdp& mdp, const Strategy& strategy,
                           const std::vector<bool>& target);

}  // namespace freqmc
