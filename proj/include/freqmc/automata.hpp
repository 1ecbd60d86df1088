#pragma once

#include "freqmc/formula.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqmc {

/// A letter of 2^AP encoded as a bitmask over an automaton's sorted atom list.
using Letter = std::uint32_t;

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nondeterministic automaton with transition-based generalized Buchi
/// acceptance, as produced by the tableau. A transition is enabled on every
/// letter containing all of `positive` and none of `negative`.
struct GeneralizedBuchi {
  struct Edge {
    Letter positive = 0;
    Letter negative = 0;
    int target = 0;
    std::uint64_t acceptance = 0;  ///< bit k set iff the edge is in set k

    bool enabled(Letter a) const { return (a & positive) == positive && (a & negative) == 0; }
  };

  std::vector<std::string> atoms;
  std::vector<std::vector<Edge>> edges;
  std::vector<int> initial;
  int num_acceptance_sets = 0;

  int num_states() const { return static_cast<int>(edges.size()); }
  Letter num_letters() const { return Letter{1} << atoms.size(); }
};

struct RabinPair {
  std::vector<bool> avoid;  ///< E: to be visited finitely often
  std::vector<bool> visit;  ///< F: to be visited infinitely often
};

/// Total deterministic Rabin automaton over 2^atoms.
class Dra {
 public:
  Dra() = default;
  Dra(std::vector<std::string> atoms, std::vector<std::vector<int>> delta, int initial,
      std::vector<RabinPair> pairs, Formula source);

  const std::vector<std::string>& atoms() const { return atoms_; }
  int num_states() const { return static_cast<int>(delta_.size()); }
  Letter num_letters() const { return Letter{1} << atoms_.size(); }
  int initial() const { return initial_; }
  int step(int q, Letter a) const { return delta_[q][a]; }
  const std::vector<int>& row(int q) const { return delta_[q]; }
  const std::vector<RabinPair>& pairs() const { return pairs_; }
  const Formula& source() const { return source_; }

  /// Restriction of a valuation to this automaton's atoms.
  Letter letter_of(const Valuation& valuation) const;

  /// Throws std::logic_error if delta is not total or a pair has the wrong
  /// size.
  void validate() const;

 private:
  std::vector<std::string> atoms_;
  std::vector<std::vector<int>> delta_;
  int initial_ = 0;
  std::vector<RabinPair> pairs_;
  Formula source_ = Formula::tt();
};

struct TranslationOptions {
  std::size_t max_states = 50000;  ///< Safra macro-state cap
  bool minimize = true;            ///< acceptance-preserving bisimulation quotient
};

/// Tableau translation of a pure LTL formula (any shape; negation normal form
/// is computed internally) over the given atoms, which must include those of
/// `f`.
GeneralizedBuchi ltl_to_nba(const Formula& f, const std::vector<std::string>& atoms);

/// Degeneralization followed by Safra's construction. Throws BudgetExceeded
/// when the macro-state cap is hit.
Dra determinize(const GeneralizedBuchi& nba, const TranslationOptions& options = {},
                const Formula& source = Formula::tt());

/// Full pipeline over the atoms of `f`.
Dra ltl_to_dra(const Formula& f, const TranslationOptions& options = {});

/// Language-preserving quotient: merges states with equal pair membership and
/// equivalent successors, then drops redundant pairs.
Dra minimize(const Dra& dra);

bool dra_accepts_lasso(const Dra& dra, const LassoWord& w);

/// Accepting check of a set of states visited infinitely often.
bool rabin_accepts(const Dra& dra, const std::vector<bool>& infinitely_often);

std::string to_dot(const Dra& dra);

}  // namespace freqmc
