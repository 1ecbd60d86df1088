#pragma once

#include "freqmc/automata.hpp"
#include "freqmc/model.hpp"
#include "freqmc/numerics.hpp"

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

namespace freqmc {

/// Bitmask over the frequency subformulas: bit i set means the i-th one is
/// assumed to hold.
using Commitment = std::uint32_t;

/// Automata for xi^I over xi in {psi, phi_1..phi_n} and all commitments I,
/// deduplicated by formula. States of all automata share one global
/// numbering.
class RabinFamily {
 public:
  RabinFamily() = default;
  RabinFamily(const Formula& psi, const TranslationOptions& options = {});

  const Formula& formula() const { return psi_; }
  const std::vector<Formula>& bodies() const { return bodies_; }
  int num_frequency() const { return static_cast<int>(bodies_.size()); }
  Commitment num_commitments() const { return Commitment{1} << bodies_.size(); }

  int num_automata() const { return static_cast<int>(automata_.size()); }
  const Dra& automaton(int k) const { return automata_[k]; }
  const Formula& automaton_formula(int k) const { return formulas_[k]; }
  int main_automaton(Commitment I) const { return main_[I]; }
  int body_automaton(int i, Commitment I) const { return body_[i][I]; }

  int global_state(int k, int q) const { return offset_[k] + q; }
  int automaton_of(int g) const { return owner_[g]; }
  int local_state(int g) const { return g - offset_[owner_[g]]; }
  int num_global_states() const { return static_cast<int>(owner_.size()); }

 private:
  int intern(const Formula& f, const TranslationOptions& options);

  Formula psi_ = Formula::tt();
  std::vector<Formula> bodies_;
  std::vector<Dra> automata_;
  std::vector<Formula> formulas_;
  std::vector<int> main_;
  std::vector<std::vector<int>> body_;
  std::vector<int> offset_;
  std::vector<int> owner_;
};

/// Collection element: a global automaton state with its annotation.
struct Element {
  static constexpr int kStar = -1;    ///< new instance, not yet committed
  static constexpr int kBottom = -2;  ///< committed pair violated

  int q = 0;
  int tag = kStar;  ///< kStar, kBottom, or 2 * pair + (1 if recently fulfilled)

  static Element committed(int q, int pair, bool fulfilled) { return {q, 2 * pair + (fulfilled ? 1 : 0)}; }
  bool star() const { return tag == kStar; }
  bool bottom() const { return tag == kBottom; }
  int pair() const { return tag / 2; }
  bool recently_fulfilled() const { return tag >= 0 && (tag & 1); }

  friend auto operator<=>(const Element&, const Element&) = default;
};

/// Sorted, duplicate-free.
using Collection = std::vector<Element>;

void normalize(Collection& c);

/// Nonempty and every element is committed and recently fulfilled.
bool is_fulfilled(const Collection& c);
bool is_violated(const Collection& c);

/// Deterministic evolution of the collection chosen by an action after
/// reading `label`. `source_fulfilled` tells whether the state the action was
/// taken in is fulfilled; committed elements that see neither E nor F then
/// reset to "must visit F".
Collection evolve(const RabinFamily& family, const Collection& chosen, const Valuation& label,
                  bool source_fulfilled);

struct LegalAction {
  int choice = 0;            ///< model choice index
  Collection collection;     ///< C_a
  bool accumulating = false; ///< contains every seed
};

/// Legal actions in (s, C_s): every pending element either stays pending or
/// commits to one acceptance pair of its automaton, committed elements are
/// kept, and either no seed or all `seeds` are added. Distinct up to
/// (choice, C_a).
std::vector<LegalAction> legal_actions(const RabinFamily& family, const Model& model, int s,
                                       const Collection& current, const Collection& seeds);

/// Reachable part of the collection product for one commitment.
struct ProductFragment {
  struct Action {
    int choice = 0;
    bool accumulating = false;
    int next_collection = 0;
    std::vector<int> successors;  ///< aligned with the model distribution
  };

  /// Collection id 0 stands for every violated collection.
  static constexpr int kDead = 0;

  std::vector<Collection> collections;
  std::vector<std::pair<int, int>> states;  ///< (model state, collection id)
  std::vector<std::vector<Action>> actions;
  std::vector<bool> fulfilled;

  int num_states() const { return static_cast<int>(states.size()); }
  /// -1 if absent.
  int find(int s, int collection) const;
  ChoiceSupport support() const;

  std::unordered_map<std::uint64_t, int> index;
};

/// Breadth-first closure from the given seed states under all legal actions
/// (both addition modes). Actions with equal (choice, successor collection,
/// accumulating) are merged. Throws BudgetExceeded past `max_states`.
ProductFragment build_fragment(const RabinFamily& family, const Model& model,
                               const Collection& seeds,
                               const std::vector<std::pair<int, Collection>>& initial,
                               std::size_t max_states);

/// Seeds added by accumulating actions under commitment I.
Collection accumulating_seeds(const RabinFamily& family, Commitment I);

}  // namespace freqmc
