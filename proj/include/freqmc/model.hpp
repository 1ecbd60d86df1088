#pragma once

#include "freqmc/formula.hpp"
#include "freqmc/graph.hpp"
#include "freqmc/rational.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace freqmc {

struct Transition {
  int target = 0;
  Rational probability;
};

struct Choice {
  std::string action;
  std::vector<Transition> distribution;  ///< sorted by target, no duplicates
};

class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& what, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

/// Explicit-state MDP with exact probabilities. A model in which every state
/// has exactly one choice is a Markov chain.
class Model {
 public:
  Model() = default;

  /// Validates: every state has a choice, every distribution sums to 1 with
  /// nonnegative entries and in-range targets, action names are unique per
  /// state and state names are unique. Throws ModelError.
  Model(std::vector<std::string> names, std::vector<Valuation> labels,
        std::vector<std::vector<Choice>> choices, int initial);

  int num_states() const { return static_cast<int>(names_.size()); }
  int initial() const { return initial_; }
  const std::string& name(int s) const { return names_[s]; }
  /// -1 if absent.
  int find(std::string_view name) const;
  const Valuation& label(int s) const { return labels_[s]; }
  const std::vector<Valuation>& labels() const { return labels_; }
  const std::vector<Choice>& choices(int s) const { return choices_[s]; }
  int num_choices(int s) const { return static_cast<int>(choices_[s].size()); }
  /// Index of `action` at s, -1 if not enabled.
  int find_choice(int s, std::string_view action) const;

  bool is_markov_chain() const;
  std::set<std::string> atoms() const;

  /// Support graph over all choices.
  graph::Adjacency successor_graph() const;

  /// Same structure, new valuation.
  Model relabeled(std::vector<Valuation> labels) const;

 private:
  std::vector<std::string> names_;
  std::vector<Valuation> labels_;
  std::vector<std::vector<Choice>> choices_;
  int initial_ = 0;
};

/// Line format:
///   state <name> [label ...]
///   init <name>
///   trans <state> <action> <target>:<prob> [<target>:<prob> ...]
/// `#` starts a comment. Markov chains use the action name `-`.
Model parse_model(std::string_view text);
Model load_model(const std::string& path);
std::string serialize(const Model& model);

struct BsccPartition {
  std::vector<std::vector<int>> bsccs;  ///< sorted member lists
  std::vector<int> transient;
  std::vector<int> bscc_of;  ///< -1 for transient states
};

/// Bottom SCCs of the support graph. Meant for Markov chains; on an MDP the
/// result refers to the graph over all choices.
BsccPartition bsccs(const Model& model);

/// Per-state valuation projected onto `atoms`.
std::vector<Valuation> restrict_valuation(const Model& model, const std::set<std::string>& atoms);

}  // namespace freqmc
