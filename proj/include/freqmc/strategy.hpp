#pragma once

#include "freqmc/mdp_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace freqmc {

/// Transition table of a main automaton, enough to track it along a run.
struct AutomatonTable {
  std::vector<std::string> atoms;
  std::vector<std::vector<int>> delta;
  int initial = 0;

  int step(int q, const Valuation& label) const;
};

/// Controller for one commitment after Upsilon has been reached. States are
/// collection-product states; a move is a model choice together with the
/// collection the successor will carry.
struct ContextStrategy {
  struct Move {
    int choice = 0;
    int next_collection = 0;
  };

  Commitment commitment = 0;
  int component = 0;  ///< main automaton in SynthesizedStrategy::automata
  std::vector<std::pair<int, int>> states;
  std::vector<std::vector<Move>> moves;
  std::vector<bool> fulfilled;
  std::vector<bool> in_m;
  std::vector<int> pi;       ///< accumulating move per M-state
  std::vector<int> zeta[2];  ///< restoring move per [fulfilled seen][state]
  std::map<std::pair<int, int>, int> upsilon;

  /// -1 if the pair is not a product state.
  int find(int s, int collection) const;
  void build_index();

 private:
  std::map<std::pair<int, int>, int> index_;
};

struct SynthesizedStrategy {
  std::vector<std::string> state_names;  ///< to reject a mismatched model
  std::vector<AutomatonTable> automata;
  /// Reaching stage: (model state, main automaton states...) -> choice.
  std::map<std::vector<int>, int> reach;
  std::vector<ContextStrategy> contexts;  ///< only those with nonempty Upsilon
  double probability = 0;
  std::string exact_probability;  ///< empty unless solved exactly
};

SynthesizedStrategy extract_strategy(const SynthesisResult& result, const Model& model);

void save_strategy(const SynthesizedStrategy& strategy, const std::filesystem::path& path);
/// Throws std::runtime_error on unreadable or malformed files.
SynthesizedStrategy load_strategy(const std::filesystem::path& path);

enum class Phase { Reach, Accumulate, Restore };
const char* to_string(Phase phase);

/// Stateful executor. Call choose() and then advance() with the sampled
/// successor, alternately.
class Executor {
 public:
  Executor(const SynthesizedStrategy& strategy, const Model& model);

  int state() const { return s_; }
  Phase phase() const { return phase_; }
  /// Index of the current or last accumulating phase; phase i lasts i steps.
  int accumulation() const { return round_; }

  int choose();
  void advance(int target);

 private:
  void enter_context();
  void maybe_start_accumulation();

  const SynthesizedStrategy* strategy_;
  const Model* model_;
  int s_ = 0;
  std::vector<int> q_;
  Phase phase_ = Phase::Reach;
  const ContextStrategy* context_ = nullptr;
  int x_ = -1;
  bool seen_fulfilled_ = false;
  int round_ = 0;
  int remaining_ = 0;
  int choice_ = -1;
  int move_ = -1;
};

struct TraceStep {
  int state = 0;
  int choice = 0;
  Phase phase = Phase::Reach;
  int accumulation = 0;
};

struct Trace {
  std::vector<TraceStep> steps;
  int final_state = 0;

  /// States visited, including the final one.
  std::vector<int> states() const;
};

Trace simulate(const Model& model, const SynthesizedStrategy& strategy, std::uint64_t horizon,
               std::uint64_t seed);

/// How monitors decide. Chain: the product state lies in a bottom SCC of
/// model x automaton, scored by its acceptance. Game: no run from the
/// product state can be accepting, or every run is.
enum class MonitorMode { Chain, Game };

class MonitorVerdicts {
 public:
  MonitorVerdicts(const Model& model, const Dra& dra, MonitorMode mode);
  /// 1 satisfied, 0 violated, -1 undecided; q is the automaton state before
  /// reading the label of s.
  int verdict(int s, int q) const { return verdict_[static_cast<std::size_t>(s) * dra_states_ + q]; }

 private:
  int dra_states_ = 0;
  std::vector<int> verdict_;
};

struct FrequencyEstimate {
  double estimate = 0;
  std::uint64_t positions = 0;
  std::uint64_t resolved = 0;
  std::uint64_t satisfied = 0;
  std::uint64_t unresolved = 0;
  bool inconclusive = false;  ///< fewer than half of the monitors resolved
};

/// One monitor per position of `states`; unresolved monitors are left out of
/// the estimate.
FrequencyEstimate empirical_frequency(const Model& model, const std::vector<int>& states,
                                      const Dra& dra, MonitorMode mode);

}  // namespace freqmc
