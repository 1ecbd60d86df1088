#include "freqmc/strategy.hpp"

#include <random>
#include <stdexcept>

namespace freqmc {

int AutomatonTable::step(int q, const Valuation& label) const {
  Letter a = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (label.count(atoms[i])) a |= Letter{1} << i;
  return delta[q][a];
}

int ContextStrategy::find(int s, int collection) const {
  auto it = index_.find({s, collection});
  return it == index_.end() ? -1 : it->second;
}

void ContextStrategy::build_index() {
  index_.clear();
  for (std::size_t x = 0; x < states.size(); ++x) index_.emplace(states[x], static_cast<int>(x));
}

SynthesizedStrategy extract_strategy(const SynthesisResult& result, const Model& model) {
  SynthesizedStrategy out;
  for (int s = 0; s < model.num_states(); ++s) out.state_names.push_back(model.name(s));
  for (int k : result.naive.automata) {
    const Dra& dra = result.family.automaton(k);
    AutomatonTable table{dra.atoms(), {}, dra.initial()};
    for (int q = 0; q < dra.num_states(); ++q) table.delta.push_back(dra.row(q));
    out.automata.push_back(std::move(table));
  }
  const NaiveProduct& naive = result.naive;
  for (std::size_t x = 0; x < naive.states.size(); ++x)
    if (!naive.target[x] && result.reach.choice[x] >= 0)
      out.reach.emplace(naive.states[x], result.reach.choice[x]);

  for (const ContextResult& ctx : result.contexts) {
    if (ctx.upsilon.empty()) continue;
    ContextStrategy c;
    c.commitment = ctx.commitment;
    c.component = naive.component[ctx.commitment];
    const ProductFragment& f = ctx.fragment;
    c.states = f.states;
    for (const auto& acts : f.actions) {
      auto& moves = c.moves.emplace_back();
      for (const auto& a : acts) moves.push_back({a.choice, a.next_collection});
    }
    c.fulfilled = f.fulfilled;
    c.in_m = ctx.mn.in_m;
    c.pi = ctx.mn.pi;
    c.zeta[0] = ctx.mn.zeta.choice[0];
    c.zeta[1] = ctx.mn.zeta.choice[1];
    c.upsilon = ctx.upsilon;
    c.build_index();
    out.contexts.push_back(std::move(c));
  }
  out.probability = result.probability;
  if (result.exact_probability) out.exact_probability = to_string(*result.exact_probability);
  return out;
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Reach: return "reach";
    case Phase::Accumulate: return "accumulate";
    case Phase::Restore: return "restore";
  }
  return "?";
}

Executor::Executor(const SynthesizedStrategy& strategy, const Model& model)
    : strategy_(&strategy), model_(&model), s_(model.initial()) {
  bool same = static_cast<int>(strategy.state_names.size()) == model.num_states();
  for (int s = 0; same && s < model.num_states(); ++s) same = strategy.state_names[s] == model.name(s);
  if (!same) throw std::invalid_argument("strategy was synthesized for a different model");
  for (const auto& a : strategy.automata) q_.push_back(a.initial);
  enter_context();
}

void Executor::enter_context() {
  for (const auto& c : strategy_->contexts) {
    auto it = c.upsilon.find({s_, q_[c.component]});
    if (it == c.upsilon.end()) continue;
    context_ = &c;
    x_ = it->second;
    phase_ = Phase::Restore;
    seen_fulfilled_ = c.fulfilled[x_];
    maybe_start_accumulation();
    return;
  }
}

void Executor::maybe_start_accumulation() {
  if (phase_ != Phase::Restore || !seen_fulfilled_ || !context_->in_m[x_]) return;
  phase_ = Phase::Accumulate;
  remaining_ = ++round_;
}

int Executor::choose() {
  if (phase_ == Phase::Reach) {
    std::vector<int> key{s_};
    key.insert(key.end(), q_.begin(), q_.end());
    auto it = strategy_->reach.find(key);
    choice_ = it == strategy_->reach.end() ? 0 : it->second;
    move_ = -1;
  } else {
    move_ = phase_ == Phase::Accumulate ? context_->pi[x_] : context_->zeta[seen_fulfilled_][x_];
    if (move_ < 0 || move_ >= static_cast<int>(context_->moves[x_].size()))
      throw std::logic_error("strategy has no move in product state " + std::to_string(x_));
    choice_ = context_->moves[x_][move_].choice;
  }
  if (choice_ < 0 || choice_ >= model_->num_choices(s_))
    throw std::logic_error("strategy chose an unavailable action in state " + model_->name(s_));
  return choice_;
}

void Executor::advance(int target) {
  if (choice_ < 0) throw std::logic_error("advance() without choose()");
  if (phase_ == Phase::Reach) {
    for (std::size_t c = 0; c < q_.size(); ++c) q_[c] = strategy_->automata[c].step(q_[c], model_->label(s_));
    s_ = target;
    choice_ = -1;
    enter_context();
    return;
  }
  const int y = context_->find(target, context_->moves[x_][move_].next_collection);
  if (y < 0) throw std::logic_error("successor outside the strategy's product");
  x_ = y;
  s_ = target;
  choice_ = -1;
  if (phase_ == Phase::Accumulate) {
    if (--remaining_ > 0) return;
    phase_ = Phase::Restore;
    seen_fulfilled_ = context_->fulfilled[x_];
  } else {
    seen_fulfilled_ = seen_fulfilled_ || context_->fulfilled[x_];
  }
  maybe_start_accumulation();
}

std::vector<int> Trace::states() const {
  std::vector<int> out;
  out.reserve(steps.size() + 1);
  for (const auto& step : steps) out.push_back(step.state);
  out.push_back(final_state);
  return out;
}

Trace simulate(const Model& model, const SynthesizedStrategy& strategy, std::uint64_t horizon,
               std::uint64_t seed) {
  Executor ex(strategy, model);
  std::mt19937_64 rng(seed);
  Trace trace;
  trace.steps.reserve(horizon);
  for (std::uint64_t k = 0; k < horizon; ++k) {
    const Phase phase = ex.phase();
    const int round = ex.accumulation();
    const int c = ex.choose();
    trace.steps.push_back({ex.state(), c, phase, round});
    // 53 random bits, independent of the library's distribution code.
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto& dist = model.choices(ex.state())[c].distribution;
    int target = dist.back().target;
    for (const auto& t : dist) {
      u -= t.probability.get_d();
      if (u < 0) {
        target = t.target;
        break;
      }
    }
    ex.advance(target);
  }
  trace.final_state = ex.state();
  return trace;
}

}  // namespace freqmc
