#include "freqmc/formula.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace freqmc {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Formula Formula::make(Op op, std::string name, Rational bound, std::vector<Formula> children) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->name = std::move(name);
  node->bound = std::move(bound);
  node->children = std::move(children);
  std::size_t h = std::hash<int>{}(static_cast<int>(op));
  if (op == Op::Atom) h = mix(h, std::hash<std::string>{}(node->name));
  if (op == Op::FreqGlobally) h = mix(h, std::hash<std::string>{}(to_string(node->bound)));
  for (const auto& c : node->children) {
    node->size += c.size();
    h = mix(h, c.hash());
  }
  node->hash = h;
  return Formula(std::move(node));
}

Formula Formula::tt() {
  static const Formula f = make(Op::True, {}, 0, {});
  return f;
}

Formula Formula::ff() {
  static const Formula f = make(Op::False, {}, 0, {});
  return f;
}

Formula Formula::atom(std::string name) { return make(Op::Atom, std::move(name), 0, {}); }
Formula Formula::negation(Formula f) { return make(Op::Not, {}, 0, {std::move(f)}); }
Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return make(Op::Or, {}, 0, {std::move(lhs), std::move(rhs)});
}
Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make(Op::And, {}, 0, {std::move(lhs), std::move(rhs)});
}
Formula Formula::next(Formula f) { return make(Op::Next, {}, 0, {std::move(f)}); }
Formula Formula::until(Formula lhs, Formula rhs) {
  return make(Op::Until, {}, 0, {std::move(lhs), std::move(rhs)});
}

Formula Formula::freq_globally(Rational bound, Formula body) {
  if (bound < 0 || bound > 1)
    throw std::invalid_argument("frequency bound " + to_string(bound) + " outside [0,1]");
  return make(Op::FreqGlobally, {}, std::move(bound), {std::move(body)});
}

Formula Formula::eventually(Formula f) { return until(tt(), std::move(f)); }
Formula Formula::globally(Formula f) { return negation(eventually(negation(std::move(f)))); }
Formula Formula::implies(Formula lhs, Formula rhs) {
  return disjunction(negation(std::move(lhs)), std::move(rhs));
}

int compare(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return 0;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  if (a.hash() != b.hash()) {
    // Cheap discrimination first; order stays total and consistent because
    // equal trees always hash equally.
    return a.hash() < b.hash() ? -1 : 1;
  }
  if (a.op() == Op::Atom) {
    int c = a.name().compare(b.name());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a.op() == Op::FreqGlobally) {
    int c = cmp(a.bound(), b.bound());
    if (c != 0) return c < 0 ? -1 : 1;
  }
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (int c = compare(a.child(i), b.child(i)); c != 0) return c;
  return 0;
}

FormulaSyntaxError::FormulaSyntaxError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::string to_string(const Formula& f) {
  switch (f.op()) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return f.name();
    case Op::Not: return "!" + to_string(f.child(0));
    case Op::Next: return "X " + to_string(f.child(0));
    case Op::FreqGlobally: return "G{" + to_string(f.bound()) + "} " + to_string(f.child(0));
    case Op::Or: return "(" + to_string(f.lhs()) + " | " + to_string(f.rhs()) + ")";
    case Op::And: return "(" + to_string(f.lhs()) + " & " + to_string(f.rhs()) + ")";
    case Op::Until: return "(" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + ")";
  }
  return {};
}

namespace {

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::Atom) out.insert(f.name());
  for (std::size_t i = 0; i < f.arity(); ++i) collect_atoms(f.child(i), out);
}

bool any_node(const Formula& f, const std::function<bool(const Formula&)>& pred) {
  if (pred(f)) return true;
  for (std::size_t i = 0; i < f.arity(); ++i)
    if (any_node(f.child(i), pred)) return true;
  return false;
}

}  // namespace

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

bool is_ltl(const Formula& f) {
  return !any_node(f, [](const Formula& g) { return g.op() == Op::FreqGlobally; });
}

bool is_one_fltl(const Formula& f) {
  return !any_node(f, [](const Formula& g) {
    if (g.op() == Op::Not) return g.child(0).op() != Op::Atom;
    if (g.op() == Op::FreqGlobally) return g.bound() != 1;
    return false;
  });
}

bool has_unnegated_unit_frequencies(const Formula& f) {
  return !any_node(f, [](const Formula& g) {
    if (g.op() == Op::Not) return !is_ltl(g.child(0));
    if (g.op() == Op::FreqGlobally) return g.bound() != 1;
    return false;
  });
}

std::vector<Formula> collect_frequency_subformulas(const Formula& f) {
  std::vector<Formula> out;
  std::function<void(const Formula&)> visit = [&](const Formula& g) {
    if (g.op() == Op::FreqGlobally &&
        std::find(out.begin(), out.end(), g.child(0)) == out.end())
      out.push_back(g.child(0));
    for (std::size_t i = 0; i < g.arity(); ++i) visit(g.child(i));
  };
  visit(f);
  return out;
}

std::optional<Formula> innermost_frequency_node(const Formula& f) {
  for (std::size_t i = 0; i < f.arity(); ++i)
    if (auto found = innermost_frequency_node(f.child(i))) return found;
  if (f.op() == Op::FreqGlobally) return f;
  return std::nullopt;
}

namespace {

Formula rebuild(const Formula& f, std::vector<Formula> children) {
  switch (f.op()) {
    case Op::Not: return Formula::negation(std::move(children[0]));
    case Op::Next: return Formula::next(std::move(children[0]));
    case Op::FreqGlobally: return Formula::freq_globally(f.bound(), std::move(children[0]));
    case Op::Or: return Formula::disjunction(std::move(children[0]), std::move(children[1]));
    case Op::And: return Formula::conjunction(std::move(children[0]), std::move(children[1]));
    case Op::Until: return Formula::until(std::move(children[0]), std::move(children[1]));
    default: return f;
  }
}

template <class Fn>
Formula map_nodes(const Formula& f, const Fn& fn) {
  if (auto replaced = fn(f)) return *replaced;
  if (f.arity() == 0) return f;
  std::vector<Formula> children;
  bool changed = false;
  for (std::size_t i = 0; i < f.arity(); ++i) {
    children.push_back(map_nodes(f.child(i), fn));
    changed |= children.back().identity() != f.child(i).identity();
  }
  return changed ? rebuild(f, std::move(children)) : f;
}

}  // namespace

Formula substitute_commitment(const Formula& xi, std::span<const Formula> bodies,
                              std::uint32_t commitment) {
  return map_nodes(xi, [&](const Formula& g) -> std::optional<Formula> {
    if (g.op() != Op::FreqGlobally) return std::nullopt;
    auto it = std::find(bodies.begin(), bodies.end(), g.child(0));
    bool committed = it != bodies.end() && ((commitment >> (it - bodies.begin())) & 1U);
    return committed ? Formula::tt() : Formula::ff();
  });
}

Formula replace_subformula(const Formula& f, const Formula& target, const Formula& replacement) {
  return map_nodes(f, [&](const Formula& g) -> std::optional<Formula> {
    if (g.size() == target.size() && g == target) return replacement;
    return std::nullopt;
  });
}

Formula replace_freq_with_reach(const Formula& f, const Formula& target, const std::string& alpha) {
  if (target.op() != Op::FreqGlobally || !is_ltl(target.child(0)))
    throw std::invalid_argument("replacement target must be G^p of a pure LTL formula");
  if (atoms_of(f).count(alpha))
    throw std::invalid_argument("fresh atom '" + alpha + "' already occurs in the formula");
  return replace_subformula(f, target, Formula::eventually(Formula::atom(alpha)));
}

}  // namespace freqmc
