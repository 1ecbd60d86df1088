#pragma once

#include "freqmc/rational.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace freqmc {

enum class Op : std::uint8_t { True, False, Atom, Not, Or, And, Next, Until, FreqGlobally };

/// Immutable fLTL syntax tree. Copies share structure; equality and ordering
/// are structural.
///
/// Only the core constructors are represented. `F`, `G` and `->` are
/// desugared by the factory helpers below:
///   F x  = true U x
///   G x  = !(true U !x)
///   a->b = !a | b
class Formula {
 public:
  static Formula tt();
  static Formula ff();
  static Formula atom(std::string name);
  static Formula negation(Formula f);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula next(Formula f);
  static Formula until(Formula lhs, Formula rhs);
  /// Throws std::invalid_argument when `bound` lies outside [0,1].
  static Formula freq_globally(Rational bound, Formula body);

  static Formula eventually(Formula f);
  static Formula globally(Formula f);
  static Formula implies(Formula lhs, Formula rhs);

  Op op() const { return node_->op; }
  const std::string& name() const { return node_->name; }
  const Rational& bound() const { return node_->bound; }
  std::size_t arity() const { return node_->children.size(); }
  const Formula& child(std::size_t i) const { return node_->children[i]; }
  const Formula& lhs() const { return node_->children[0]; }
  const Formula& rhs() const { return node_->children[1]; }

  /// Number of nodes.
  std::size_t size() const { return node_->size; }
  std::size_t hash() const { return node_->hash; }

  /// Three-way structural comparison.
  friend int compare(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }
  friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

  /// Node identity (for memoisation), not structural identity.
  const void* identity() const { return node_.get(); }

 private:
  struct Node {
    Op op;
    std::string name;
    Rational bound;
    std::vector<Formula> children;
    std::size_t size = 1;
    std::size_t hash = 0;
  };

  static Formula make(Op op, std::string name, Rational bound, std::vector<Formula> children);

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

class FormulaSyntaxError : public std::runtime_error {
 public:
  FormulaSyntaxError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses the concrete grammar:
///   atoms `[a-zA-Z_][a-zA-Z0-9_]*`, constants `true`/`false`,
///   unary `!`, `X`, `F`, `G`, `G{p}` (p decimal or num/den),
///   binary `U` (right assoc) > `&` > `|` > `->` (right assoc).
Formula parse_formula(std::string_view text);

/// Fully parenthesised text that parses back to a structurally equal tree.
std::string to_string(const Formula& f);

std::set<std::string> atoms_of(const Formula& f);

/// True iff no G^p node occurs.
bool is_ltl(const Formula& f);

/// Strict 1-fLTL: every negation applies to an atom and every bound is 1.
bool is_one_fltl(const Formula& f);

/// Every bound is 1 and no G^p lies below a negation. This is the admission
/// test used by synthesis: it accepts derived operators such as `G F m`
/// whose desugaring puts negations above pure-LTL parts only.
bool has_unnegated_unit_frequencies(const Formula& f);

/// Distinct bodies of the G^p subformulas, outermost-first and left to right.
std::vector<Formula> collect_frequency_subformulas(const Formula& f);

/// The leftmost G^p node whose body is pure LTL, if any.
std::optional<Formula> innermost_frequency_node(const Formula& f);

/// Replaces every G^p node that is not nested in another G^p node by `true`
/// when its body is bodies[i] with bit i of `commitment` set and by `false`
/// otherwise. Nested nodes vanish together with their enclosing node.
/// Bodies missing from `bodies` are treated as uncommitted.
Formula substitute_commitment(const Formula& xi, std::span<const Formula> bodies,
                              std::uint32_t commitment);

/// Replaces every occurrence of `target` by `replacement`.
Formula replace_subformula(const Formula& f, const Formula& target, const Formula& replacement);

/// Replaces every occurrence of the G^p node `target` by `F alpha`. Throws
/// std::invalid_argument if `alpha` already occurs in `f` or if `target` is
/// not a G^p node with a pure-LTL body.
Formula replace_freq_with_reach(const Formula& f, const Formula& target, const std::string& alpha);

// --- ultimately periodic words ------------------------------------------

using Valuation = std::set<std::string>;

/// stem . loop^omega
struct LassoWord {
  std::vector<Valuation> stem;
  std::vector<Valuation> loop;
};

/// Truth value of `f` at position 0 of the lasso. G^p holds iff the fraction
/// of loop positions whose suffix satisfies the body is at least p.
bool eval_lasso(const Formula& f, const LassoWord& w);

/// Truth value at every position 0..stem+loop-1.
std::vector<bool> eval_lasso_positions(const Formula& f, const LassoWord& w);

}  // namespace freqmc
