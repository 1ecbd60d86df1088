// Tableau translation from LTL to transition-based generalized Buchi
// automata. Obligation sets are expanded into covers; an edge belongs to
// acceptance set k unless it postpones the k-th until subformula.

#include "freqmc/automata.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>

namespace freqmc {

namespace {

enum class Kind : std::uint8_t { True, False, Pos, Neg, And, Or, Next, Until, Release };

struct Node {
  Kind kind;
  int atom = -1;
  int a = -1;
  int b = -1;
};

class NodeStore {
 public:
  static constexpr int kTrue = 0;
  static constexpr int kFalse = 1;

  NodeStore() {
    intern({Kind::True});
    intern({Kind::False});
  }

  const Node& operator[](int id) const { return nodes_[id]; }

  int literal(int atom, bool positive) { return intern({positive ? Kind::Pos : Kind::Neg, atom}); }

  int conj(int a, int b) {
    if (a == kFalse || b == kFalse) return kFalse;
    if (a == kTrue) return b;
    if (b == kTrue || a == b) return a;
    if (a > b) std::swap(a, b);
    return intern({Kind::And, -1, a, b});
  }

  int disj(int a, int b) {
    if (a == kTrue || b == kTrue) return kTrue;
    if (a == kFalse) return b;
    if (b == kFalse || a == b) return a;
    if (a > b) std::swap(a, b);
    return intern({Kind::Or, -1, a, b});
  }

  int next(int a) {
    if (a == kTrue || a == kFalse) return a;
    return intern({Kind::Next, -1, a});
  }

  int until(int a, int b) {
    if (b == kTrue || b == kFalse || a == kFalse || a == b) return b;
    return intern({Kind::Until, -1, a, b});
  }

  int release(int a, int b) {
    if (b == kTrue || b == kFalse || a == kTrue || a == b) return b;
    return intern({Kind::Release, -1, a, b});
  }

 private:
  int intern(Node n) {
    auto key = std::make_tuple(static_cast<int>(n.kind), n.atom, n.a, n.b);
    auto [it, inserted] = index_.emplace(key, static_cast<int>(nodes_.size()));
    if (inserted) nodes_.push_back(n);
    return it->second;
  }

  std::vector<Node> nodes_;
  std::map<std::tuple<int, int, int, int>, int> index_;
};

class Tableau {
 public:
  Tableau(const std::vector<std::string>& atoms) : atoms_(atoms) {}

  int nnf(const Formula& f, bool negate) {
    switch (f.op()) {
      case Op::True: return negate ? NodeStore::kFalse : NodeStore::kTrue;
      case Op::False: return negate ? NodeStore::kTrue : NodeStore::kFalse;
      case Op::Atom: {
        auto it = std::find(atoms_.begin(), atoms_.end(), f.name());
        if (it == atoms_.end())
          throw std::invalid_argument("atom '" + f.name() + "' missing from the alphabet");
        return store_.literal(static_cast<int>(it - atoms_.begin()), !negate);
      }
      case Op::Not: return nnf(f.child(0), !negate);
      case Op::Or:
        return negate ? store_.conj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                      : store_.disj(nnf(f.lhs(), false), nnf(f.rhs(), false));
      case Op::And:
        return negate ? store_.disj(nnf(f.lhs(), true), nnf(f.rhs(), true))
                      : store_.conj(nnf(f.lhs(), false), nnf(f.rhs(), false));
      case Op::Next: return store_.next(nnf(f.child(0), negate));
      case Op::Until:
        return negate ? store_.release(nnf(f.lhs(), true), nnf(f.rhs(), true))
                      : store_.until(nnf(f.lhs(), false), nnf(f.rhs(), false));
      case Op::FreqGlobally:
        throw std::invalid_argument("frequency operators have no automaton translation");
    }
    return NodeStore::kFalse;
  }

  GeneralizedBuchi build(const Formula& f) {
    const int root = nnf(f, false);
    index_untils(root);

    GeneralizedBuchi out;
    out.atoms = atoms_;
    out.num_acceptance_sets = static_cast<int>(until_index_.size());
    if (root == NodeStore::kFalse) return out;

    std::vector<int> init;
    if (root != NodeStore::kTrue) init.push_back(root);
    std::map<std::vector<int>, int> ids;
    std::vector<std::vector<int>> states;
    std::queue<int> work;
    auto lookup = [&](const std::vector<int>& s) {
      auto [it, inserted] = ids.emplace(s, static_cast<int>(states.size()));
      if (inserted) {
        states.push_back(s);
        out.edges.emplace_back();
        work.push(it->second);
      }
      return it->second;
    };
    out.initial.push_back(lookup(init));

    const std::uint64_t all_sets =
        out.num_acceptance_sets == 64 ? ~0ULL : ((1ULL << out.num_acceptance_sets) - 1);
    while (!work.empty()) {
      const int id = work.front();
      work.pop();
      std::vector<Cover> covers;
      expand(states[id], {}, Cover{}, covers);
      prune_subsumed(covers);
      for (const auto& c : covers) {
        const int target = lookup(c.next);
        out.edges[id].push_back({c.positive, c.negative, target, all_sets & ~c.postponed});
      }
    }
    return out;
  }

 private:
  struct Cover {
    Letter positive = 0;
    Letter negative = 0;
    std::vector<int> next;  // sorted, unique
    std::uint64_t postponed = 0;
  };

  void index_untils(int id) {
    const Node& n = store_[id];
    if (n.kind == Kind::Until && !until_index_.count(id)) {
      if (until_index_.size() == 64) throw std::invalid_argument("formula has too many until operators");
      until_index_.emplace(id, static_cast<int>(until_index_.size()));
    }
    if (n.a >= 0) index_untils(n.a);
    if (n.b >= 0) index_untils(n.b);
  }

  static void add_next(Cover& c, int id) {
    if (id == NodeStore::kTrue) return;
    auto it = std::lower_bound(c.next.begin(), c.next.end(), id);
    if (it == c.next.end() || *it != id) c.next.insert(it, id);
  }

  void expand(std::vector<int> todo, std::vector<int> done, Cover cur, std::vector<Cover>& out) {
    while (!todo.empty()) {
      const int id = todo.back();
      todo.pop_back();
      if (std::find(done.begin(), done.end(), id) != done.end()) continue;
      done.push_back(id);
      const Node n = store_[id];
      switch (n.kind) {
        case Kind::True: break;
        case Kind::False: return;
        case Kind::Pos:
        case Kind::Neg: {
          const Letter bit = Letter{1} << n.atom;
          (n.kind == Kind::Pos ? cur.positive : cur.negative) |= bit;
          if (cur.positive & cur.negative) return;
          break;
        }
        case Kind::And:
          todo.push_back(n.a);
          todo.push_back(n.b);
          break;
        case Kind::Or: {
          auto left = todo;
          left.push_back(n.a);
          expand(std::move(left), done, cur, out);
          todo.push_back(n.b);
          break;
        }
        case Kind::Next: add_next(cur, n.a); break;
        case Kind::Until: {
          auto now = todo;
          now.push_back(n.b);
          expand(std::move(now), done, cur, out);
          todo.push_back(n.a);
          add_next(cur, id);
          cur.postponed |= 1ULL << until_index_.at(id);
          break;
        }
        case Kind::Release: {
          auto now = todo;
          now.push_back(n.a);
          now.push_back(n.b);
          expand(std::move(now), done, cur, out);
          todo.push_back(n.b);
          add_next(cur, id);
          break;
        }
      }
    }
    out.push_back(std::move(cur));
  }

  // Drops covers that demand at least as much as another cover and are
  // accepting in fewer sets.
  static void prune_subsumed(std::vector<Cover>& covers) {
    auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
      return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    auto weaker = [&](const Cover& a, const Cover& b) {  // a makes b redundant
      return (a.positive & ~b.positive) == 0 && (a.negative & ~b.negative) == 0 &&
             (a.postponed & ~b.postponed) == 0 && subset(a.next, b.next);
    };
    std::vector<Cover> kept;
    for (std::size_t i = 0; i < covers.size(); ++i) {
      bool redundant = false;
      for (std::size_t j = 0; j < covers.size() && !redundant; ++j) {
        if (i == j || !weaker(covers[j], covers[i])) continue;
        // Identical covers: keep the first occurrence only.
        redundant = !weaker(covers[i], covers[j]) || j < i;
      }
      if (!redundant) kept.push_back(covers[i]);
    }
    covers = std::move(kept);
  }

  std::vector<std::string> atoms_;
  NodeStore store_;
  std::map<int, int> until_index_;
};

}  // namespace

GeneralizedBuchi ltl_to_nba(const Formula& f, const std::vector<std::string>& atoms) {
  if (atoms.size() > 20) throw std::invalid_argument("too many atomic propositions");
  Tableau t(atoms);
  return t.build(f);
}

}  // namespace freqmc
