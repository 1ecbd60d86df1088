#include "freqmc/formula.hpp"

#include <unordered_map>

namespace freqmc {

namespace {

class LassoEvaluator {
 public:
  explicit LassoEvaluator(const LassoWord& w)
      : word_(w), stem_(w.stem.size()), length_(w.stem.size() + w.loop.size()) {
    if (w.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  }

  const std::vector<bool>& eval(const Formula& f) {
    if (auto it = memo_.find(f.identity()); it != memo_.end()) return it->second;
    std::vector<bool> v(length_, false);
    switch (f.op()) {
      case Op::True: v.assign(length_, true); break;
      case Op::False: break;
      case Op::Atom:
        for (std::size_t i = 0; i < length_; ++i) v[i] = letter(i).count(f.name()) > 0;
        break;
      case Op::Not: {
        const auto& a = eval(f.child(0));
        for (std::size_t i = 0; i < length_; ++i) v[i] = !a[i];
        break;
      }
      case Op::Or:
      case Op::And: {
        const auto a = eval(f.lhs());
        const auto& b = eval(f.rhs());
        for (std::size_t i = 0; i < length_; ++i)
          v[i] = f.op() == Op::Or ? (a[i] || b[i]) : (a[i] && b[i]);
        break;
      }
      case Op::Next: {
        const auto& a = eval(f.child(0));
        for (std::size_t i = 0; i < length_; ++i) v[i] = a[succ(i)];
        break;
      }
      case Op::Until: {
        const auto a = eval(f.lhs());
        const auto& b = eval(f.rhs());
        // Least fixpoint of u = b | (a & X u); backward sweeps converge
        // because the loop-back edge is the only cycle.
        v = b;
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t k = length_; k-- > 0;) {
            bool nv = b[k] || (a[k] && v[succ(k)]);
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      case Op::FreqGlobally: {
        const auto& a = eval(f.child(0));
        long hits = 0;
        for (std::size_t k = stem_; k < length_; ++k) hits += a[k] ? 1 : 0;
        const long loop = static_cast<long>(length_ - stem_);
        // hits/loop >= p, compared exactly
        bool holds = Rational(hits, loop) >= f.bound();
        v.assign(length_, holds);
        break;
      }
    }
    return memo_.emplace(f.identity(), std::move(v)).first->second;
  }

 private:
  const Valuation& letter(std::size_t i) const {
    return i < stem_ ? word_.stem[i] : word_.loop[i - stem_];
  }
  std::size_t succ(std::size_t i) const { return i + 1 < length_ ? i + 1 : stem_; }

  const LassoWord& word_;
  std::size_t stem_;
  std::size_t length_;
  std::unordered_map<const void*, std::vector<bool>> memo_;
};

}  // namespace

std::vector<bool> eval_lasso_positions(const Formula& f, const LassoWord& w) {
  LassoEvaluator ev(w);
  return ev.eval(f);
}

bool eval_lasso(const Formula& f, const LassoWord& w) { return eval_lasso_positions(f, w)[0]; }

}  // namespace freqmc
