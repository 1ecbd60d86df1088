#include "doctest.h"

#include "freqmc/numerics.hpp"
#include "support/random_instances.hpp"

#include <cmath>

using namespace freqmc;

namespace {

const char* kMaintenance = R"(
state s0 w
state s1 q
state s2 r
state s3 m
state s4 q m
init s0
trans s0 w s1:1/2 s0:1/2
trans s0 m s3:1/2 s4:1/2
trans s1 - s2:1
trans s2 - s0:1
trans s3 - s0:1
trans s4 - s0:1
)";

std::vector<bool> only(int n, std::initializer_list<int> states) {
  std::vector<bool> v(n, false);
  for (int s : states) v[s] = true;
  return v;
}

// Power iteration on the chain restricted to `members` (lazy to avoid
// periodicity).
std::vector<double> power_iteration(const Model& mc, const std::vector<int>& members) {
  const std::size_t k = members.size();
  std::vector<double> pi(k, 1.0 / k);
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> next(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      next[i] += 0.5 * pi[i];
      for (const auto& t : mc.choices(members[i])[0].distribution) {
        const auto j = std::find(members.begin(), members.end(), t.target) - members.begin();
        next[j] += 0.5 * pi[i] * t.probability.get_d();
      }
    }
    double diff = 0;
    for (std::size_t i = 0; i < k; ++i) diff = std::max(diff, std::abs(next[i] - pi[i]));
    pi = std::move(next);
    if (diff < 1e-15) break;
  }
  return pi;
}

// Plain value iteration for reachability; max over choices.
std::vector<double> iterate_reach(const Model& m, const std::vector<bool>& target) {
  std::vector<double> v(m.num_states(), 0.0);
  for (int s = 0; s < m.num_states(); ++s) v[s] = target[s] ? 1.0 : 0.0;
  for (int it = 0; it < 100000; ++it) {
    double diff = 0;
    for (int s = 0; s < m.num_states(); ++s) {
      if (target[s]) continue;
      double best = 0;
      for (const auto& c : m.choices(s)) {
        double q = 0;
        for (const auto& t : c.distribution) q += t.probability.get_d() * v[t.target];
        best = std::max(best, q);
      }
      diff = std::max(diff, best - v[s]);
      v[s] = best;
    }
    if (diff < 1e-14) break;
  }
  return v;
}

}  // namespace

TEST_CASE("stationary distributions") {
  const Model single = parse_model("state s\ninit s\ntrans s - s:1\n");
  CHECK(stationary_distribution(single, {0}) == RationalVector{1});

  const Model two = parse_model("state s\nstate t\ninit s\ntrans s - t:1\ntrans t - s:1/2 t:1/2\n");
  const auto pi = stationary_distribution(two, {0, 1});
  CHECK(pi == RationalVector{Rational(1, 3), Rational(2, 3)});
  const auto approx = power_iteration(two, {0, 1});
  CHECK(std::abs(approx[0] - 1.0 / 3) < 1e-12);
  CHECK(std::abs(approx[1] - 2.0 / 3) < 1e-12);

  const Model swap = parse_model("state s\nstate t\ninit s\ntrans s - t:1\ntrans t - s:1\n");
  CHECK(stationary_distribution(swap, {0, 1}) == RationalVector{Rational(1, 2), Rational(1, 2)});
}

TEST_CASE("Markov chain reachability") {
  const Model branch = parse_model(
      "state s\nstate u\nstate v\ninit s\ntrans s - u:0.3 v:0.7\ntrans u - u:1\ntrans v - v:1\n");
  auto p = reach_probability(branch, only(3, {1}));
  CHECK(p[0] == Rational(3, 10));
  CHECK(p[1] == 1);
  CHECK(p[2] == 0);
  p = reach_probability(branch, only(3, {}));
  CHECK(p == RationalVector(3, Rational(0)));
  const Model mdp = parse_model(kMaintenance);
  CHECK_THROWS_AS(reach_probability(mdp, only(5, {4})), std::invalid_argument);
}

TEST_CASE("maximal reachability on the maintenance MDP") {
  const Model m = parse_model(kMaintenance);
  const auto mdp = to_exact_mdp(m);
  const auto target = only(5, {4});
  const auto r = max_reach(to_float(mdp), target);
  for (double v : r.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.strategy.choice[0] == 1);
  const auto e = max_reach_exact(mdp, target);
  CHECK(e.value == RationalVector(5, Rational(1)));
  const auto as = almost_sure_reach(support_of(mdp), target);
  CHECK(as.winning == std::vector<bool>(5, true));
  CHECK(as.strategy.choice[0] == 1);

  const auto all = max_reach(to_float(mdp), std::vector<bool>(5, true));
  for (double v : all.value) CHECK(v == 1.0);
}

TEST_CASE("almost-sure reachability basics") {
  // 0 -> {1, 2}; 1 absorbing target; 2 absorbing; 3 isolated.
  ChoiceSupport g{{{1, 2}, {1}}, {{1}}, {{2}}, {{3}}};
  const auto r = almost_sure_reach(g, only(4, {1}));
  CHECK(r.winning == std::vector<bool>{true, true, false, false});
  CHECK(r.strategy.choice[0] == 1);
}

TEST_CASE("two-phase objective basics") {
  ChoiceSupport loop{{{0}}};
  CHECK(almost_sure_fulfilled_then(loop, {true}, {true}).winning[0]);
  CHECK_FALSE(almost_sure_fulfilled_then(loop, {false}, {true}).winning[0]);
  // 0 -> 1 (fulfilled) -> 2 (goal) -> 2
  ChoiceSupport chain{{{1}}, {{2}}, {{2}}};
  const auto r = almost_sure_fulfilled_then(chain, {false, true, false}, {true, false, true});
  CHECK(r.winning == std::vector<bool>{true, true, false});
  // Goal before fulfilment does not count.
  ChoiceSupport early{{{1}}, {{1}}};
  CHECK_FALSE(almost_sure_fulfilled_then(early, {false, true}, {true, false}).winning[0]);
}

TEST_CASE("random chains: exact solvers against iterative oracles") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 150; ++i) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const Model mc = testing::random_model(rng, n, 1, {"a"});
    for (const auto& b : bsccs(mc).bsccs) {
      const auto pi = stationary_distribution(mc, b);
      Rational total = 0;
      for (std::size_t k = 0; k < b.size(); ++k) {
        total += pi[k];
        CHECK(pi[k] > 0);
        Rational inflow = 0;
        for (std::size_t j = 0; j < b.size(); ++j)
          for (const auto& t : mc.choices(b[j])[0].distribution)
            if (t.target == b[k]) inflow += pi[j] * t.probability;
        CHECK(inflow == pi[k]);
      }
      CHECK(total == 1);
      const auto approx = power_iteration(mc, b);
      for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(approx[k] - pi[k].get_d()) < 1e-9);
    }

    std::vector<bool> target(n);
    for (int s = 0; s < n; ++s) target[s] = rng() % 3 == 0;
    const auto exact = reach_probability(mc, target);
    const auto approx = iterate_reach(mc, target);
    std::vector<bool> bigger = target;
    bigger[rng() % n] = true;
    const auto more = reach_probability(mc, bigger);
    const auto as = almost_sure_reach(support_of(to_exact_mdp(mc)), target);
    for (int s = 0; s < n; ++s) {
      CHECK(exact[s] >= 0);
      CHECK(exact[s] <= 1);
      CHECK(std::abs(exact[s].get_d() - approx[s]) < 1e-9);
      CHECK(more[s] >= exact[s]);
      CHECK(as.winning[s] == (exact[s] == 1));
    }
  }
}

TEST_CASE("random MDPs: maximal reachability") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 150; ++i) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const Model m = testing::random_model(rng, n, 3, {"a"});
    const auto mdp = to_exact_mdp(m);
    std::vector<bool> target(n);
    for (int s = 0; s < n; ++s) target[s] = rng() % 4 == 0;

    const auto fl = max_reach(to_float(mdp), target);
    const auto ex = max_reach_exact(mdp, target);
    const auto oracle = iterate_reach(m, target);
    const auto as = almost_sure_reach(support_of(mdp), target);
    const auto under_float = reach_under(mdp, fl.strategy, target);
    for (int s = 0; s < n; ++s) {
      CHECK(std::abs(fl.value[s] - oracle[s]) < 1e-8);
      CHECK(std::abs(ex.value[s].get_d() - oracle[s]) < 1e-9);
      CHECK(std::abs(under_float[s].get_d() - ex.value[s].get_d()) < 1e-8);
      if (as.winning[s]) CHECK(fl.value[s] > 1 - 1e-9);
      if (as.winning[s]) CHECK(ex.value[s] == 1);
    }
    CHECK(reach_under(mdp, ex.strategy, target) == ex.value);

    for (int k = 0; k < 100; ++k) {
      Strategy policy{std::vector<int>(n)};
      for (int s = 0; s < n; ++s) policy.choice[s] = static_cast<int>(rng() % m.num_choices(s));
      const auto v = reach_under(mdp, policy, target);
      for (int s = 0; s < n; ++s) CHECK(v[s] <= ex.value[s]);
    }
  }
}

TEST_CASE("random chains: two-phase objective matches a composed oracle") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const Model mc = testing::random_model(rng, n, 1, {"a"});
    std::vector<bool> fulfilled(n), goal(n);
    for (int s = 0; s < n; ++s) {
      fulfilled[s] = rng() % 3 == 0;
      goal[s] = rng() % 3 == 0;
    }
    const auto r = almost_sure_fulfilled_then(support_of(to_exact_mdp(mc)), fulfilled, goal);
    // Oracle on chains: goal is reached almost surely from every fulfilled
    // state that is reached; value iteration on the explicit doubled chain.
    std::vector<double> v(2 * n, 0.0);
    for (int it = 0; it < 20000; ++it)
      for (int x = 0; x < n; ++x)
        for (int b = 0; b < 2; ++b) {
          if (b == 1 && goal[x]) {
            v[2 * x + 1] = 1;
            continue;
          }
          double q = 0;
          for (const auto& t : mc.choices(x)[0].distribution)
            q += t.probability.get_d() * v[2 * t.target + ((b || fulfilled[t.target]) ? 1 : 0)];
          v[2 * x + b] = q;
        }
    for (int x = 0; x < n; ++x) CHECK(r.winning[x] == (v[2 * x + (fulfilled[x] ? 1 : 0)] > 1 - 1e-6));
  }
}
