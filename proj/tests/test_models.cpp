#include "doctest.h"

#include "freqmc/model.hpp"
#include "support/random_instances.hpp"

using namespace freqmc;

namespace {

const char* kMaintenance = R"(
state s0 w
state s1 q
state s2 r
state s3 m
state s4 q m   # both
init s0
trans s0 w s1:0.5 s0:0.5
trans s0 m s3:1/2 s4:1/2
trans s1 - s2:1
trans s2 - s0:1
trans s3 - s0:1
trans s4 - s0:1
)";

}  // namespace

TEST_CASE("maintenance MDP parses") {
  const Model m = parse_model(kMaintenance);
  CHECK(m.num_states() == 5);
  CHECK(m.name(m.initial()) == "s0");
  CHECK_FALSE(m.is_markov_chain());
  const int s0 = m.find("s0");
  REQUIRE(m.num_choices(s0) == 2);
  CHECK(m.choices(s0)[0].action == "w");
  CHECK(m.choices(s0)[1].action == "m");
  CHECK(m.choices(s0)[0].distribution.size() == 2);
  CHECK(m.choices(s0)[0].distribution[0].probability == Rational(1, 2));
  CHECK(m.label(m.find("s4")) == Valuation{"m", "q"});
  CHECK(m.label(s0) == Valuation{"w"});
  CHECK(m.atoms() == std::set<std::string>{"m", "q", "r", "w"});
  CHECK(m.find_choice(s0, "m") == 1);
  CHECK(m.find_choice(m.find("s1"), "m") == -1);
}

TEST_CASE("absorbing state is a Markov chain") {
  const Model m = parse_model("state s\ninit s\ntrans s - s:1\n");
  CHECK(m.is_markov_chain());
  const auto p = bsccs(m);
  REQUIRE(p.bsccs.size() == 1);
  CHECK(p.bsccs[0] == std::vector<int>{0});
  CHECK(p.transient.empty());
}

TEST_CASE("malformed models are rejected") {
  auto fails = [](const char* text) { CHECK_THROWS_AS(parse_model(text), ModelError); };
  fails("state s\ninit s\ntrans s - s:0.5 s:0.4\n");
  fails("state s\nstate t\ninit s\ntrans s - s:0.5 t:0.4\ntrans t - t:1\n");
  fails("state s\ninit s\ntrans s - t:1\n");
  fails("state s\ninit t\ntrans s - s:1\n");
  fails("state s\ntrans s - s:1\n");
  fails("state s\nstate s\ninit s\ntrans s - s:1\n");
  fails("state s\ninit s\ntrans s - s:1\ntrans s - s:1\n");
  fails("state s\nstate t\ninit s\ntrans s - s:1\n");
  fails("state s\ninit s\ntrans s - s:x\n");
  fails("state s\ninit s\nedge s s\n");
  fails("");
  try {
    parse_model("state s\ninit s\ntrans s - s:0.5\n");
    FAIL("expected a model error");
  } catch (const ModelError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("bottom components") {
  const Model cycle = parse_model("state s\nstate t\ninit s\ntrans s - t:1\ntrans t - s:1\n");
  auto p = bsccs(cycle);
  REQUIRE(p.bsccs.size() == 1);
  CHECK(p.bsccs[0] == std::vector<int>{0, 1});

  const Model branch = parse_model(
      "state s\nstate u\nstate v\ninit s\ntrans s - u:0.3 v:0.7\ntrans u - u:1\ntrans v - v:1\n");
  p = bsccs(branch);
  REQUIRE(p.bsccs.size() == 2);
  CHECK(p.bsccs[0] == std::vector<int>{1});
  CHECK(p.bsccs[1] == std::vector<int>{2});
  CHECK(p.transient == std::vector<int>{0});
  CHECK(p.bscc_of == std::vector<int>{-1, 0, 1});
}

TEST_CASE("valuation restriction") {
  const Model m = parse_model(kMaintenance);
  const int s4 = m.find("s4");
  CHECK(restrict_valuation(m, {"q", "r"})[s4] == Valuation{"q"});
  CHECK(restrict_valuation(m, {})[s4].empty());
  CHECK(restrict_valuation(m, m.atoms()) == m.labels());
}

TEST_CASE("random models: serialization and BSCC structure") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const Model m = testing::random_model(rng, 1 + static_cast<int>(rng() % 8), 1 + i % 3, {"a", "b"});
    const std::string text = serialize(m);
    CHECK(serialize(parse_model(text)) == text);
    const Model back = parse_model(text);
    CHECK(back.num_states() == m.num_states());
    for (int s = 0; s < m.num_states(); ++s) {
      CHECK(back.label(s) == m.label(s));
      REQUIRE(back.num_choices(s) == m.num_choices(s));
      for (int c = 0; c < m.num_choices(s); ++c) {
        const auto& x = m.choices(s)[c].distribution;
        const auto& y = back.choices(s)[c].distribution;
        REQUIRE(x.size() == y.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
          CHECK(x[k].target == y[k].target);
          CHECK(x[k].probability == y[k].probability);
        }
      }
    }

    const auto p = bsccs(m);
    const auto adj = m.successor_graph();
    std::vector<int> covered(m.num_states(), 0);
    for (const auto& b : p.bsccs) {
      std::vector<bool> in_b(m.num_states(), false);
      for (int s : b) in_b[s] = true;
      for (int s : b) {
        covered[s]++;
        std::vector<bool> src(m.num_states(), false);
        src[s] = true;
        CHECK(graph::forward_reachable(adj, src) == in_b);  // closed and strongly connected
      }
    }
    for (int s : p.transient) covered[s]++;
    for (int c : covered) CHECK(c == 1);
    // Every state reaches some BSCC.
    std::vector<bool> bottom(m.num_states(), false);
    for (const auto& b : p.bsccs)
      for (int s : b) bottom[s] = true;
    const auto reach = graph::backward_reachable(adj, bottom);
    for (int s = 0; s < m.num_states(); ++s) CHECK(reach[s]);
  }
}
