#include "freqmc/strategy.hpp"

#include <json.hpp>

#include <fstream>
#include <iterator>

namespace freqmc {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json encode(const ContextStrategy& c) {
  json moves = json::array();
  for (const auto& per_state : c.moves) {
    json row = json::array();
    for (const auto& m : per_state) row.push_back({m.choice, m.next_collection});
    moves.push_back(std::move(row));
  }
  json upsilon = json::array();
  for (const auto& [key, x] : c.upsilon) upsilon.push_back({key.first, key.second, x});
  return {{"commitment", c.commitment},
          {"component", c.component},
          {"states", c.states},
          {"moves", std::move(moves)},
          {"fulfilled", c.fulfilled},
          {"in_m", c.in_m},
          {"pi", c.pi},
          {"zeta", {c.zeta[0], c.zeta[1]}},
          {"upsilon", std::move(upsilon)}};
}

ContextStrategy decode_context(const json& j) {
  ContextStrategy c;
  c.commitment = j.at("commitment").get<Commitment>();
  c.component = j.at("component").get<int>();
  c.states = j.at("states").get<std::vector<std::pair<int, int>>>();
  for (const auto& row : j.at("moves")) {
    auto& moves = c.moves.emplace_back();
    for (const auto& m : row) moves.push_back({m.at(0).get<int>(), m.at(1).get<int>()});
  }
  c.fulfilled = j.at("fulfilled").get<std::vector<bool>>();
  c.in_m = j.at("in_m").get<std::vector<bool>>();
  c.pi = j.at("pi").get<std::vector<int>>();
  c.zeta[0] = j.at("zeta").at(0).get<std::vector<int>>();
  c.zeta[1] = j.at("zeta").at(1).get<std::vector<int>>();
  for (const auto& u : j.at("upsilon"))
    c.upsilon.emplace(std::make_pair(u.at(0).get<int>(), u.at(1).get<int>()), u.at(2).get<int>());

  const std::size_t n = c.states.size();
  if (c.moves.size() != n || c.fulfilled.size() != n || c.in_m.size() != n || c.pi.size() != n ||
      c.zeta[0].size() != n || c.zeta[1].size() != n)
    throw std::runtime_error("strategy file: inconsistent context sizes");
  c.build_index();
  return c;
}

}  // namespace

void save_strategy(const SynthesizedStrategy& strategy, const std::filesystem::path& path) {
  json automata = json::array();
  for (const auto& a : strategy.automata)
    automata.push_back({{"atoms", a.atoms}, {"delta", a.delta}, {"initial", a.initial}});
  json reach = json::array();
  for (const auto& [key, choice] : strategy.reach) reach.push_back({key, choice});
  json contexts = json::array();
  for (const auto& c : strategy.contexts) contexts.push_back(encode(c));
  const json doc = {{"format", "freqmc-strategy"},
                    {"version", kFormatVersion},
                    {"states", strategy.state_names},
                    {"probability", strategy.probability},
                    {"exact_probability", strategy.exact_probability},
                    {"automata", std::move(automata)},
                    {"reach", std::move(reach)},
                    {"contexts", std::move(contexts)}};
  const auto bytes = json::to_cbor(doc);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

SynthesizedStrategy load_strategy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read strategy file " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    const json doc = json::from_cbor(bytes);
    if (doc.at("format") != "freqmc-strategy" || doc.at("version") != kFormatVersion)
      throw std::runtime_error("not a strategy file of a supported version");
    SynthesizedStrategy s;
    s.state_names = doc.at("states").get<std::vector<std::string>>();
    s.probability = doc.at("probability").get<double>();
    s.exact_probability = doc.at("exact_probability").get<std::string>();
    for (const auto& a : doc.at("automata"))
      s.automata.push_back({a.at("atoms").get<std::vector<std::string>>(),
                            a.at("delta").get<std::vector<std::vector<int>>>(), a.at("initial").get<int>()});
    for (const auto& r : doc.at("reach")) {
      auto key = r.at(0).get<std::vector<int>>();
      if (key.size() != s.automata.size() + 1) throw std::runtime_error("reach entry has wrong arity");
      s.reach.emplace(std::move(key), r.at(1).get<int>());
    }
    for (const auto& c : doc.at("contexts")) {
      s.contexts.push_back(decode_context(c));
      if (s.contexts.back().component >= static_cast<int>(s.automata.size()))
        throw std::runtime_error("context refers to a missing automaton");
    }
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed strategy file " + path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("malformed strategy file " + path.string() + ": " + e.what());
  }
}

}  // namespace freqmc
