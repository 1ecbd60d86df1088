#include "freqmc/model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace freqmc {

ModelError::ModelError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

Model::Model(std::vector<std::string> names, std::vector<Valuation> labels,
             std::vector<std::vector<Choice>> choices, int initial)
    : names_(std::move(names)),
      labels_(std::move(labels)),
      choices_(std::move(choices)),
      initial_(initial) {
  const int n = num_states();
  if (n == 0) throw ModelError("model has no states");
  if (static_cast<int>(labels_.size()) != n || static_cast<int>(choices_.size()) != n)
    throw ModelError("inconsistent model dimensions");
  if (initial_ < 0 || initial_ >= n) throw ModelError("initial state out of range");
  std::set<std::string> seen;
  for (const auto& name : names_)
    if (!seen.insert(name).second) throw ModelError("duplicate state '" + name + "'");
  for (int s = 0; s < n; ++s) {
    if (choices_[s].empty()) throw ModelError("state '" + names_[s] + "' has no actions");
    std::set<std::string> actions;
    for (auto& c : choices_[s]) {
      if (!actions.insert(c.action).second)
        throw ModelError("duplicate action '" + c.action + "' at state '" + names_[s] + "'");
      std::sort(c.distribution.begin(), c.distribution.end(),
                [](const Transition& a, const Transition& b) { return a.target < b.target; });
      Rational total = 0;
      for (std::size_t i = 0; i < c.distribution.size(); ++i) {
        const auto& t = c.distribution[i];
        if (t.target < 0 || t.target >= n) throw ModelError("transition target out of range");
        if (i > 0 && c.distribution[i - 1].target == t.target)
          throw ModelError("duplicate target '" + names_[t.target] + "' in '" + names_[s] + "' " +
                           c.action);
        if (t.probability < 0) throw ModelError("negative probability");
        total += t.probability;
      }
      if (total != 1)
        throw ModelError("distribution of '" + names_[s] + "' " + c.action + " sums to " +
                         to_string(total));
      std::erase_if(c.distribution, [](const Transition& t) { return t.probability == 0; });
    }
  }
}

int Model::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

int Model::find_choice(int s, std::string_view action) const {
  const auto& cs = choices_[s];
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (cs[i].action == action) return static_cast<int>(i);
  return -1;
}

bool Model::is_markov_chain() const {
  return std::all_of(choices_.begin(), choices_.end(),
                     [](const auto& cs) { return cs.size() == 1; });
}

std::set<std::string> Model::atoms() const {
  std::set<std::string> out;
  for (const auto& l : labels_) out.insert(l.begin(), l.end());
  return out;
}

graph::Adjacency Model::successor_graph() const {
  graph::Adjacency adj(num_states());
  for (int s = 0; s < num_states(); ++s) {
    for (const auto& c : choices_[s])
      for (const auto& t : c.distribution) adj[s].push_back(t.target);
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  return adj;
}

Model Model::relabeled(std::vector<Valuation> labels) const {
  if (labels.size() != labels_.size()) throw ModelError("valuation has the wrong size");
  Model m = *this;
  m.labels_ = std::move(labels);
  return m;
}

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

Model parse_model(std::string_view text) {
  struct PendingChoice {
    std::string action;
    std::vector<std::pair<std::string, Rational>> targets;
    int line;
  };
  std::vector<std::string> names;
  std::vector<Valuation> labels;
  std::map<std::string, int> index;
  std::map<std::string, std::vector<PendingChoice>> pending;
  std::string init;
  int init_line = 0;

  std::istringstream in{std::string(text)};
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto words = split_words(line);
    if (words.empty()) continue;
    const std::string& kw = words[0];
    if (kw == "state") {
      if (words.size() < 2) throw ModelError("state needs a name", lineno);
      if (index.count(words[1])) throw ModelError("duplicate state '" + words[1] + "'", lineno);
      index.emplace(words[1], static_cast<int>(names.size()));
      names.push_back(words[1]);
      labels.emplace_back(words.begin() + 2, words.end());
    } else if (kw == "init") {
      if (words.size() != 2) throw ModelError("init takes exactly one state", lineno);
      if (!init.empty()) throw ModelError("duplicate init", lineno);
      init = words[1];
      init_line = lineno;
    } else if (kw == "trans") {
      if (words.size() < 4) throw ModelError("trans needs a state, an action and targets", lineno);
      PendingChoice c{words[2], {}, lineno};
      for (std::size_t i = 3; i < words.size(); ++i) {
        const auto colon = words[i].rfind(':');
        if (colon == std::string::npos || colon == 0)
          throw ModelError("expected <target>:<prob>, got '" + words[i] + "'", lineno);
        try {
          c.targets.emplace_back(words[i].substr(0, colon),
                                 parse_rational(std::string_view(words[i]).substr(colon + 1)));
        } catch (const std::invalid_argument&) {
          throw ModelError("bad probability in '" + words[i] + "'", lineno);
        }
      }
      pending[words[1]].push_back(std::move(c));
    } else {
      throw ModelError("unknown keyword '" + kw + "'", lineno);
    }
  }

  if (names.empty()) throw ModelError("model has no states");
  if (init.empty()) throw ModelError("missing init line");
  if (!index.count(init)) throw ModelError("unknown initial state '" + init + "'", init_line);

  std::vector<std::vector<Choice>> choices(names.size());
  for (auto& [state, list] : pending) {
    auto it = index.find(state);
    if (it == index.end()) throw ModelError("unknown state '" + state + "'", list.front().line);
    for (auto& pc : list) {
      Choice c{pc.action, {}};
      for (auto& [target, p] : pc.targets) {
        auto t = index.find(target);
        if (t == index.end()) throw ModelError("unknown state '" + target + "'", pc.line);
        for (const auto& prev : c.distribution)
          if (prev.target == t->second)
            throw ModelError("duplicate target '" + target + "'", pc.line);
        c.distribution.push_back({t->second, std::move(p)});
      }
      for (const auto& prev : choices[it->second])
        if (prev.action == c.action)
          throw ModelError("duplicate transition for '" + state + "' " + c.action, pc.line);
      Rational total = 0;
      for (const auto& t : c.distribution) total += t.probability;
      if (total != 1)
        throw ModelError("probabilities of '" + state + "' " + c.action + " sum to " +
                             to_string(total),
                         pc.line);
      choices[it->second].push_back(std::move(c));
    }
  }
  for (std::size_t s = 0; s < names.size(); ++s)
    if (choices[s].empty()) throw ModelError("state '" + names[s] + "' has no transitions");
  return Model(std::move(names), std::move(labels), std::move(choices), index.at(init));
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string serialize(const Model& model) {
  std::ostringstream out;
  for (int s = 0; s < model.num_states(); ++s) {
    out << "state " << model.name(s);
    for (const auto& l : model.label(s)) out << ' ' << l;
    out << '\n';
  }
  out << "init " << model.name(model.initial()) << '\n';
  for (int s = 0; s < model.num_states(); ++s)
    for (const auto& c : model.choices(s)) {
      out << "trans " << model.name(s) << ' ' << c.action;
      for (const auto& t : c.distribution)
        out << ' ' << model.name(t.target) << ':' << to_string(t.probability);
      out << '\n';
    }
  return out.str();
}

BsccPartition bsccs(const Model& model) {
  const auto adj = model.successor_graph();
  const auto scc = graph::strongly_connected_components(adj);
  const auto bottom = graph::bottom_components(adj, scc);
  BsccPartition out;
  out.bscc_of.assign(model.num_states(), -1);
  std::vector<int> id(scc.members.size(), -1);
  for (std::size_t c = 0; c < scc.members.size(); ++c) {
    if (!bottom[c]) continue;
    auto members = scc.members[c];
    std::sort(members.begin(), members.end());
    out.bsccs.push_back(std::move(members));
  }
  // Order BSCCs by smallest member for reproducible output.
  std::sort(out.bsccs.begin(), out.bsccs.end());
  for (std::size_t b = 0; b < out.bsccs.size(); ++b)
    for (int s : out.bsccs[b]) out.bscc_of[s] = static_cast<int>(b);
  for (int s = 0; s < model.num_states(); ++s)
    if (out.bscc_of[s] < 0) out.transient.push_back(s);
  return out;
}

std::vector<Valuation> restrict_valuation(const Model& model, const std::set<std::string>& atoms) {
  std::vector<Valuation> out(model.num_states());
  for (int s = 0; s < model.num_states(); ++s)
    for (const auto& a : model.label(s))
      if (atoms.count(a)) out[s].insert(a);
  return out;
}

}  // namespace freqmc
