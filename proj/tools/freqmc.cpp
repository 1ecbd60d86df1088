// freqmc: command-line front end.
//
// Exit codes: 0 success, 2 input error, 3 budget exceeded.

#include "freqmc/mc_engine.hpp"
#include "freqmc/strategy.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace freqmc;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kBudgetExceeded = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string model_path;
  std::string formula;
  std::string formula_file;
  std::string out;
  std::string strategy;
  std::string dot;
  std::string trace;
  std::vector<std::string> monitors;
  double tolerance = 1e-10;
  std::size_t automaton_budget = 50'000;
  std::size_t product_budget = 2'000'000;
  std::uint64_t horizon = 1000;
  std::uint64_t seed = 0;
  bool exact = false;
  bool json = false;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

Formula read_formula(const Config& c) {
  std::string text = c.formula;
  if (!c.formula_file.empty()) {
    std::ifstream in(c.formula_file);
    if (!in) throw InputError("cannot read " + c.formula_file);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_formula(text);
}

TranslationOptions translation(const Config& c) {
  TranslationOptions t;
  t.max_states = c.automaton_budget;
  return t;
}

ordered_json probability_json(const Rational& p) {
  return {{"exact", to_string(p)}, {"decimal", p.get_d()}};
}

void emit(const Config& c, ordered_json report, const std::string& text) {
  if (c.json) {
    // Wall-clock data is grouped under one key so that reports of identical
    // runs differ only there.
    ordered_json stamp{{"utc", timestamp()}};
    if (report.contains("seconds")) {
      stamp["seconds"] = report["seconds"];
      report.erase("seconds");
    }
    report["timestamp"] = std::move(stamp);
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

SynthesisOptions synthesis_options(const Config& c) {
  SynthesisOptions o;
  o.automaton = translation(c);
  o.max_product_states = c.product_budget;
  o.tolerance = c.tolerance;
  o.exact = c.exact;
  return o;
}

ordered_json synthesis_json(const Model& model, const SynthesisResult& r) {
  ordered_json out;
  if (r.exact_probability) out["probability"] = probability_json(*r.exact_probability);
  else out["probability"] = {{"decimal", r.probability}};
  ordered_json contexts = ordered_json::array();
  for (const auto& ctx : r.contexts) {
    ordered_json assumed = ordered_json::array();
    for (int i = 0; i < r.family.num_frequency(); ++i)
      if ((ctx.commitment >> i) & 1U) assumed.push_back(to_string(r.family.bodies()[i]));
    ordered_json upsilon = ordered_json::array();
    for (const auto& [key, x] : ctx.upsilon) upsilon.push_back({model.name(key.first), key.second});
    std::size_t m = std::count(ctx.mn.in_m.begin(), ctx.mn.in_m.end(), true);
    contexts.push_back({{"assumed", std::move(assumed)},
                        {"main_automaton_states", r.family.automaton(ctx.main_automaton).num_states()},
                        {"product_states", ctx.fragment.num_states()},
                        {"m_states", m},
                        {"iterations", ctx.mn.iterations},
                        {"upsilon", std::move(upsilon)}});
  }
  out["contexts"] = std::move(contexts);
  out["naive_product_states"] = r.naive.states.size();
  out["seconds"] = r.seconds;
  return out;
}

int cmd_check(const Config& c) {
  const auto start = Clock::now();
  const Model model = load_model(c.model_path);
  const Formula psi = read_formula(c);
  ordered_json report{{"command", "check"}, {"model", c.model_path}, {"formula", to_string(psi)}};
  std::ostringstream text;

  if (!model.is_markov_chain()) {
    // Nondeterministic models get the maximal probability via synthesis.
    const SynthesisResult r = synthesize(model, psi, synthesis_options(c));
    report["kind"] = "mdp";
    report.update(synthesis_json(model, r));
    report["seconds"]["total"] = since(start);
    text << "maximal probability: "
         << (r.exact_probability ? to_string(*r.exact_probability) + " ~ " : std::string())
         << r.probability << "\n";
    emit(c, std::move(report), text.str());
    return kOk;
  }

  McOptions options;
  options.automaton = translation(c);
  options.max_product_states = c.product_budget;
  const McReport r = check_mc(model, psi, options);
  report["kind"] = "mc";
  report["probability"] = probability_json(r.probability);
  report["residual"] = to_string(r.residual);
  ordered_json certs = ordered_json::array();
  for (const auto& cert : r.certificates) {
    ordered_json entries = ordered_json::array();
    for (const auto& e : cert.entries) {
      ordered_json states = ordered_json::array();
      for (int s : e.bscc) states.push_back(model.name(s));
      entries.push_back({{"bscc", std::move(states)}, {"frequency", probability_json(e.value)}, {"holds", e.holds}});
    }
    certs.push_back({{"atom", cert.atom}, {"body", to_string(cert.body)}, {"bound", to_string(cert.bound)},
                     {"bsccs", std::move(entries)}});
    text << "G{" << to_string(cert.bound) << "} " << to_string(cert.body) << ":\n";
    for (const auto& e : cert.entries) {
      text << "  bscc {";
      for (std::size_t i = 0; i < e.bscc.size(); ++i) text << (i ? " " : "") << model.name(e.bscc[i]);
      text << "} frequency " << to_string(e.value) << (e.holds ? " holds\n" : " fails\n");
    }
  }
  report["certificates"] = std::move(certs);
  report["product_states"] = r.product_states;
  report["seconds"] = {{"total", since(start)}};
  text << "probability: " << to_string(r.probability) << " ~ " << r.probability.get_d() << "\n";
  emit(c, std::move(report), text.str());
  return kOk;
}

int cmd_synth(const Config& c) {
  const auto start = Clock::now();
  const Model model = load_model(c.model_path);
  const Formula psi = read_formula(c);
  const SynthesisResult r = synthesize(model, psi, synthesis_options(c));
  ordered_json report{{"command", "synth"}, {"model", c.model_path}, {"formula", to_string(psi)}};
  report.update(synthesis_json(model, r));
  std::ostringstream text;
  text << "probability: "
       << (r.exact_probability ? to_string(*r.exact_probability) + " ~ " : std::string()) << r.probability
       << "\n";
  for (const auto& ctx : r.contexts) {
    text << "commitment " << ctx.commitment << ": " << ctx.fragment.num_states() << " product states, "
         << ctx.upsilon.size() << " upsilon entries";
    for (const auto& [key, x] : ctx.upsilon) text << " (" << model.name(key.first) << "," << key.second << ")";
    text << "\n";
  }
  if (!c.out.empty()) {
    save_strategy(extract_strategy(r, model), c.out);
    report["strategy"] = c.out;
    text << "strategy written to " << c.out << "\n";
  }
  report["seconds"]["total"] = since(start);
  emit(c, std::move(report), text.str());
  return kOk;
}

int cmd_sim(const Config& c) {
  const Model model = load_model(c.model_path);
  SynthesizedStrategy strategy;
  try {
    strategy = load_strategy(c.strategy);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  if (c.horizon < 1) throw InputError("horizon must be at least 1");
  const auto start = Clock::now();
  const Trace trace = simulate(model, strategy, c.horizon, c.seed);
  const double sim_seconds = since(start);

  if (!c.trace.empty()) {
    std::ofstream out(c.trace);
    if (!out) throw InputError("cannot write " + c.trace);
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
      const auto& st = trace.steps[k];
      out << k << ' ' << model.name(st.state) << ' ' << model.choices(st.state)[st.choice].action << ' '
          << to_string(st.phase) << '\n';
    }
  }

  std::size_t first_context = trace.steps.size();
  for (std::size_t k = 0; k < trace.steps.size(); ++k)
    if (trace.steps[k].phase != Phase::Reach) {
      first_context = k;
      break;
    }
  ordered_json report{{"command", "sim"},
                      {"model", c.model_path},
                      {"strategy", c.strategy},
                      {"horizon", c.horizon},
                      {"seed", c.seed},
                      {"final_state", model.name(trace.final_state)},
                      {"final_phase", to_string(trace.steps.back().phase)},
                      {"accumulating_phases", trace.steps.back().accumulation}};
  if (first_context < trace.steps.size()) report["upsilon_step"] = first_context;
  else report["upsilon_step"] = nullptr;
  std::ostringstream text;
  text << "steps: " << trace.steps.size() << ", final state " << model.name(trace.final_state) << ", phase "
       << to_string(trace.steps.back().phase) << ", accumulating phases " << trace.steps.back().accumulation
       << "\n";

  const auto mode = model.is_markov_chain() ? MonitorMode::Chain : MonitorMode::Game;
  const auto states = trace.states();
  ordered_json estimates = ordered_json::array();
  for (const auto& text_phi : c.monitors) {
    const Formula phi = parse_formula(text_phi);
    if (!is_ltl(phi)) throw InputError("monitor formulas must be pure LTL: " + text_phi);
    const auto f = empirical_frequency(model, states, ltl_to_dra(phi, translation(c)), mode);
    estimates.push_back({{"formula", to_string(phi)},
                         {"estimate", f.estimate},
                         {"resolved", f.resolved},
                         {"unresolved", f.unresolved},
                         {"inconclusive", f.inconclusive}});
    text << "frequency of " << to_string(phi) << ": " << f.estimate << " (" << f.resolved << " resolved, "
         << f.unresolved << " unresolved" << (f.inconclusive ? ", inconclusive" : "") << ")\n";
  }
  report["frequencies"] = std::move(estimates);
  report["seconds"] = {{"simulation", sim_seconds}};
  emit(c, std::move(report), text.str());
  return kOk;
}

int cmd_aut(const Config& c) {
  const Formula phi = read_formula(c);
  if (!is_ltl(phi)) throw InputError("automata are built for pure LTL formulas");
  const Dra dra = ltl_to_dra(phi, translation(c));
  if (c.dot == "-") {
    std::cout << to_dot(dra);
  } else if (!c.dot.empty()) {
    std::ofstream out(c.dot);
    if (!out) throw InputError("cannot write " + c.dot);
    out << to_dot(dra);
  }
  ordered_json report{{"command", "aut"},
                      {"formula", to_string(phi)},
                      {"states", dra.num_states()},
                      {"pairs", dra.pairs().size()},
                      {"atoms", dra.atoms()}};
  std::ostringstream text;
  if (c.dot != "-")
    text << dra.num_states() << " states, " << dra.pairs().size() << " Rabin pairs\n";
  if (c.dot != "-" || c.json) emit(c, std::move(report), text.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freqmc: probabilistic model checking for frequency LTL"};
  app.require_subcommand(1);
  Config c;

  auto formula_options = [&](CLI::App* sub) {
    auto* f = sub->add_option("--formula", c.formula, "formula text");
    auto* ff = sub->add_option("--formula-file", c.formula_file, "file holding the formula");
    f->excludes(ff);
    ff->excludes(f);
    sub->add_option("--automaton-budget", c.automaton_budget, "maximal automaton states")
        ->check(CLI::PositiveNumber);
  };
  auto engine_options = [&](CLI::App* sub) {
    sub->add_option("--model", c.model_path, "model file")->required();
    formula_options(sub);
    sub->add_option("--product-budget", c.product_budget, "maximal product states")->check(CLI::PositiveNumber);
    sub->add_option("--tol", c.tolerance, "value iteration tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--json", c.json, "print a JSON report");
  };

  auto* check = app.add_subcommand("check", "probability of a formula (maximal for MDPs)");
  engine_options(check);
  check->add_flag("--exact", c.exact, "solve MDP reachability exactly");

  auto* synth = app.add_subcommand("synth", "synthesize a controller for a formula on an MDP");
  engine_options(synth);
  synth->add_option("--out", c.out, "strategy file to write");
  synth->add_flag("--exact", c.exact, "solve reachability exactly");

  auto* sim = app.add_subcommand("sim", "simulate a strategy");
  sim->add_option("--model", c.model_path, "model file")->required();
  sim->add_option("--strategy", c.strategy, "strategy file")->required();
  sim->add_option("--horizon", c.horizon, "number of steps");
  sim->add_option("--seed", c.seed, "random seed");
  sim->add_option("--trace", c.trace, "write 'step state action phase' lines");
  sim->add_option("--monitor", c.monitors, "pure LTL formula whose frequency is estimated");
  sim->add_flag("--json", c.json, "print a JSON report");

  auto* aut = app.add_subcommand("aut", "build a deterministic Rabin automaton");
  formula_options(aut);
  aut->add_option("--dot", c.dot, "write Graphviz output ('-' for stdout)");
  aut->add_flag("--json", c.json, "print a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*check || *synth || *aut)
      if (c.formula.empty() && c.formula_file.empty()) throw InputError("--formula is required");
    if (*check) return cmd_check(c);
    if (*synth) return cmd_synth(c);
    if (*sim) return cmd_sim(c);
    return cmd_aut(c);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudgetExceeded;
  } catch (const FormulaSyntaxError& e) {
    std::cerr << "formula error: " << e.what() << "\n";
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
