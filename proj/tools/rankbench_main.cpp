// rankbench: diagnostic inference over the car network under numeric
// and rank-based probability, plus the comparison experiment around it.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rankbench/car.hpp"
#include "rankbench/harness.hpp"
#include "rankbench/inference.hpp"
#include "rankbench/io.hpp"
#include "rankbench/transform.hpp"

namespace {

using namespace rankbench;

constexpr int kExitOk = 0;
constexpr int kExitRunFailures = 1;
constexpr int kExitUsage = 2;

Evidence parse_evidence(const std::vector<std::string>& pairs) {
  Evidence ev;
  for (const std::string& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size())
      throw DomainError("evidence must look like variable=value, got: " + pair);
    ev[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return ev;
}

CarModel load_car_model(const std::string& network_path, const std::string& priors_path) {
  std::map<std::string, double> overrides;
  if (!priors_path.empty()) overrides = read_prior_overrides(priors_path);
  if (network_path.empty()) return build_reference_model(overrides);

  CarModel reference = build_reference_model();
  CarModel m;
  m.network = read_network(network_path);
  m.faults = reference.faults;
  m.findings = reference.findings;
  m.overlap = reference.overlap;
  for (const std::string& name : m.faults)
    if (!m.network.has_variable(name))
      throw ValidationError("network file lacks diagnosis variable " + name);
  for (const std::string& name : m.findings)
    if (!m.network.has_variable(name))
      throw ValidationError("network file lacks finding variable " + name);
  auto report = validate(m.network);
  if (!report.ok()) throw ValidationError("invalid network: " + report.problems.front());
  for (const auto& [name, p] : overrides) m.network.set_prior(name, {1.0 - p, p});
  return m;
}

unsigned thread_budget(std::size_t tasks) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* cap = std::getenv("RANKBENCH_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(cap, &end, 10);
    if (end && *end == '\0' && v >= 1) n = std::min<long>(n, v);
  }
  return std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(tasks, 1))));
}

std::string fmt_prob(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

int cmd_convert(const std::string& network_path, double epsilon, bool parameters,
                const std::string& out_path) {
  Network net = network_path.empty() ? build_reference_model().network
                                     : read_network(network_path);
  ConversionPolicy policy{epsilon, parameters};
  RankNetwork rank_net = convert_network(net, policy);
  write_rank_network(rank_net, out_path);

  std::printf("wrote %s\n", out_path.c_str());
  std::printf("entries by rank:\n");
  for (const auto& [rank, count] : rank_histogram(rank_net).bins)
    std::printf("  kappa=%s: %zu\n", to_string(rank).c_str(), count);
  return kExitOk;
}

int cmd_infer(const std::string& network_path, const std::string& priors_path,
              const std::vector<std::string>& evidence_pairs,
              const std::vector<std::string>& explicit_targets, const std::string& engine_name,
              double epsilon, double base) {
  const Engine engine = engine_from_string(engine_name);
  const Evidence evidence = parse_evidence(evidence_pairs);

  Network net;
  std::vector<std::string> targets = explicit_targets;
  if (network_path.empty() || targets.empty()) {
    CarModel model = load_car_model(network_path, priors_path);
    net = model.network;
    if (targets.empty()) targets = model.faults;
  } else {
    net = read_network(network_path);
    auto report = validate(net);
    if (!report.ok()) throw ValidationError("invalid network: " + report.problems.front());
  }

  if (engine == Engine::numeric || engine == Engine::kappa_as_prob) {
    Network query_net = net;
    if (engine == Engine::kappa_as_prob)
      query_net = kappa_as_probability(convert_network(net, ConversionPolicy{epsilon}), base);
    auto posteriors = posterior_marginals<SumProductAlgebra>(query_net, evidence, targets);
    for (const auto& p : posteriors) {
      std::printf("%-22s", p.variable.c_str());
      const auto& domain = query_net.variable(query_net.index_of(p.variable)).domain;
      for (std::size_t v = 0; v < p.dist.size(); ++v)
        std::printf("  %s=%s", domain[v].c_str(), fmt_prob(p.dist[v]).c_str());
      std::printf("\n");
    }
    return kExitOk;
  }

  RankNetwork rank_net = convert_network(net, ConversionPolicy{epsilon});
  auto posteriors = posterior_marginals<MinSumAlgebra>(rank_net, evidence, targets);
  std::vector<std::pair<std::string, Rank>> fault_ranks;
  for (const auto& p : posteriors) {
    std::printf("%-22s", p.variable.c_str());
    const auto& domain = rank_net.variable(rank_net.index_of(p.variable)).domain;
    for (std::size_t v = 0; v < p.dist.size(); ++v)
      std::printf("  %s=%s", domain[v].c_str(), to_string(p.dist[v]).c_str());
    std::printf("\n");
    if (domain.size() == 2) fault_ranks.emplace_back(p.variable, p.dist[1]);
  }
  if (!fault_ranks.empty()) {
    PlausibleSet phi = plausible_set(fault_ranks);
    std::printf("plausible set (min rank %s, size %zu):", to_string(phi.min_rank).c_str(),
                phi.members.size());
    for (const auto& m : phi.members) std::printf(" %s", m.c_str());
    std::printf("\n");
  }
  return kExitOk;
}

int cmd_cases(const std::string& network_path, const std::string& priors_path,
              const std::string& out_path) {
  CarModel model = load_car_model(network_path, priors_path);
  auto cases = generate_cases(model);
  write_cases(cases, out_path);
  std::printf("wrote %zu cases to %s\n", cases.size(), out_path.c_str());
  return kExitOk;
}

int report_from_records(const std::vector<RunRecord>& records, const CarModel& model,
                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_records_csv(records, (fs::path(out_dir) / "results.csv").string());
  write_figure_data(records, model, out_dir);

  std::size_t failures = 0;
  for (const auto& r : records) failures += r.failed;
  std::printf("%zu records (%zu failed) -> %s\n", records.size(), failures, out_dir.c_str());
  if (failures > 0) {
    for (const auto& r : records)
      if (r.failed)
        std::fprintf(stderr, "failed: %s %s factor=%g%s: %s\n", r.case_id.c_str(),
                     to_string(r.engine).c_str(), r.odds_factor,
                     r.epsilon ? (" eps=" + std::to_string(*r.epsilon)).c_str() : "",
                     r.error.c_str());
    return kExitRunFailures;
  }
  return kExitOk;
}

int cmd_run(const std::string& network_path, const std::string& priors_path,
            const std::string& cases_path, const std::string& subset_path,
            const std::vector<double>& epsilons, const std::vector<double>& factors,
            const std::vector<std::string>& engine_names, double base,
            const std::string& out_dir) {
  CarModel model = load_car_model(network_path, priors_path);
  std::vector<TestCase> cases =
      cases_path.empty() ? generate_cases(model) : read_cases(cases_path);

  if (!subset_path.empty()) {
    auto ids = read_case_subset(subset_path);
    std::vector<TestCase> selected;
    for (const auto& id : ids) {
      auto it = std::find_if(cases.begin(), cases.end(),
                             [&](const TestCase& tc) { return tc.id == id; });
      if (it == cases.end()) throw DomainError("subset names unknown case: " + id);
      selected.push_back(*it);
    }
    cases = std::move(selected);
  }

  GridConfig config;
  if (!factors.empty()) config.odds_factors = factors;
  if (!epsilons.empty()) config.epsilons = epsilons;
  if (!engine_names.empty()) {
    config.engines.clear();
    for (const auto& name : engine_names) config.engines.push_back(engine_from_string(name));
  }
  config.embedding_base = base;
  std::size_t tasks = 0;
  for (Engine e : config.engines)
    tasks += config.odds_factors.size() * (e == Engine::numeric ? 1 : config.epsilons.size());
  config.threads = thread_budget(tasks);

  auto records = run_grid(model, cases, config);
  return report_from_records(records, model, out_dir);
}

int cmd_report(const std::string& records_path, const std::string& network_path,
               const std::string& priors_path, const std::string& out_dir) {
  auto records = read_records_csv(records_path);
  CarModel model = load_car_model(network_path, priors_path);
  return report_from_records(records, model, out_dir);
}

void print_posterior_table(const CarModel& model, const Network& numeric_net,
                           const RankNetwork& rank_net, const Evidence& evidence, int update) {
  auto numeric = posterior_marginals<SumProductAlgebra>(numeric_net, evidence, model.faults);
  auto ranks = posterior_marginals<MinSumAlgebra>(rank_net, evidence, model.faults);

  std::vector<std::pair<std::string, Rank>> fault_ranks;
  for (const auto& p : ranks) fault_ranks.emplace_back(p.variable, p.dist[1]);
  PlausibleSet phi = plausible_set(fault_ranks);

  std::printf("--- posteriors #%d (%zu findings) ---\n", update, evidence.size());
  std::printf("%-22s  %10s  %6s  %s\n", "diagnosis", "P(present)", "kappa", "plausible");
  for (std::size_t i = 0; i < model.faults.size(); ++i) {
    const bool in_phi = phi.contains(model.faults[i]);
    std::printf("%-22s  %10s  %6s  %s\n", model.faults[i].c_str(),
                fmt_prob(numeric[i].dist[1]).c_str(), to_string(ranks[i].dist[1]).c_str(),
                in_phi ? "*" : "");
  }
  std::printf("plausible set size %zu, min rank %s\n", phi.members.size(),
              to_string(phi.min_rank).c_str());
}

int cmd_diagnose(const std::string& network_path, const std::string& priors_path,
                 double epsilon) {
  CarModel model = load_car_model(network_path, priors_path);
  const Network& numeric_net = model.network;
  RankNetwork rank_net = convert_network(numeric_net, ConversionPolicy{epsilon});

  std::printf("car troubleshooting session (epsilon %g)\n", epsilon);
  std::printf("enter a value for the prompted finding, or: finding=value, undo, quit\n");

  std::vector<std::pair<std::string, std::string>> asserted;  // ordered
  int updates = 0;
  std::string line;
  while (true) {
    // cheapest unasserted finding first
    std::string next;
    for (const auto& f : model.findings) {
      bool done = false;
      for (const auto& [k, v] : asserted) done |= (k == f);
      if (!done) {
        next = f;
        break;
      }
    }
    if (next.empty())
      std::printf("all findings asserted (undo, quit)> ");
    else {
      const auto& domain = numeric_net.variable(numeric_net.index_of(next)).domain;
      std::printf("%s [", next.c_str());
      for (std::size_t v = 0; v < domain.size(); ++v)
        std::printf("%s%s", v ? "/" : "", domain[v].c_str());
      std::printf("]> ");
    }
    std::fflush(stdout);
    if (!std::getline(std::cin, line)) break;

    // trim
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
    std::size_t first = line.find_first_not_of(' ');
    line = first == std::string::npos ? "" : line.substr(first);
    if (line.empty()) continue;
    if (line == "quit" || line == "exit") break;

    if (line == "undo") {
      if (asserted.empty()) {
        std::printf("nothing to undo\n");
        continue;
      }
      asserted.pop_back();
    } else {
      std::string finding = next, value = line;
      auto eq = line.find('=');
      if (eq != std::string::npos) {
        finding = line.substr(0, eq);
        value = line.substr(eq + 1);
      }
      if (!model.is_finding(finding)) {
        std::printf("unknown finding: %s\n", finding.c_str());
        continue;
      }
      int vi = numeric_net.index_of(finding);
      if (numeric_net.variable(vi).value_index(value) < 0) {
        std::printf("value '%s' not in the domain of %s\n", value.c_str(), finding.c_str());
        continue;
      }
      bool already = false;
      for (const auto& [k, v] : asserted) already |= (k == finding);
      if (already) {
        std::printf("%s is already asserted (undo first)\n", finding.c_str());
        continue;
      }
      asserted.emplace_back(finding, value);
    }

    Evidence evidence;
    for (const auto& [k, v] : asserted) evidence[k] = v;
    try {
      print_posterior_table(model, numeric_net, rank_net, evidence, ++updates);
    } catch (const ContradictoryEvidenceError& e) {
      std::printf("contradictory evidence, retracting last assertion: %s\n", e.what());
      if (!asserted.empty()) asserted.pop_back();
    }
  }
  std::printf("bye\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagnostic inference under numeric and rank-based probability"};
  app.require_subcommand(1);

  auto positive_eps = CLI::Range(1e-12, 1.0 - 1e-12);

  // convert
  std::string cv_network, cv_out = "rank-network.json";
  double cv_epsilon = 0.1;
  bool cv_parameters = false;
  auto* convert = app.add_subcommand("convert", "Discretize a network's probabilities into ranks");
  convert->add_option("--network", cv_network, "network file (default: built-in car model)");
  convert->add_option("--epsilon", cv_epsilon, "threshold probability")->check(positive_eps);
  convert->add_flag("--parameters", cv_parameters, "convert noisy parameters, not compiled entries");
  convert->add_option("--out", cv_out, "output rank-network file");

  // infer
  std::string in_network, in_priors, in_engine = "numeric";
  std::vector<std::string> in_evidence, in_targets;
  double in_epsilon = 0.1, in_base = 0.01;
  auto* infer = app.add_subcommand("infer", "Posterior of each diagnosis for fixed evidence");
  infer->add_option("--network", in_network, "network file (default: built-in car model)");
  infer->add_option("--priors", in_priors, "prior-override file");
  infer->add_option("--evidence", in_evidence, "finding=value (repeatable)");
  infer->add_option("--target", in_targets, "query variable (repeatable; default: diagnoses)");
  infer->add_option("--engine", in_engine, "numeric|kappa|kappa-as-prob");
  infer->add_option("--epsilon", in_epsilon, "threshold for kappa engines")->check(positive_eps);
  infer->add_option("--base", in_base, "embedding base for kappa-as-prob")->check(positive_eps);

  // cases
  std::string cs_network, cs_priors, cs_out = "cases.json";
  auto* cases_cmd = app.add_subcommand("cases", "Generate the 116-case test suite");
  cases_cmd->add_option("--network", cs_network, "network file (default: built-in car model)");
  cases_cmd->add_option("--priors", cs_priors, "prior-override file");
  cases_cmd->add_option("--out", cs_out, "output case file");

  // run
  std::string rn_network, rn_priors, rn_cases, rn_subset, rn_out = "results";
  std::vector<double> rn_epsilons, rn_factors;
  std::vector<std::string> rn_engines;
  double rn_base = 0.01;
  int rn_seed = 0;
  auto* run = app.add_subcommand("run", "Run the engine comparison grid and write reports");
  run->add_option("--network", rn_network, "network file (default: built-in car model)");
  run->add_option("--priors", rn_priors, "prior-override file");
  run->add_option("--cases", rn_cases, "case file (default: generated 116)");
  run->add_option("--subset", rn_subset, "file listing case ids to keep");
  run->add_option("--epsilon", rn_epsilons, "threshold (repeatable; default 0.1 0.01 0.001)")
      ->check(positive_eps);
  run->add_option("--odds-factor", rn_factors,
                  "prior odds multiplier (repeatable; default 1 10 50 100 300 1000)")
      ->check(CLI::PositiveNumber);
  run->add_option("--engine", rn_engines, "numeric|kappa|kappa-as-prob (repeatable)");
  run->add_option("--base", rn_base, "embedding base for kappa-as-prob")->check(positive_eps);
  run->add_option("--seed", rn_seed, "accepted for reproducibility bookkeeping; the grid is deterministic");
  run->add_option("--out", rn_out, "output directory");

  // report
  std::string rp_records, rp_network, rp_priors, rp_out = "results";
  auto* report = app.add_subcommand("report", "Rebuild aggregate reports from a results file");
  report->add_option("--records", rp_records, "results.csv from a previous run")->required();
  report->add_option("--network", rp_network, "network file (default: built-in car model)");
  report->add_option("--priors", rp_priors, "prior-override file");
  report->add_option("--out", rp_out, "output directory");

  // diagnose
  std::string dg_network, dg_priors;
  double dg_epsilon = 0.1;
  auto* diagnose = app.add_subcommand("diagnose", "Interactive troubleshooting session");
  diagnose->add_option("--network", dg_network, "network file (default: built-in car model)");
  diagnose->add_option("--priors", dg_priors, "prior-override file");
  diagnose->add_option("--epsilon", dg_epsilon, "threshold probability")->check(positive_eps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message/usage
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (convert->parsed()) return cmd_convert(cv_network, cv_epsilon, cv_parameters, cv_out);
    if (infer->parsed())
      return cmd_infer(in_network, in_priors, in_evidence, in_targets, in_engine, in_epsilon,
                       in_base);
    if (cases_cmd->parsed()) return cmd_cases(cs_network, cs_priors, cs_out);
    if (run->parsed())
      return cmd_run(rn_network, rn_priors, rn_cases, rn_subset, rn_epsilons, rn_factors,
                     rn_engines, rn_base, rn_out);
    if (report->parsed()) return cmd_report(rp_records, rp_network, rp_priors, rp_out);
    if (diagnose->parsed()) return cmd_diagnose(dg_network, dg_priors, dg_epsilon);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
