#include "rankbench/car.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "rankbench/inference.hpp"

namespace rankbench {

namespace {

// Diagnosis priors. Chosen so that the twelve values and their
// odds-scaled versions reproduce the shipped prior summary table
// (reference_prior_summaries) to five decimals; see
// docs/car-model-provenance.md for the derivation and constraints.
constexpr std::array<std::pair<const char*, double>, 12> kPriors{{
    {"spark-plugs", 9.9999e-4},
    {"distributor", 9.7e-4},
    {"fuel-line", 2.3e-4},
    {"fuel-pump", 6.13e-4},
    {"gas-tank-empty", 9.8e-4},
    {"starter", 1.6e-4},
    {"battery", 7.5e-5},
    {"fan-belt", 1.35e-4},
    {"alternator", 1.15e-4},
    {"leak-engine-start", 4.2e-5},
    {"leak-engine-turn-over", 1.0274e-5},
    {"leak-charging-system", 2.9e-5},
}};

const std::vector<std::string> kBinary{"absent", "present"};

/// CPT for a variable whose "present" value means the function occurs:
/// it survives only if every parent state and the baseline fail to
/// break it, independently. fail[k] maps parent k's value index to a
/// breakage probability.
std::vector<std::vector<double>> works_unless(const std::vector<std::vector<double>>& fail,
                                              double base_failure) {
  std::vector<int> cards;
  std::size_t configs = 1;
  for (const auto& f : fail) {
    cards.push_back(static_cast<int>(f.size()));
    configs *= f.size();
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(configs);
  std::vector<int> state(fail.size(), 0);
  for (std::size_t cfg = 0; cfg < configs; ++cfg) {
    double works = 1.0 - base_failure;
    for (std::size_t k = 0; k < fail.size(); ++k)
      works *= 1.0 - fail[k][static_cast<std::size_t>(state[k])];
    rows.push_back({1.0 - works, works});
    for (std::size_t k = fail.size(); k-- > 0;) {
      if (++state[k] < cards[k]) break;
      state[k] = 0;
    }
  }
  return rows;
}

/// battery-charge rows in domain order {none, low, high}. Degradation
/// combines as a noisy-MAX over severity (high < low < none), which is
/// the reverse of the domain order, so compile over reversed levels and
/// flip each row back.
std::vector<std::vector<double>> battery_charge_rows() {
  NoisyMaxSpec spec;
  // severity-ordered levels: high (intact), low, none
  spec.strengths = {
      // battery: absent, present
      {{1.0, 0.0, 0.0}, {0.02, 0.18, 0.80}},
      // charging-system: absent, present
      {{1.0, 0.0, 0.0}, {0.05, 0.25, 0.70}},
  };
  spec.leak = {0.99994, 0.00004, 0.00002};
  auto rows = compile_noisy_max(spec, {2, 2}, 3);
  for (auto& row : rows) std::reverse(row.begin(), row.end());
  return rows;
}

}  // namespace

bool CarModel::is_fault(const std::string& name) const {
  return std::find(faults.begin(), faults.end(), name) != faults.end();
}

bool CarModel::is_finding(const std::string& name) const {
  return std::find(findings.begin(), findings.end(), name) != findings.end();
}

double CarModel::prior_of(const std::string& fault) const {
  int i = network.index_of(fault);
  if (i < 0 || !is_fault(fault)) throw DomainError("not a diagnosis: " + fault);
  return std::get<PriorSpec<double>>(network.node(i).spec).dist[1];
}

CarModel build_reference_model(const std::map<std::string, double>& prior_overrides) {
  CarModel m;
  m.faults = {"spark-plugs",  "distributor", "fuel-line",
              "fuel-pump",    "gas-tank-empty", "starter",
              "battery",      "fan-belt",    "alternator",
              "leak-engine-start", "leak-engine-turn-over", "leak-charging-system"};
  m.findings = {"engine-start", "gas-gauge",   "engine-turn-over", "lights",      "radio",
                "fan-belt",     "battery-age", "distributor",      "spark-plugs", "alternator"};
  m.overlap = {"fan-belt", "alternator", "spark-plugs", "distributor"};

  for (const auto& [name, p] : prior_overrides)
    if (std::find(m.faults.begin(), m.faults.end(), name) == m.faults.end())
      throw ValidationError("prior override names a non-diagnosis variable: " + name);

  Network& net = m.network;
  for (const auto& [name, prior] : kPriors) {
    net.add_variable(name, kBinary);
    auto it = prior_overrides.find(name);
    const double p = it == prior_overrides.end() ? prior : it->second;
    if (!(p >= 0.0 && p < 1.0))
      throw ValidationError("prior override for " + std::string(name) + " outside [0, 1)");
    net.set_prior(name, {1.0 - p, p});
  }

  net.add_variable("charging-system", kBinary);
  net.set_noisy_or("charging-system", {"fan-belt", "alternator", "leak-charging-system"},
                   {0.90, 0.95, 0.90}, 0.0);

  net.add_variable("battery-charge", {"none", "low", "high"});
  net.set_table("battery-charge", {"battery", "charging-system"}, battery_charge_rows());

  net.add_variable("battery-age", kBinary);
  net.set_noisy_or("battery-age", {"battery"}, {0.90}, 0.20);

  net.add_variable("engine-turn-over", kBinary);
  net.set_table("engine-turn-over", {"starter", "battery-charge", "leak-engine-turn-over"},
                works_unless(
                    {
                        {0.0, 0.98},        // starter bad
                        {0.98, 0.60, 0.0},  // charge none, low, high
                        {0.0, 0.95},        // unmodeled turn-over causes
                    },
                    0.0));

  net.add_variable("lights", kBinary);
  net.set_table("lights", {"battery-charge"},
                works_unless({{0.98, 0.40, 0.01}}, 0.01));

  net.add_variable("radio", kBinary);
  net.set_table("radio", {"battery-charge"},
                works_unless({{0.95, 0.30, 0.02}}, 0.01));

  net.add_variable("gas-gauge", kBinary);  // present = gauge indicates fuel
  net.set_table("gas-gauge", {"gas-tank-empty", "battery-charge"},
                works_unless(
                    {
                        {0.0, 0.98},        // tank empty: gauge reads empty
                        {0.95, 0.25, 0.03}, // gauge needs electricity
                    },
                    0.0));

  net.add_variable("engine-start", kBinary);
  net.set_table("engine-start",
                {"engine-turn-over", "spark-plugs", "distributor", "fuel-line", "fuel-pump",
                 "gas-tank-empty", "leak-engine-start"},
                works_unless(
                    {
                        {1.0, 0.0},  // no crank, no start
                        {0.0, 0.95},
                        {0.0, 0.95},
                        {0.0, 0.90},
                        {0.0, 0.90},
                        {0.0, 0.99},
                        {0.0, 0.90},
                    },
                    0.0));

  return m;
}

double scale_prior(double p, double odds_factor) {
  if (!(odds_factor > 0.0)) throw DomainError("odds factor must be positive");
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("prior must lie in [0, 1) for odds scaling");
  const double scaled_odds = odds_factor * (p / (1.0 - p));
  return scaled_odds / (1.0 + scaled_odds);
}

CarModel scale_priors(const CarModel& model, double odds_factor) {
  CarModel out = model;
  for (const std::string& fault : out.faults) {
    const double p = scale_prior(model.prior_of(fault), odds_factor);
    out.network.set_prior(fault, {1.0 - p, p});
  }
  return out;
}

Evidence modal_findings(const CarModel& model, const std::string& fault) {
  if (!model.is_fault(fault)) throw DomainError("unknown fault: " + fault);
  Evidence condition{{fault, "present"}};
  auto posteriors = posterior_marginals<SumProductAlgebra>(model.network, condition, model.findings);
  Evidence modal;
  for (const auto& post : posteriors) {
    std::size_t best = 0;
    for (std::size_t v = 1; v < post.dist.size(); ++v)
      if (post.dist[v] > post.dist[best]) best = v;
    int vi = model.network.index_of(post.variable);
    modal[post.variable] = model.network.variable(vi).domain[best];
  }
  return modal;
}

std::vector<TestCase> generate_cases(const CarModel& model) {
  std::vector<TestCase> cases;
  for (const std::string& fault : model.faults) {
    const Evidence modal = modal_findings(model, fault);

    std::vector<std::string> base;  // expense order, own finding omitted
    for (const std::string& f : model.findings)
      if (f != fault) base.push_back(f);

    // drop the most expensive remaining observation each step, always
    // retaining engine-start
    std::vector<std::string> current = base;
    for (std::size_t k = 0; k < base.size(); ++k) {
      TestCase tc;
      tc.true_fault = fault;
      for (const std::string& f : current) tc.evidence[f] = modal.at(f);
      tc.n_findings = static_cast<int>(tc.evidence.size());
      char buf[8];
      std::snprintf(buf, sizeof buf, "%02d", tc.n_findings);
      tc.id = fault + "-" + buf;
      cases.push_back(std::move(tc));
      for (std::size_t d = current.size(); d-- > 0;) {
        if (current[d] != "engine-start") {
          current.erase(current.begin() + static_cast<std::ptrdiff_t>(d));
          break;
        }
      }
    }
  }
  return cases;
}

const std::vector<PriorSummary>& reference_prior_summaries() {
  static const std::vector<PriorSummary> table{
      {1.0, 0.00001, 0.00036, 0.00100},   {10.0, 0.00010, 0.00361, 0.00991},
      {50.0, 0.00051, 0.01750, 0.04766},  {100.0, 0.00103, 0.03376, 0.09099},
      {300.0, 0.00307, 0.08900, 0.23095}, {1000.0, 0.01017, 0.21364, 0.50025},
  };
  return table;
}

}  // namespace rankbench
