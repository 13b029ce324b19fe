#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "rankbench/car.hpp"

using namespace rankbench;

TEST_CASE("the reference model validates and has the advertised shape") {
  CarModel m = build_reference_model();
  CHECK(validate(m.network).ok());
  CHECK(m.faults.size() == 12);
  CHECK(m.findings.size() == 10);
  CHECK(m.overlap.size() == 4);
  for (const auto& f : m.faults) CHECK(m.network.has_variable(f));
  for (const auto& f : m.findings) CHECK(m.network.has_variable(f));
  for (const auto& o : m.overlap) {
    CHECK(m.is_fault(o));
    CHECK(m.is_finding(o));
  }
  CHECK(m.findings.front() == "engine-start");
}

TEST_CASE("reference priors have the documented spread") {
  CarModel m = build_reference_model();
  std::vector<double> priors;
  for (const auto& f : m.faults) priors.push_back(m.prior_of(f));
  const double minimum = *std::min_element(priors.begin(), priors.end());
  const double maximum = *std::max_element(priors.begin(), priors.end());
  const double mean = std::accumulate(priors.begin(), priors.end(), 0.0) / priors.size();
  CHECK(minimum == doctest::Approx(1.0274e-5).epsilon(1e-12));
  CHECK(std::abs(maximum - 0.00100) < 1.0e-5);
  CHECK(std::abs(mean - 0.00036) < 1.0e-5);
}

TEST_CASE("leak priors stay below the summed priors of the identified causes") {
  CarModel m = build_reference_model();
  auto p = [&](const char* f) { return m.prior_of(f); };
  CHECK(p("leak-engine-start") <
        p("spark-plugs") + p("distributor") + p("fuel-line") + p("fuel-pump") + p("gas-tank-empty"));
  CHECK(p("leak-engine-turn-over") < p("starter") + p("battery"));
  CHECK(p("leak-charging-system") < p("fan-belt") + p("alternator"));
}

TEST_CASE("odds scaling reproduces the shipped summary table") {
  CarModel m = build_reference_model();
  for (const PriorSummary& row : reference_prior_summaries()) {
    std::vector<double> scaled;
    for (const auto& f : m.faults) scaled.push_back(scale_prior(m.prior_of(f), row.odds_factor));
    const double minimum = *std::min_element(scaled.begin(), scaled.end());
    const double maximum = *std::max_element(scaled.begin(), scaled.end());
    const double mean = std::accumulate(scaled.begin(), scaled.end(), 0.0) / scaled.size();
    CHECK(std::abs(minimum - row.min) <= 1.0e-5 + 1e-12);
    CHECK(std::abs(mean - row.mean) <= 1.0e-5 + 1e-12);
    CHECK(std::abs(maximum - row.max) <= 1.0e-5 + 1e-12);
  }
}

TEST_CASE("scale_prior hits the published checkpoints") {
  CHECK(std::abs(scale_prior(0.001, 300.0) - 0.23095) < 1e-5);
  CHECK(std::abs(scale_prior(0.001, 1000.0) - 0.50025) < 1e-5);
  CHECK(std::abs(scale_prior(0.001, 10.0) - 0.00991) < 1e-5);
  CHECK(scale_prior(0.37, 1.0) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK_THROWS_AS(scale_prior(1.0, 10.0), DomainError);
  CHECK_THROWS_AS(scale_prior(0.1, 0.0), DomainError);
  CHECK_THROWS_AS(scale_prior(0.1, -2.0), DomainError);
}

TEST_CASE("scaling preserves the prior ordering") {
  CarModel m = build_reference_model();
  std::vector<double> base;
  for (const auto& f : m.faults) base.push_back(m.prior_of(f));
  auto order_of = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
  };
  const auto base_order = order_of(base);
  for (double factor : {10.0, 50.0, 100.0, 300.0, 1000.0, 0.5, 7.0}) {
    CarModel scaled = scale_priors(m, factor);
    std::vector<double> sp;
    for (const auto& f : scaled.faults) sp.push_back(scaled.prior_of(f));
    CHECK(order_of(sp) == base_order);
  }
}

TEST_CASE("odds factors compose multiplicatively") {
  CarModel m = build_reference_model();
  CarModel ab = scale_priors(scale_priors(m, 4.0), 25.0);
  CarModel direct = scale_priors(m, 100.0);
  for (const auto& f : m.faults)
    CHECK(ab.prior_of(f) == doctest::Approx(direct.prior_of(f)).epsilon(1e-12));
}

TEST_CASE("every seeded fault makes the engine not start") {
  CarModel m = build_reference_model();
  for (const auto& fault : m.faults) {
    Evidence modal = modal_findings(m, fault);
    CHECK(modal.at("engine-start") == "absent");
  }
}

TEST_CASE("an empty tank shows up on the gauge") {
  CarModel m = build_reference_model();
  Evidence modal = modal_findings(m, "gas-tank-empty");
  CHECK(modal.at("gas-gauge") == "absent");  // gauge indicates empty
  // and with fuel present the gauge reads full
  CHECK(modal_findings(m, "starter").at("gas-gauge") == "present");
}

TEST_CASE("modal findings are a deterministic fixed point") {
  CarModel m = build_reference_model();
  for (const auto& fault : {"battery", "fan-belt", "leak-charging-system"})
    CHECK(modal_findings(m, fault) == modal_findings(m, fault));
  CHECK_THROWS_AS(modal_findings(m, "radio"), DomainError);
}

TEST_CASE("an observable fault is modally present") {
  CarModel m = build_reference_model();
  for (const auto& fault : m.overlap)
    CHECK(modal_findings(m, fault).at(fault) == "present");
}

TEST_CASE("case generation yields the full 116-case suite") {
  CarModel m = build_reference_model();
  auto cases = generate_cases(m);
  CHECK(cases.size() == 116);

  std::map<std::string, int> series_length;
  std::set<std::string> ids;
  for (const auto& tc : cases) {
    ++series_length[tc.true_fault];
    CHECK(ids.insert(tc.id).second);
    CHECK(tc.evidence.at("engine-start") == "absent");
    CHECK(tc.n_findings == static_cast<int>(tc.evidence.size()));
    CHECK(tc.n_findings >= 1);
    CHECK(tc.n_findings <= 10);
  }
  int tens = 0, nines = 0;
  for (const auto& [fault, len] : series_length) {
    if (len == 10) ++tens;
    if (len == 9) ++nines;
  }
  CHECK(tens == 8);
  CHECK(nines == 4);
}

TEST_CASE("observable-fault series never observe the fault itself") {
  CarModel m = build_reference_model();
  auto cases = generate_cases(m);
  int alternator_cases = 0;
  for (const auto& tc : cases) {
    if (tc.true_fault != "alternator") continue;
    ++alternator_cases;
    CHECK(tc.evidence.count("alternator") == 0);
  }
  CHECK(alternator_cases == 9);
}

TEST_CASE("each series is a chain of strict evidence subsets") {
  CarModel m = build_reference_model();
  auto cases = generate_cases(m);
  for (std::size_t i = 1; i < cases.size(); ++i) {
    if (cases[i].true_fault != cases[i - 1].true_fault) continue;
    const Evidence& bigger = cases[i - 1].evidence;
    const Evidence& smaller = cases[i].evidence;
    CHECK(smaller.size() + 1 == bigger.size());
    for (const auto& [k, v] : smaller) {
      REQUIRE(bigger.count(k) == 1);
      CHECK(bigger.at(k) == v);
    }
  }
}

TEST_CASE("the cheapest case of every series keeps only engine-start") {
  CarModel m = build_reference_model();
  for (const auto& tc : generate_cases(m))
    if (tc.n_findings == 1) CHECK(tc.evidence.count("engine-start") == 1);
}

TEST_CASE("prior overrides replace only the named diagnosis") {
  CarModel m = build_reference_model({{"starter", 0.25}});
  CHECK(m.prior_of("starter") == doctest::Approx(0.25));
  CHECK(m.prior_of("battery") == doctest::Approx(7.5e-5));
  CHECK(validate(m.network).ok());
  CHECK_THROWS_AS(build_reference_model({{"radio", 0.1}}), ValidationError);
  CHECK_THROWS_AS(build_reference_model({{"starter", 1.0}}), ValidationError);
}
