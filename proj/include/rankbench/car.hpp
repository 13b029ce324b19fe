#pragma once

#include <map>
#include <string>
#include <vector>

#include "rankbench/model.hpp"

namespace rankbench {

/// One diagnostic scenario: the seeded fault plus a set of observed
/// findings. Every case observes engine-start = absent.
struct TestCase {
  std::string id;
  std::string true_fault;
  int n_findings = 0;
  Evidence evidence;
};

/// The car-diagnosis network with its twelve candidate diagnoses (nine
/// named faults plus three leak events, all root variables), the ten
/// observable findings in non-decreasing order of testing expense, and
/// the four variables that are both.
struct CarModel {
  Network network;
  std::vector<std::string> faults;
  std::vector<std::string> findings;
  std::vector<std::string> overlap;

  bool is_fault(const std::string& name) const;
  bool is_finding(const std::string& name) const;
  /// Prior probability of the diagnosis being present.
  double prior_of(const std::string& fault) const;
};

/// The shipped reconstruction. Optional overrides replace individual
/// diagnosis priors; keys must name diagnoses.
CarModel build_reference_model(const std::map<std::string, double>& prior_overrides = {});

/// p -> f*odds(p) / (1 + f*odds(p)). Throws DomainError for p = 1 or a
/// non-positive factor.
double scale_prior(double p, double odds_factor);

/// Copy of the model with every diagnosis prior odds-scaled. Nothing
/// else changes.
CarModel scale_priors(const CarModel& model, double odds_factor);

/// Most likely value of each of the ten findings given the fault is
/// present and everything else sits at its prior, computed with the
/// numeric engine. Ties break toward the earlier domain value.
Evidence modal_findings(const CarModel& model, const std::string& fault);

/// The full case suite: for each diagnosis, a base case of modal
/// findings (omitting the fault's own finding when it has one), then
/// successively dropping the most expensive remaining observation,
/// keeping engine-start throughout. 8 series of 10 plus 4 series of 9.
std::vector<TestCase> generate_cases(const CarModel& model);

/// Reference summary of the diagnosis priors under odds scaling, as
/// shipped with the model (five-decimal precision).
struct PriorSummary {
  double odds_factor;
  double min;
  double mean;
  double max;
};
const std::vector<PriorSummary>& reference_prior_summaries();

}  // namespace rankbench
