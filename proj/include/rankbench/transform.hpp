#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rankbench/model.hpp"
#include "rankbench/rank.hpp"

namespace rankbench {

/// Rules for discretizing probabilities into ranks.
///
/// The boundary cases are fixed: pi = 1 maps to rank 0 (the strict
/// upper inequality would otherwise leave it unmapped) and pi = 0 maps
/// to infinity.
struct ConversionPolicy {
  double epsilon = 0.1;  // threshold probability, in (0, 1)
  /// Convert noisy-OR/noisy-MAX parameters instead of compiled table
  /// entries, combining them in min-sum arithmetic.
  bool convert_parameters = false;
};

/// The unique kappa with epsilon^kappa > pi >= epsilon^(kappa+1).
/// Throws DomainError for pi outside [0, 1] or epsilon outside (0, 1).
Rank kappa_map(double pi, const ConversionPolicy& policy);

/// Maps every conditional entry of a valid numeric network through
/// kappa_map, preserving structure. With convert_parameters set, noisy
/// specs are converted at the parameter level and recombined in rank
/// arithmetic instead of being compiled first.
RankNetwork convert_network(const Network& net, const ConversionPolicy& policy);

/// The hypotheses attaining the minimal rank.
struct PlausibleSet {
  std::vector<std::string> members;  // in input order
  Rank min_rank;

  bool contains(const std::string& id) const;
};

/// Argmin set of a fault -> rank mapping. Throws DomainError when the
/// mapping is empty.
PlausibleSet plausible_set(const std::vector<std::pair<std::string, Rank>>& ranks);

/// 1/|set| when the true fault is plausible, otherwise 0.
double probability_score(const PlausibleSet& set, const std::string& true_fault);

/// Instantiates each rank kappa as the probability base^kappa (infinity
/// becomes 0) and renormalizes every row. Throws on all-infinite rows
/// and on base outside (0, 1).
Network kappa_as_probability(const RankNetwork& net, double base);

/// Count of conditional-table entries per rank value, with infinite
/// entries keyed separately. Useful for conversion summaries.
struct RankHistogram {
  std::vector<std::pair<Rank, std::size_t>> bins;  // ascending, inf last
};
RankHistogram rank_histogram(const RankNetwork& net);

}  // namespace rankbench
