#pragma once

#include <random>
#include <string>
#include <vector>

#include "rankbench/model.hpp"

namespace rbtest {

using namespace rankbench;

/// Random DAG over binary (optionally ternary) variables with strictly
/// positive random rows. Variable v0 never has parents, so every
/// network has at least one root.
inline Network random_network(std::mt19937& rng, int n_vars, bool binary_only = true,
                              int max_parents = 3) {
  Network net;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n_vars; ++i) {
    std::vector<std::string> domain{"absent", "present"};
    if (!binary_only && unif(rng) < 0.3) domain = {"lo", "mid", "hi"};
    net.add_variable("v" + std::to_string(i), domain);
  }
  for (int i = 0; i < n_vars; ++i) {
    std::vector<std::string> parents;
    for (int p = 0; p < i && static_cast<int>(parents.size()) < max_parents; ++p)
      if (unif(rng) < 0.4) parents.push_back("v" + std::to_string(p));

    std::size_t rows = 1;
    for (const auto& pn : parents) rows *= net.variable(net.index_of(pn)).domain.size();
    const std::size_t card = net.variable(i).domain.size();

    std::vector<std::vector<double>> table;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(card);
      double total = 0.0;
      for (auto& x : row) {
        x = 0.05 + unif(rng);  // bounded away from zero
        total += x;
      }
      for (auto& x : row) x /= total;
      table.push_back(std::move(row));
    }
    if (parents.empty())
      net.set_prior("v" + std::to_string(i), table.front());
    else
      net.set_table("v" + std::to_string(i), parents, table);
  }
  return net;
}

/// Random DAG whose conditional rows are small ranks with a zero in
/// every row (a proper rank conditional).
inline RankNetwork random_rank_network(std::mt19937& rng, int n_vars, std::uint32_t max_rank = 3,
                                       int max_parents = 2) {
  RankNetwork net;
  std::uniform_int_distribution<std::uint32_t> rank_dist(0, max_rank);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n_vars; ++i)
    net.add_variable("v" + std::to_string(i), {"absent", "present"});
  for (int i = 0; i < n_vars; ++i) {
    std::vector<std::string> parents;
    for (int p = 0; p < i && static_cast<int>(parents.size()) < max_parents; ++p)
      if (unif(rng) < 0.4) parents.push_back("v" + std::to_string(p));

    std::size_t rows = std::size_t{1} << parents.size();
    std::vector<std::vector<Rank>> table;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<Rank> row{Rank(rank_dist(rng)), Rank(rank_dist(rng))};
      Rank m = min(row[0], row[1]);
      row[0] = row[0] - m;
      row[1] = row[1] - m;
      table.push_back(std::move(row));
    }
    if (parents.empty())
      net.set_prior("v" + std::to_string(i), table.front());
    else
      net.set_table("v" + std::to_string(i), parents, table);
  }
  return net;
}

/// Evidence on up to max_obs randomly chosen variables, excluding any
/// listed in `avoid`.
template <class S>
Evidence random_evidence(std::mt19937& rng, const BasicNetwork<S>& net, int max_obs,
                         const std::vector<std::string>& avoid = {}) {
  Evidence ev;
  std::uniform_int_distribution<int> var_dist(0, static_cast<int>(net.size()) - 1);
  std::uniform_int_distribution<int> count_dist(0, max_obs);
  const int want = count_dist(rng);
  for (int k = 0; k < want; ++k) {
    const Variable& v = net.variable(var_dist(rng));
    bool skip = false;
    for (const auto& a : avoid) skip |= (a == v.name);
    if (skip) continue;
    std::uniform_int_distribution<std::size_t> val_dist(0, v.domain.size() - 1);
    ev[v.name] = v.domain[val_dist(rng)];
  }
  return ev;
}

inline std::vector<std::string> all_variable_names(const Network& net) {
  std::vector<std::string> names;
  for (const auto& v : net.variables()) names.push_back(v.name);
  return names;
}

}  // namespace rbtest
