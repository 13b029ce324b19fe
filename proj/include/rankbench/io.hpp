#pragma once

#include <map>
#include <string>
#include <vector>

#include "rankbench/car.hpp"
#include "rankbench/model.hpp"

namespace rankbench {

// JSON file formats. A network file carries `variables` (name, domain)
// and `nodes` (name, parents, kind, payload); kinds are "prior",
// "table", "noisy-or" and "noisy-max". Rank networks use the same
// schema with integer entries and "inf" for infinity, and support only
// "prior" and "table". Reading a written file reproduces the network
// exactly.

Network read_network(const std::string& path);
void write_network(const Network& net, const std::string& path);

RankNetwork read_rank_network(const std::string& path);
void write_rank_network(const RankNetwork& net, const std::string& path);

// Case files are lists of {case-id, true-fault, n-findings, evidence}.
std::vector<TestCase> read_cases(const std::string& path);
void write_cases(const std::vector<TestCase>& cases, const std::string& path);

// Prior-override files map diagnosis name to probability.
std::map<std::string, double> read_prior_overrides(const std::string& path);

// Subset files are arrays of case ids.
std::vector<std::string> read_case_subset(const std::string& path);

}  // namespace rankbench
