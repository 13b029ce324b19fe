#include "rankbench/model.hpp"

#include <cmath>
#include <set>

namespace rankbench {

std::vector<std::vector<double>> compile_noisy_or(const NoisyOrSpec& spec, int parent_count) {
  if (static_cast<int>(spec.strengths.size()) != parent_count)
    throw ValidationError("noisy-or strength count does not match parent count");
  if (!(spec.leak >= 0.0 && spec.leak <= 1.0))
    throw ValidationError("noisy-or leak outside [0, 1]");
  for (double c : spec.strengths)
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("noisy-or strength outside [0, 1]");

  std::vector<std::vector<double>> rows;
  const std::size_t configs = std::size_t{1} << parent_count;
  rows.reserve(configs);
  for (std::size_t cfg = 0; cfg < configs; ++cfg) {
    double absent = 1.0 - spec.leak;
    for (int i = 0; i < parent_count; ++i)
      if ((cfg >> (parent_count - 1 - i)) & 1)  // first parent most significant
        absent *= 1.0 - spec.strengths[static_cast<std::size_t>(i)];
    rows.push_back({absent, 1.0 - absent});
  }
  return rows;
}

std::vector<std::vector<double>> compile_noisy_max(const NoisyMaxSpec& spec,
                                                   const std::vector<int>& parent_cards,
                                                   int effect_card) {
  auto check_dist = [effect_card](const std::vector<double>& d, const char* what) {
    if (static_cast<int>(d.size()) != effect_card)
      throw ValidationError(std::string("noisy-max ") + what +
                            " vector length does not match effect domain");
    double sum = 0.0;
    for (double x : d) {
      if (!(x >= 0.0 && x <= 1.0))
        throw ValidationError(std::string("noisy-max ") + what + " entry outside [0, 1]");
      sum += x;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw ValidationError(std::string("noisy-max ") + what + " vector is not a distribution");
  };

  if (spec.strengths.size() != parent_cards.size())
    throw ValidationError("noisy-max strength count does not match parent count");
  for (std::size_t p = 0; p < spec.strengths.size(); ++p) {
    if (static_cast<int>(spec.strengths[p].size()) != parent_cards[p])
      throw ValidationError("noisy-max per-value strengths do not match a parent domain");
    for (const auto& vec : spec.strengths[p]) check_dist(vec, "strength");
  }
  check_dist(spec.leak, "leak");

  // cumulative form: P(effect <= L) multiplies across independent draws
  auto cdf = [effect_card](const std::vector<double>& d) {
    std::vector<double> c(static_cast<std::size_t>(effect_card));
    double acc = 0.0;
    for (int l = 0; l < effect_card; ++l) {
      acc += d[static_cast<std::size_t>(l)];
      c[static_cast<std::size_t>(l)] = acc;
    }
    return c;
  };
  std::vector<std::vector<std::vector<double>>> strength_cdf(spec.strengths.size());
  for (std::size_t p = 0; p < spec.strengths.size(); ++p)
    for (const auto& vec : spec.strengths[p]) strength_cdf[p].push_back(cdf(vec));
  const std::vector<double> leak_cdf = cdf(spec.leak);

  std::size_t configs = 1;
  for (int c : parent_cards) configs *= static_cast<std::size_t>(c);

  std::vector<std::vector<double>> rows;
  rows.reserve(configs);
  std::vector<int> state(parent_cards.size(), 0);
  for (std::size_t cfg = 0; cfg < configs; ++cfg) {
    std::vector<double> row(static_cast<std::size_t>(effect_card));
    double below = 0.0;
    for (int l = 0; l < effect_card; ++l) {
      double at_most = leak_cdf[static_cast<std::size_t>(l)];
      for (std::size_t p = 0; p < state.size(); ++p)
        at_most *= strength_cdf[p][static_cast<std::size_t>(state[p])][static_cast<std::size_t>(l)];
      row[static_cast<std::size_t>(l)] = at_most - below;
      below = at_most;
    }
    rows.push_back(std::move(row));
    for (std::size_t k = state.size(); k-- > 0;) {
      if (++state[k] < parent_cards[k]) break;
      state[k] = 0;
    }
  }
  return rows;
}

namespace {

template <class S>
void check_structure(const BasicNetwork<S>& net, ValidationReport& report) {
  std::set<std::string> names;
  for (const Variable& v : net.variables()) {
    if (!names.insert(v.name).second) report.problems.push_back("duplicate variable: " + v.name);
    if (v.domain.size() < 2)
      report.problems.push_back("domain of " + v.name + " has fewer than 2 values");
    std::set<std::string> labels(v.domain.begin(), v.domain.end());
    if (labels.size() != v.domain.size())
      report.problems.push_back("domain of " + v.name + " has duplicate values");
  }

  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    const auto& node = net.node(i);
    const std::string& name = net.variable(i).name;
    std::set<std::string> seen;
    for (const std::string& p : node.parents) {
      if (net.index_of(p) < 0)
        report.problems.push_back("undeclared parent '" + p + "' of " + name);
      if (!seen.insert(p).second)
        report.problems.push_back("duplicate parent '" + p + "' of " + name);
    }
  }

  // cycle check over resolvable edges only
  const int n = static_cast<int>(net.size());
  std::vector<int> color(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (const std::string& p : net.node(i).parents) {
      int pi = net.index_of(p);
      if (pi >= 0) parents[static_cast<std::size_t>(i)].push_back(pi);
    }
  bool cyclic = false;
  auto dfs = [&](auto&& self, int v) -> void {
    color[static_cast<std::size_t>(v)] = 1;
    for (int p : parents[static_cast<std::size_t>(v)]) {
      if (color[static_cast<std::size_t>(p)] == 1) cyclic = true;
      else if (color[static_cast<std::size_t>(p)] == 0) self(self, p);
    }
    color[static_cast<std::size_t>(v)] = 2;
  };
  for (int i = 0; i < n && !cyclic; ++i)
    if (color[static_cast<std::size_t>(i)] == 0) dfs(dfs, i);
  if (cyclic) report.problems.push_back("parent relation contains a cycle");
}

std::size_t expected_rows(const Network& net, int i, bool& resolvable) {
  std::size_t rows = 1;
  resolvable = true;
  for (const std::string& p : net.node(i).parents) {
    int pi = net.index_of(p);
    if (pi < 0) {
      resolvable = false;
      return 0;
    }
    rows *= net.variable(pi).domain.size();
  }
  return rows;
}

}  // namespace

ValidationReport validate(const Network& net) {
  ValidationReport report;
  check_structure(net, report);

  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    const Node<double>& node = net.node(i);
    const std::string& name = net.variable(i).name;
    const std::size_t card = net.variable(i).domain.size();
    bool resolvable = true;
    const std::size_t rows = expected_rows(net, i, resolvable);

    auto check_row = [&](const std::vector<double>& row, std::size_t r) {
      if (row.size() != card) {
        report.problems.push_back("row " + std::to_string(r) + " of " + name +
                                  " does not match the domain size");
        return;
      }
      double sum = 0.0;
      for (double x : row) {
        if (!(x >= 0.0 && x <= 1.0))
          report.problems.push_back("row " + std::to_string(r) + " of " + name +
                                    " has an entry outside [0, 1]");
        sum += x;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        report.problems.push_back("row " + std::to_string(r) + " of " + name +
                                  " sums to " + std::to_string(sum) + ", not 1");
    };

    if (const auto* p = std::get_if<PriorSpec<double>>(&node.spec)) {
      if (!node.parents.empty())
        report.problems.push_back(name + " has a prior spec but declares parents");
      check_row(p->dist, 0);
    } else if (const auto* t = std::get_if<TableSpec<double>>(&node.spec)) {
      if (resolvable && t->rows.size() != rows)
        report.problems.push_back(name + " has " + std::to_string(t->rows.size()) +
                                  " rows, expected " + std::to_string(rows));
      for (std::size_t r = 0; r < t->rows.size(); ++r) check_row(t->rows[r], r);
    } else if (const auto* o = std::get_if<NoisyOrSpec>(&node.spec)) {
      if (card != 2) report.problems.push_back("noisy-or effect " + name + " is not binary");
      for (const std::string& pn : node.parents) {
        int pi = net.index_of(pn);
        if (pi >= 0 && net.variable(pi).domain.size() != 2)
          report.problems.push_back("noisy-or parent " + pn + " of " + name + " is not binary");
      }
      if (o->strengths.size() != node.parents.size())
        report.problems.push_back("noisy-or strength count of " + name +
                                  " does not match its parents");
      for (double c : o->strengths)
        if (!(c >= 0.0 && c <= 1.0))
          report.problems.push_back("noisy-or strength of " + name + " outside [0, 1]");
      if (!(o->leak >= 0.0 && o->leak <= 1.0))
        report.problems.push_back("noisy-or leak of " + name + " outside [0, 1]");
    } else if (const auto* m = std::get_if<NoisyMaxSpec>(&node.spec)) {
      if (!resolvable) continue;
      try {
        compile_noisy_max(*m, parent_cards(net, i), static_cast<int>(card));
      } catch (const ValidationError& e) {
        report.problems.push_back(name + ": " + e.what());
      }
    }
  }
  return report;
}

ValidationReport validate(const RankNetwork& net) {
  ValidationReport report;
  check_structure(net, report);

  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    const Node<Rank>& node = net.node(i);
    const std::string& name = net.variable(i).name;
    const std::size_t card = net.variable(i).domain.size();

    auto check_row = [&](const std::vector<Rank>& row, std::size_t r) {
      if (row.size() != card) {
        report.problems.push_back("row " + std::to_string(r) + " of " + name +
                                  " does not match the domain size");
        return;
      }
      bool any_finite = false;
      for (Rank x : row) any_finite |= x.is_finite();
      if (!any_finite)
        report.problems.push_back("row " + std::to_string(r) + " of " + name +
                                  " is entirely infinite");
    };

    if (const auto* p = std::get_if<PriorSpec<Rank>>(&node.spec)) {
      if (!node.parents.empty())
        report.problems.push_back(name + " has a prior spec but declares parents");
      check_row(p->dist, 0);
    } else if (const auto* t = std::get_if<TableSpec<Rank>>(&node.spec)) {
      bool resolvable = true;
      std::size_t rows = 1;
      for (const std::string& pn : node.parents) {
        int pi = net.index_of(pn);
        if (pi < 0) resolvable = false;
        else rows *= net.variable(pi).domain.size();
      }
      if (resolvable && t->rows.size() != rows)
        report.problems.push_back(name + " has " + std::to_string(t->rows.size()) +
                                  " rows, expected " + std::to_string(rows));
      for (std::size_t r = 0; r < t->rows.size(); ++r) check_row(t->rows[r], r);
    } else {
      report.problems.push_back(name + " uses a noisy spec, which rank networks do not support");
    }
  }
  return report;
}

}  // namespace rankbench
