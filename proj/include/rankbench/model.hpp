#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rankbench/rank.hpp"

namespace rankbench {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ContradictoryEvidenceError : Error {
  using Error::Error;
};
struct StateSpaceError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

/// Discrete variable with an ordered domain of value labels.
/// Binary variables use {absent, present}.
struct Variable {
  std::string name;
  std::vector<std::string> domain;

  int value_index(const std::string& label) const {
    auto it = std::find(domain.begin(), domain.end(), label);
    return it == domain.end() ? -1 : static_cast<int>(it - domain.begin());
  }
};

/// Distribution for a source variable.
template <class S>
struct PriorSpec {
  std::vector<S> dist;
};

/// Explicit conditional table: one row per parent configuration, parent
/// configurations enumerated lexicographically (first declared parent
/// most significant), each row a distribution over the child domain.
template <class S>
struct TableSpec {
  std::vector<std::vector<S>> rows;
};

/// Independent-causation model over binary parents and a binary effect:
/// the effect is absent iff the leak and every present cause fail to
/// trigger it, each independently.
struct NoisyOrSpec {
  std::vector<double> strengths;  // per parent, in declared parent order
  double leak = 0.0;
};

/// Multi-valued generalization: each parent, in its current state,
/// independently draws an effect level from strengths[parent][state];
/// the leak draws from its own distribution; the observed effect is the
/// maximum drawn level under the effect-domain order.
struct NoisyMaxSpec {
  // strengths[parent][parent_value] = distribution over effect levels
  std::vector<std::vector<std::vector<double>>> strengths;
  std::vector<double> leak;  // distribution over effect levels
};

template <class S>
using ConditionalSpec = std::variant<PriorSpec<S>, TableSpec<S>, NoisyOrSpec, NoisyMaxSpec>;

template <class S>
struct Node {
  std::vector<std::string> parents;
  ConditionalSpec<S> spec;
};

/// Observed findings: variable name -> value label.
using Evidence = std::map<std::string, std::string>;

/// A directed network of discrete variables with one conditional spec
/// per variable. Immutable after validation; concurrent reads are safe.
template <class S>
class BasicNetwork {
 public:
  using scalar_type = S;

  int add_variable(std::string name, std::vector<std::string> domain) {
    int idx = static_cast<int>(variables_.size());
    index_.emplace(name, idx);
    variables_.push_back(Variable{std::move(name), std::move(domain)});
    nodes_.emplace_back();
    return idx;
  }

  void set_prior(const std::string& name, std::vector<S> dist) {
    Node<S>& n = node_for(name);
    n.parents.clear();
    n.spec = PriorSpec<S>{std::move(dist)};
  }
  void set_table(const std::string& name, std::vector<std::string> parents,
                 std::vector<std::vector<S>> rows) {
    Node<S>& n = node_for(name);
    n.parents = std::move(parents);
    n.spec = TableSpec<S>{std::move(rows)};
  }
  void set_noisy_or(const std::string& name, std::vector<std::string> parents,
                    std::vector<double> strengths, double leak) {
    Node<S>& n = node_for(name);
    n.parents = std::move(parents);
    n.spec = NoisyOrSpec{std::move(strengths), leak};
  }
  void set_noisy_max(const std::string& name, std::vector<std::string> parents,
                     std::vector<std::vector<std::vector<double>>> strengths,
                     std::vector<double> leak) {
    Node<S>& n = node_for(name);
    n.parents = std::move(parents);
    n.spec = NoisyMaxSpec{std::move(strengths), std::move(leak)};
  }

  std::size_t size() const { return variables_.size(); }
  const Variable& variable(int i) const { return variables_[static_cast<std::size_t>(i)]; }
  const std::vector<Variable>& variables() const { return variables_; }
  const Node<S>& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::vector<Node<S>>& nodes() { return nodes_; }
  const std::vector<Node<S>>& nodes() const { return nodes_; }

  /// -1 when the name is not declared.
  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }
  bool has_variable(const std::string& name) const { return index_.count(name) != 0; }

 private:
  Node<S>& node_for(const std::string& name) {
    int i = index_of(name);
    if (i < 0) throw DomainError("unknown variable: " + name);
    return nodes_[static_cast<std::size_t>(i)];
  }

  std::vector<Variable> variables_;
  std::vector<Node<S>> nodes_;
  std::unordered_map<std::string, int> index_;
};

using Network = BasicNetwork<double>;
using RankNetwork = BasicNetwork<Rank>;

/// Findings of a structural check. Empty means valid.
struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

inline constexpr double kRowSumTolerance = 1e-12;

std::vector<std::vector<double>> compile_noisy_or(const NoisyOrSpec& spec, int parent_count);
std::vector<std::vector<double>> compile_noisy_max(const NoisyMaxSpec& spec,
                                                   const std::vector<int>& parent_cards,
                                                   int effect_card);

ValidationReport validate(const Network& net);
ValidationReport validate(const RankNetwork& net);

/// Parent domain sizes of variable i, in declared parent order.
/// Requires declared parents (validated networks only).
template <class S>
std::vector<int> parent_cards(const BasicNetwork<S>& net, int i) {
  std::vector<int> cards;
  for (const std::string& p : net.node(i).parents) {
    int pi = net.index_of(p);
    if (pi < 0) throw ValidationError("undeclared parent: " + p);
    cards.push_back(static_cast<int>(net.variable(pi).domain.size()));
  }
  return cards;
}

/// The variable's conditional distribution as an explicit table,
/// compiling noisy specs on demand. Rank networks carry tables only.
template <class S>
std::vector<std::vector<S>> compiled_cpt(const BasicNetwork<S>& net, int i) {
  const Node<S>& n = net.node(i);
  if (const auto* p = std::get_if<PriorSpec<S>>(&n.spec)) return {p->dist};
  if (const auto* t = std::get_if<TableSpec<S>>(&n.spec)) return t->rows;
  if constexpr (std::is_same_v<S, double>) {
    if (const auto* o = std::get_if<NoisyOrSpec>(&n.spec))
      return compile_noisy_or(*o, static_cast<int>(n.parents.size()));
    const auto& m = std::get<NoisyMaxSpec>(n.spec);
    return compile_noisy_max(m, parent_cards(net, i),
                             static_cast<int>(net.variable(i).domain.size()));
  } else {
    throw ValidationError("noisy conditional on a rank network: " + net.variable(i).name);
  }
}

/// Variables in a parents-before-children order.
/// Throws ValidationError on cycles or undeclared parents.
template <class S>
std::vector<int> topological_order(const BasicNetwork<S>& net) {
  const int n = static_cast<int>(net.size());
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const std::string& p : net.node(i).parents) {
      int pi = net.index_of(p);
      if (pi < 0) throw ValidationError("undeclared parent: " + p);
      children[static_cast<std::size_t>(pi)].push_back(i);
      ++indegree[static_cast<std::size_t>(i)];
    }
  }
  std::vector<int> ready, order;
  for (int i = 0; i < n; ++i)
    if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (order.size() != static_cast<std::size_t>(n))
    throw ValidationError("parent relation contains a cycle");
  return order;
}

/// Checks evidence labels against declared domains.
template <class S>
void check_evidence(const BasicNetwork<S>& net, const Evidence& ev) {
  for (const auto& [name, label] : ev) {
    int i = net.index_of(name);
    if (i < 0) throw DomainError("evidence on unknown variable: " + name);
    if (net.variable(i).value_index(label) < 0)
      throw DomainError("evidence value '" + label + "' not in domain of " + name);
  }
}

}  // namespace rankbench
