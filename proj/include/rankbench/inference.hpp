#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "rankbench/factor.hpp"

namespace rankbench {

/// Per-variable posterior under one algebra: probabilities summing to 1,
/// or ranks with minimum 0.
template <class S>
struct Posterior {
  std::string variable;
  std::vector<S> dist;  // aligned with the variable's domain order
};

namespace detail {

inline std::string evidence_to_string(const Evidence& ev) {
  std::string s = "{";
  for (const auto& [k, v] : ev) {
    if (s.size() > 1) s += ", ";
    s += k + "=" + v;
  }
  return s + "}";
}

template <class S>
std::vector<Factor<S>> evidence_reduced_factors(const BasicNetwork<S>& net, const Evidence& ev) {
  std::vector<Factor<S>> factors;
  factors.reserve(net.size());
  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    Factor<S> f = cpt_factor(net, i);
    for (const auto& [name, label] : ev) {
      int vi = net.index_of(name);
      if (f.contains(vi)) f = reduce(f, vi, net.variable(vi).value_index(label));
    }
    factors.push_back(std::move(f));
  }
  return factors;
}

/// Eliminates the given variables in order and combines whatever
/// remains into one factor. With an order covering all but one free
/// variable this yields that variable's unnormalized marginal; with a
/// full order it collapses to the scalar evidence weight.
template <class A, class S = typename A::value_type>
Factor<S> run_elimination(const BasicNetwork<S>& net, std::vector<Factor<S>> factors,
                          const std::vector<int>& order) {
  for (int var : order) {
    Factor<S> merged;
    bool first = true;
    std::vector<Factor<S>> rest;
    rest.reserve(factors.size());
    for (auto& f : factors) {
      if (f.contains(var)) {
        merged = first ? std::move(f) : combine<A>(merged, f, net);
        first = false;
      } else {
        rest.push_back(std::move(f));
      }
    }
    if (!first) rest.push_back(marginalize_out<A>(merged, var));
    factors = std::move(rest);
  }
  Factor<S> result;
  result.values = {A::unit()};
  for (const auto& f : factors) result = combine<A>(result, f, net);
  return result;
}

/// Posterior of a variable fixed by the evidence: certainty at the
/// observed value.
template <class A, class S = typename A::value_type>
Posterior<S> observed_posterior(const BasicNetwork<S>& net, int target, int observed) {
  std::vector<S> dist(net.variable(target).domain.size(), A::annihilator());
  dist[static_cast<std::size_t>(observed)] = A::unit();
  return Posterior<S>{net.variable(target).name, std::move(dist)};
}

}  // namespace detail

/// Min-fill ordering over all variables that are neither targets nor
/// evidence, ties broken toward the lexicographically smaller name.
template <class S>
std::vector<std::string> elimination_order(const BasicNetwork<S>& net, const Evidence& ev,
                                           const std::vector<std::string>& targets) {
  const int n = static_cast<int>(net.size());
  std::vector<bool> keep(static_cast<std::size_t>(n), false);
  for (const auto& t : targets) {
    int i = net.index_of(t);
    if (i < 0) throw DomainError("unknown target variable: " + t);
    keep[static_cast<std::size_t>(i)] = true;
  }
  std::vector<bool> observed(static_cast<std::size_t>(n), false);
  for (const auto& [name, label] : ev) {
    int i = net.index_of(name);
    if (i >= 0) observed[static_cast<std::size_t>(i)] = true;
  }

  // interaction graph of the evidence-reduced CPT scopes
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> scope;
    if (!observed[static_cast<std::size_t>(i)]) scope.push_back(i);
    for (const std::string& p : net.node(i).parents) {
      int pi = net.index_of(p);
      if (pi >= 0 && !observed[static_cast<std::size_t>(pi)]) scope.push_back(pi);
    }
    for (int a : scope)
      for (int b : scope)
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
  }

  std::vector<int> pending;
  for (int i = 0; i < n; ++i)
    if (!keep[static_cast<std::size_t>(i)] && !observed[static_cast<std::size_t>(i)])
      pending.push_back(i);

  std::vector<std::string> order;
  order.reserve(pending.size());
  while (!pending.empty()) {
    int best = -1;
    long best_fill = -1;
    for (int v : pending) {
      const auto& nb = adj[static_cast<std::size_t>(v)];
      long fill = 0;
      for (auto it = nb.begin(); it != nb.end(); ++it)
        for (auto jt = std::next(it); jt != nb.end(); ++jt)
          if (!adj[static_cast<std::size_t>(*it)].count(*jt)) ++fill;
      if (best < 0 || fill < best_fill ||
          (fill == best_fill && net.variable(v).name < net.variable(best).name)) {
        best = v;
        best_fill = fill;
      }
    }
    const auto nb = adj[static_cast<std::size_t>(best)];
    for (int a : nb)
      for (int b : nb)
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
    for (int a : nb) adj[static_cast<std::size_t>(a)].erase(best);
    adj[static_cast<std::size_t>(best)].clear();
    pending.erase(std::find(pending.begin(), pending.end(), best));
    order.push_back(net.variable(best).name);
  }
  return order;
}

/// Posterior of one target under an explicitly supplied elimination
/// order (used for order-invariance cross-checks).
template <class A, class S = typename A::value_type>
Posterior<S> posterior_marginal_with_order(const BasicNetwork<S>& net, const Evidence& ev,
                                           const std::string& target,
                                           const std::vector<std::string>& order) {
  int ti = net.index_of(target);
  if (ti < 0) throw DomainError("unknown target variable: " + target);
  auto observed = ev.find(target);
  if (observed != ev.end()) {
    std::vector<int> all;
    for (int i = 0; i < static_cast<int>(net.size()); ++i)
      if (!ev.count(net.variable(i).name)) all.push_back(i);
    auto weight = detail::run_elimination<A>(net, detail::evidence_reduced_factors(net, ev), all);
    if (!A::normalize(weight.values))
      throw ContradictoryEvidenceError("evidence has no support: " +
                                       detail::evidence_to_string(ev));
    return detail::observed_posterior<A>(net, ti, net.variable(ti).value_index(observed->second));
  }
  std::vector<int> order_idx;
  for (const auto& name : order) {
    int i = net.index_of(name);
    if (i < 0) throw DomainError("unknown variable in elimination order: " + name);
    if (i != ti && !ev.count(name)) order_idx.push_back(i);
  }
  auto values =
      detail::run_elimination<A>(net, detail::evidence_reduced_factors(net, ev), order_idx).values;
  if (!A::normalize(values))
    throw ContradictoryEvidenceError("evidence has no support: " +
                                     detail::evidence_to_string(ev));
  return Posterior<S>{target, std::move(values)};
}

/// Exact marginals for each target by factor elimination.
///
/// Sum-product instantiation returns P(target | ev); min-sum returns
/// kappa(target | ev), i.e. joint elimination followed by subtract-min.
/// Throws ContradictoryEvidenceError when the evidence has probability
/// zero (rank infinity).
template <class A, class S = typename A::value_type>
std::vector<Posterior<S>> posterior_marginals(const BasicNetwork<S>& net, const Evidence& ev,
                                              const std::vector<std::string>& targets) {
  check_evidence(net, ev);
  std::vector<Posterior<S>> out(targets.size());
  auto factors = detail::evidence_reduced_factors(net, ev);

  bool consistency_checked = false;
  std::vector<std::size_t> observed_targets;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto& target = targets[t];
    int ti = net.index_of(target);
    if (ti < 0) throw DomainError("unknown target variable: " + target);
    if (ev.count(target)) {
      observed_targets.push_back(t);
      continue;
    }
    auto order = elimination_order(net, ev, {target});
    std::vector<int> order_idx;
    for (const auto& name : order) order_idx.push_back(net.index_of(name));
    auto values = detail::run_elimination<A>(net, factors, order_idx).values;
    if (!A::normalize(values))
      throw ContradictoryEvidenceError("evidence has no support: " +
                                       detail::evidence_to_string(ev));
    consistency_checked = true;
    out[t] = Posterior<S>{target, std::move(values)};
  }

  if (!observed_targets.empty()) {
    if (!consistency_checked) {
      std::vector<int> all;
      for (int i = 0; i < static_cast<int>(net.size()); ++i)
        if (!ev.count(net.variable(i).name)) all.push_back(i);
      auto weight = detail::run_elimination<A>(net, factors, all);
      if (!A::normalize(weight.values))
        throw ContradictoryEvidenceError("evidence has no support: " +
                                         detail::evidence_to_string(ev));
    }
    for (std::size_t t : observed_targets) {
      int ti = net.index_of(targets[t]);
      out[t] = detail::observed_posterior<A>(net, ti,
                                             net.variable(ti).value_index(ev.at(targets[t])));
    }
  }
  return out;
}

/// Same contract as posterior_marginals, computed by full joint
/// enumeration. Refuses state spaces above 2^20 joint assignments.
template <class A, class S = typename A::value_type>
std::vector<Posterior<S>> enumerate_oracle(const BasicNetwork<S>& net, const Evidence& ev,
                                           const std::vector<std::string>& targets) {
  check_evidence(net, ev);
  const int n = static_cast<int>(net.size());
  std::size_t states = 1;
  for (int i = 0; i < n; ++i) {
    states *= net.variable(i).domain.size();
    if (states > (std::size_t{1} << 20))
      throw StateSpaceError("joint state space exceeds 2^20 assignments");
  }
  if (targets.empty()) return {};

  std::vector<Factor<S>> cpts;
  cpts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cpts.push_back(cpt_factor(net, i));

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  std::vector<int> fixed(static_cast<std::size_t>(n), -1);
  for (const auto& [name, label] : ev) {
    int i = net.index_of(name);
    fixed[static_cast<std::size_t>(i)] = net.variable(i).value_index(label);
    assign[static_cast<std::size_t>(i)] = fixed[static_cast<std::size_t>(i)];
  }

  std::vector<int> target_idx;
  for (const auto& t : targets) {
    int i = net.index_of(t);
    if (i < 0) throw DomainError("unknown target variable: " + t);
    target_idx.push_back(i);
  }
  std::vector<std::vector<S>> acc;
  for (int ti : target_idx)
    acc.emplace_back(net.variable(ti).domain.size(), A::annihilator());

  std::vector<int> free_vars;
  for (int i = 0; i < n; ++i)
    if (fixed[static_cast<std::size_t>(i)] < 0) free_vars.push_back(i);

  bool done = false;
  while (!done) {
    S w = A::unit();
    for (const auto& f : cpts) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < f.scope.size(); ++k)
        idx = idx * static_cast<std::size_t>(f.card[k]) +
              static_cast<std::size_t>(assign[static_cast<std::size_t>(f.scope[k])]);
      w = A::combine(w, f.values[idx]);
    }
    for (std::size_t t = 0; t < target_idx.size(); ++t) {
      auto v = static_cast<std::size_t>(assign[static_cast<std::size_t>(target_idx[t])]);
      acc[t][v] = A::marginalize(acc[t][v], w);
    }
    done = true;
    for (std::size_t k = free_vars.size(); k-- > 0;) {
      auto i = static_cast<std::size_t>(free_vars[k]);
      if (++assign[i] < static_cast<int>(net.variable(free_vars[k]).domain.size())) {
        done = false;
        break;
      }
      assign[i] = 0;
    }
  }

  std::vector<Posterior<S>> out;
  for (std::size_t t = 0; t < target_idx.size(); ++t) {
    if (!A::normalize(acc[t]))
      throw ContradictoryEvidenceError("evidence has no support: " +
                                       detail::evidence_to_string(ev));
    out.push_back(Posterior<S>{targets[t], std::move(acc[t])});
  }
  return out;
}

}  // namespace rankbench
