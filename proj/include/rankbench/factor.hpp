#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "rankbench/algebra.hpp"
#include "rankbench/model.hpp"

namespace rankbench {

/// Table over the joint assignments of a variable subset. Values are
/// laid out row-major with the first scope variable most significant,
/// so a CPT factor with scope (parents..., child) stores its rows in
/// lexicographic parent-configuration order, concatenated.
template <class S>
struct Factor {
  std::vector<int> scope;  // variable indices
  std::vector<int> card;   // domain size per scope position
  std::vector<S> values;

  std::size_t table_size() const {
    std::size_t n = 1;
    for (int c : card) n *= static_cast<std::size_t>(c);
    return n;
  }
  bool contains(int var) const {
    return std::find(scope.begin(), scope.end(), var) != scope.end();
  }
};

/// CPT of variable i as a factor with scope (parents..., i).
template <class S>
Factor<S> cpt_factor(const BasicNetwork<S>& net, int i) {
  Factor<S> f;
  for (const std::string& p : net.node(i).parents) f.scope.push_back(net.index_of(p));
  f.scope.push_back(i);
  for (int v : f.scope) f.card.push_back(static_cast<int>(net.variable(v).domain.size()));
  for (const auto& row : compiled_cpt(net, i))
    f.values.insert(f.values.end(), row.begin(), row.end());
  return f;
}

namespace detail {

/// Strides of each source-scope variable inside a target enumeration:
/// strides[k] advances the source index when target position k ticks.
template <class S>
std::vector<std::size_t> strides_into(const Factor<S>& source, const std::vector<int>& target_scope) {
  std::vector<std::size_t> src_stride(source.scope.size());
  std::size_t s = 1;
  for (std::size_t k = source.scope.size(); k-- > 0;) {
    src_stride[k] = s;
    s *= static_cast<std::size_t>(source.card[k]);
  }
  std::vector<std::size_t> out(target_scope.size(), 0);
  for (std::size_t k = 0; k < target_scope.size(); ++k) {
    auto it = std::find(source.scope.begin(), source.scope.end(), target_scope[k]);
    if (it != source.scope.end())
      out[k] = src_stride[static_cast<std::size_t>(it - source.scope.begin())];
  }
  return out;
}

}  // namespace detail

/// Pointwise combination over the union scope (ascending variable index).
template <class A, class S = typename A::value_type>
Factor<S> combine(const Factor<S>& a, const Factor<S>& b, const BasicNetwork<S>& net) {
  Factor<S> r;
  r.scope = a.scope;
  for (int v : b.scope)
    if (!a.contains(v)) r.scope.push_back(v);
  std::sort(r.scope.begin(), r.scope.end());
  for (int v : r.scope) r.card.push_back(static_cast<int>(net.variable(v).domain.size()));

  const auto sa = detail::strides_into(a, r.scope);
  const auto sb = detail::strides_into(b, r.scope);
  const std::size_t n = r.table_size();
  r.values.resize(n);

  std::vector<int> assign(r.scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    r.values[idx] = A::combine(a.values[ia], b.values[ib]);
    for (std::size_t k = r.scope.size(); k-- > 0;) {
      if (++assign[k] < r.card[k]) {
        ia += sa[k];
        ib += sb[k];
        break;
      }
      ia -= sa[k] * static_cast<std::size_t>(r.card[k] - 1);
      ib -= sb[k] * static_cast<std::size_t>(r.card[k] - 1);
      assign[k] = 0;
    }
  }
  return r;
}

/// Removes one variable from the scope by accumulating over its values.
template <class A, class S = typename A::value_type>
Factor<S> marginalize_out(const Factor<S>& f, int var) {
  auto pos_it = std::find(f.scope.begin(), f.scope.end(), var);
  const std::size_t pos = static_cast<std::size_t>(pos_it - f.scope.begin());

  Factor<S> r;
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    if (k == pos) continue;
    r.scope.push_back(f.scope[k]);
    r.card.push_back(f.card[k]);
  }
  r.values.assign(r.table_size(), A::annihilator());

  const auto dst = detail::strides_into(r, f.scope);  // var position maps to stride 0
  std::vector<int> assign(f.scope.size(), 0);
  std::size_t out = 0;
  const std::size_t n = f.table_size();
  for (std::size_t idx = 0; idx < n; ++idx) {
    r.values[out] = A::marginalize(r.values[out], f.values[idx]);
    for (std::size_t k = f.scope.size(); k-- > 0;) {
      if (++assign[k] < f.card[k]) {
        out += dst[k];
        break;
      }
      out -= dst[k] * static_cast<std::size_t>(f.card[k] - 1);
      assign[k] = 0;
    }
  }
  return r;
}

/// Slices the factor at var = value, dropping var from the scope.
template <class S>
Factor<S> reduce(const Factor<S>& f, int var, int value) {
  auto pos_it = std::find(f.scope.begin(), f.scope.end(), var);
  if (pos_it == f.scope.end()) return f;
  const std::size_t pos = static_cast<std::size_t>(pos_it - f.scope.begin());

  Factor<S> r;
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    if (k == pos) continue;
    r.scope.push_back(f.scope[k]);
    r.card.push_back(f.card[k]);
  }
  r.values.reserve(r.table_size());

  std::vector<std::size_t> stride(f.scope.size());
  std::size_t s = 1;
  for (std::size_t k = f.scope.size(); k-- > 0;) {
    stride[k] = s;
    s *= static_cast<std::size_t>(f.card[k]);
  }
  std::vector<int> assign(r.scope.size(), 0);
  const std::size_t n = r.table_size();
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t src = stride[pos] * static_cast<std::size_t>(value);
    std::size_t k_src = 0;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
      if (k == pos) continue;
      src += stride[k] * static_cast<std::size_t>(assign[k_src++]);
    }
    r.values.push_back(f.values[src]);
    for (std::size_t k = r.scope.size(); k-- > 0;) {
      if (++assign[k] < r.card[k]) break;
      assign[k] = 0;
    }
  }
  return r;
}

}  // namespace rankbench
