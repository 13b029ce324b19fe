#include "rankbench/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace rankbench {

namespace {

// Region membership with a hair of relative slack, so entries produced
// by decimal literals and short products (1 - 0.9, 0.1 * 0.1) land in
// the region exact arithmetic would give despite double rounding.
// Candidates are tried in ascending kappa order, which resolves the
// shared boundary pi = eps^k to k - 1, matching the strict upper
// inequality.
constexpr double kRegionSlack = 1e-11;

bool region_holds(double eps, long k, double pi) {
  const double hi = std::pow(eps, static_cast<double>(k));
  const double lo = std::pow(eps, static_cast<double>(k + 1));
  return hi * (1.0 + kRegionSlack) > pi && pi >= lo * (1.0 - kRegionSlack);
}

}  // namespace

Rank kappa_map(double pi, const ConversionPolicy& policy) {
  const double eps = policy.epsilon;
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("probability must lie in [0, 1]");
  if (pi == 0.0) return Rank::infinity();
  if (pi == 1.0) return Rank(0);

  // log-based guess, then settle on the defining inequality itself so
  // boundary entries land in the region pow() agrees with
  const double t = std::log(pi) / std::log(eps);
  if (t > 4e9) throw DomainError("epsilon too close to 1 for this probability");
  const long guess = static_cast<long>(std::floor(t));
  for (long k = std::max(0L, guess - 2); k <= guess + 2; ++k)
    if (region_holds(eps, k, pi)) return Rank(static_cast<std::uint32_t>(k));
  for (long k = std::max(0L, guess - 64);; ++k) {
    if (region_holds(eps, k, pi)) return Rank(static_cast<std::uint32_t>(k));
    if (k > guess + 4096) throw DomainError("kappa region search failed");
  }
}

namespace {

std::vector<Rank> map_row(const std::vector<double>& row, const ConversionPolicy& policy) {
  std::vector<Rank> out;
  out.reserve(row.size());
  for (double p : row) out.push_back(kappa_map(p, policy));
  return out;
}

/// Rank table for a noisy-OR whose parameters, not compiled entries,
/// are discretized: surprise of the effect staying absent adds up over
/// present causes; surprise of it being present is the least surprising
/// single trigger.
std::vector<std::vector<Rank>> parameter_rank_noisy_or(const NoisyOrSpec& spec,
                                                       const ConversionPolicy& policy) {
  const int n = static_cast<int>(spec.strengths.size());
  std::vector<Rank> on(spec.strengths.size()), off(spec.strengths.size());
  for (std::size_t i = 0; i < spec.strengths.size(); ++i) {
    on[i] = kappa_map(spec.strengths[i], policy);
    off[i] = kappa_map(1.0 - spec.strengths[i], policy);
  }
  const Rank leak_on = kappa_map(spec.leak, policy);
  const Rank leak_off = kappa_map(1.0 - spec.leak, policy);

  std::vector<std::vector<Rank>> rows;
  const std::size_t configs = std::size_t{1} << n;
  rows.reserve(configs);
  for (std::size_t cfg = 0; cfg < configs; ++cfg) {
    Rank absent = leak_off;
    Rank present = leak_on;
    for (int i = 0; i < n; ++i) {
      bool is_present = (cfg >> (n - 1 - i)) & 1;  // first parent most significant
      if (is_present) {
        absent += off[static_cast<std::size_t>(i)];
        present = min(present, on[static_cast<std::size_t>(i)]);
      }
    }
    rows.push_back({absent, present});
  }
  return rows;
}

/// Rank table for a parameter-converted noisy-MAX: minimize total draw
/// surprise over all draw combinations whose maximum is the level.
std::vector<std::vector<Rank>> parameter_rank_noisy_max(const NoisyMaxSpec& spec,
                                                        const std::vector<int>& parent_cards,
                                                        int effect_card,
                                                        const ConversionPolicy& policy) {
  const std::size_t np = spec.strengths.size();
  std::vector<std::vector<std::vector<Rank>>> s(np);
  for (std::size_t p = 0; p < np; ++p) {
    s[p].resize(spec.strengths[p].size());
    for (std::size_t v = 0; v < spec.strengths[p].size(); ++v)
      s[p][v] = map_row(spec.strengths[p][v], policy);
  }
  std::vector<Rank> leak = map_row(spec.leak, policy);

  std::size_t configs = 1;
  for (int c : parent_cards) configs *= static_cast<std::size_t>(c);

  std::vector<std::vector<Rank>> rows;
  rows.reserve(configs);
  std::vector<int> state(np, 0);
  for (std::size_t cfg = 0; cfg < configs; ++cfg) {
    std::vector<Rank> row(static_cast<std::size_t>(effect_card), Rank::infinity());
    std::vector<int> draw(np + 1, 0);  // per-cause level, leak last
    bool done = false;
    while (!done) {
      int level = 0;
      Rank cost(0);
      for (std::size_t p = 0; p < np; ++p) {
        level = std::max(level, draw[p]);
        cost += s[p][static_cast<std::size_t>(state[p])][static_cast<std::size_t>(draw[p])];
      }
      level = std::max(level, draw[np]);
      cost += leak[static_cast<std::size_t>(draw[np])];
      auto& cell = row[static_cast<std::size_t>(level)];
      cell = min(cell, cost);
      done = true;
      for (std::size_t k = np + 1; k-- > 0;) {
        if (++draw[k] < effect_card) {
          done = false;
          break;
        }
        draw[k] = 0;
      }
    }
    rows.push_back(std::move(row));
    for (std::size_t k = np; k-- > 0;) {
      if (++state[k] < parent_cards[k]) break;
      state[k] = 0;
    }
  }
  return rows;
}

}  // namespace

RankNetwork convert_network(const Network& net, const ConversionPolicy& policy) {
  ValidationReport report = validate(net);
  if (!report.ok()) throw ValidationError("invalid network: " + report.problems.front());

  RankNetwork out;
  for (const Variable& v : net.variables()) out.add_variable(v.name, v.domain);
  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    const Node<double>& n = net.node(i);
    const std::string& name = net.variable(i).name;
    if (policy.convert_parameters) {
      if (const auto* o = std::get_if<NoisyOrSpec>(&n.spec)) {
        out.set_table(name, n.parents, parameter_rank_noisy_or(*o, policy));
        continue;
      }
      if (const auto* m = std::get_if<NoisyMaxSpec>(&n.spec)) {
        out.set_table(name, n.parents,
                      parameter_rank_noisy_max(*m, parent_cards(net, i),
                                               static_cast<int>(net.variable(i).domain.size()),
                                               policy));
        continue;
      }
    }
    std::vector<std::vector<Rank>> rows;
    for (const auto& row : compiled_cpt(net, i)) rows.push_back(map_row(row, policy));
    if (n.parents.empty())
      out.set_prior(name, std::move(rows.front()));
    else
      out.set_table(name, n.parents, std::move(rows));
  }
  return out;
}

bool PlausibleSet::contains(const std::string& id) const {
  return std::find(members.begin(), members.end(), id) != members.end();
}

PlausibleSet plausible_set(const std::vector<std::pair<std::string, Rank>>& ranks) {
  if (ranks.empty()) throw DomainError("plausible set of an empty hypothesis set");
  Rank best = Rank::infinity();
  for (const auto& [id, r] : ranks) best = min(best, r);
  PlausibleSet out{{}, best};
  for (const auto& [id, r] : ranks)
    if (r == best) out.members.push_back(id);
  return out;
}

double probability_score(const PlausibleSet& set, const std::string& true_fault) {
  if (!set.contains(true_fault)) return 0.0;
  return 1.0 / static_cast<double>(set.members.size());
}

Network kappa_as_probability(const RankNetwork& net, double base) {
  if (!(base > 0.0 && base < 1.0)) throw DomainError("base must lie in (0, 1)");

  Network out;
  for (const Variable& v : net.variables()) out.add_variable(v.name, v.domain);
  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    const Node<Rank>& n = net.node(i);
    const std::string& name = net.variable(i).name;
    std::vector<std::vector<double>> rows;
    std::size_t row_index = 0;
    for (const auto& row : compiled_cpt(net, i)) {
      std::vector<double> probs;
      probs.reserve(row.size());
      double total = 0.0;
      for (Rank r : row) {
        double p = r.is_infinite() ? 0.0 : std::pow(base, static_cast<double>(r.value()));
        probs.push_back(p);
        total += p;
      }
      if (!(total > 0.0))
        throw ValidationError("all-infinite rank row " + std::to_string(row_index) + " of " +
                              name);
      for (double& p : probs) p /= total;
      rows.push_back(std::move(probs));
      ++row_index;
    }
    if (n.parents.empty())
      out.set_prior(name, std::move(rows.front()));
    else
      out.set_table(name, n.parents, std::move(rows));
  }
  return out;
}

RankHistogram rank_histogram(const RankNetwork& net) {
  std::map<std::uint64_t, std::size_t> counts;  // inf keyed above any finite
  constexpr std::uint64_t inf_key = ~std::uint64_t{0};
  for (int i = 0; i < static_cast<int>(net.size()); ++i)
    for (const auto& row : compiled_cpt(net, i))
      for (Rank r : row) ++counts[r.is_infinite() ? inf_key : r.value()];
  RankHistogram h;
  for (const auto& [k, c] : counts)
    h.bins.emplace_back(k == inf_key ? Rank::infinity() : Rank(static_cast<std::uint32_t>(k)), c);
  return h;
}

}  // namespace rankbench
