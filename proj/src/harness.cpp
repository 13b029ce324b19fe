#include "rankbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>
#include <tuple>

#include "rankbench/inference.hpp"
#include "rankbench/transform.hpp"

namespace rankbench {

std::string to_string(Engine e) {
  switch (e) {
    case Engine::numeric: return "numeric";
    case Engine::kappa: return "kappa";
    case Engine::kappa_as_prob: return "kappa-as-prob";
  }
  return "?";
}

Engine engine_from_string(const std::string& s) {
  if (s == "numeric") return Engine::numeric;
  if (s == "kappa") return Engine::kappa;
  if (s == "kappa-as-prob") return Engine::kappa_as_prob;
  throw DomainError("unknown engine: " + s + " (expected numeric|kappa|kappa-as-prob)");
}

namespace {

int worst_tie_rank(const std::vector<double>& better_is_larger, std::size_t self) {
  int rank = 0;
  for (double x : better_is_larger)
    if (x >= better_is_larger[self]) ++rank;
  return rank;
}

struct EngineRun {
  Engine engine;
  double odds_factor;
  std::optional<double> epsilon;
};

/// All cases through one prepared network under one engine.
std::vector<RunRecord> run_engine(const EngineRun& cfg, const CarModel& scaled,
                                  const std::vector<TestCase>& cases, double embedding_base) {
  std::vector<RunRecord> out;
  out.reserve(cases.size());

  std::optional<RankNetwork> rank_net;
  std::optional<Network> numeric_net;
  std::string setup_error;
  try {
    if (cfg.engine == Engine::numeric) {
      numeric_net = scaled.network;
    } else {
      ConversionPolicy policy{*cfg.epsilon};
      RankNetwork converted = convert_network(scaled.network, policy);
      if (cfg.engine == Engine::kappa)
        rank_net = std::move(converted);
      else
        numeric_net = kappa_as_probability(converted, embedding_base);
    }
  } catch (const Error& e) {
    setup_error = e.what();
  }

  for (const TestCase& tc : cases) {
    RunRecord rec;
    rec.case_id = tc.id;
    rec.true_fault = tc.true_fault;
    rec.n_findings = tc.n_findings;
    rec.odds_factor = cfg.odds_factor;
    rec.engine = cfg.engine;
    rec.epsilon = cfg.epsilon;
    if (!setup_error.empty()) {
      rec.failed = true;
      rec.error = setup_error;
      out.push_back(std::move(rec));
      continue;
    }
    try {
      if (cfg.engine == Engine::kappa) {
        auto posteriors =
            posterior_marginals<MinSumAlgebra>(*rank_net, tc.evidence, scaled.faults);
        std::vector<std::pair<std::string, Rank>> fault_ranks;
        for (const auto& p : posteriors) fault_ranks.emplace_back(p.variable, p.dist[1]);
        PlausibleSet phi = plausible_set(fault_ranks);
        rec.plausible_set_size = static_cast<int>(phi.members.size());
        rec.score = probability_score(phi, tc.true_fault);

        std::vector<double> merit;  // larger is better
        std::size_t self = 0;
        for (std::size_t i = 0; i < fault_ranks.size(); ++i) {
          const Rank r = fault_ranks[i].second;
          merit.push_back(r.is_infinite() ? -1e18 : -static_cast<double>(r.value()));
          if (fault_ranks[i].first == tc.true_fault) self = i;
        }
        rec.rank_of_true = worst_tie_rank(merit, self);
      } else {
        auto posteriors =
            posterior_marginals<SumProductAlgebra>(*numeric_net, tc.evidence, scaled.faults);
        std::vector<double> prob;
        std::size_t self = 0;
        for (std::size_t i = 0; i < posteriors.size(); ++i) {
          prob.push_back(posteriors[i].dist[1]);
          if (posteriors[i].variable == tc.true_fault) self = i;
        }
        rec.posterior_true = prob[self];
        rec.score = prob[self];
        rec.rank_of_true = worst_tie_rank(prob, self);
      }
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

bool record_order(const RunRecord& a, const RunRecord& b) {
  return std::tie(a.case_id, a.odds_factor) < std::tie(b.case_id, b.odds_factor) ||
         (std::tie(a.case_id, a.odds_factor) == std::tie(b.case_id, b.odds_factor) &&
          (to_string(a.engine) < to_string(b.engine) ||
           (to_string(a.engine) == to_string(b.engine) &&
            a.epsilon.value_or(-1.0) < b.epsilon.value_or(-1.0))));
}

}  // namespace

std::vector<RunRecord> run_grid(const CarModel& model, const std::vector<TestCase>& cases,
                                const GridConfig& config) {
  std::vector<EngineRun> tasks;
  for (Engine e : config.engines) {
    for (double f : config.odds_factors) {
      if (e == Engine::numeric) {
        tasks.push_back({e, f, std::nullopt});
      } else {
        for (double eps : config.epsilons) tasks.push_back({e, f, eps});
      }
    }
  }

  // per-factor scaled models, shared read-only across tasks
  std::map<double, CarModel> scaled;
  for (double f : config.odds_factors)
    scaled.emplace(f, scale_priors(model, f));

  std::vector<std::vector<RunRecord>> slots(tasks.size());
  const unsigned threads =
      std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(tasks.size())));
  if (threads <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t)
      slots[t] = run_engine(tasks[t], scaled.at(tasks[t].odds_factor), cases,
                            config.embedding_base);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1))
        slots[t] = run_engine(tasks[t], scaled.at(tasks[t].odds_factor), cases,
                              config.embedding_base);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<RunRecord> records;
  for (auto& slot : slots)
    for (auto& rec : slot) records.push_back(std::move(rec));
  std::sort(records.begin(), records.end(), record_order);
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records_in, AggregateAxis axis) {
  if (records_in.empty()) throw DomainError("aggregate over an empty record set");

  // canonical accumulation order keeps the means bit-identical under
  // input permutations
  std::vector<RunRecord> records = records_in;
  std::stable_sort(records.begin(), records.end(), record_order);

  struct Acc {
    double score_sum = 0.0;
    double size_sum = 0.0;
    std::size_t size_count = 0;
    std::size_t ok = 0;
    std::size_t failed = 0;
  };
  // key: axis value, engine name, epsilon (or -1)
  std::map<std::tuple<double, std::string, double>, Acc> groups;

  for (const RunRecord& r : records) {
    double key = 0.0;
    switch (axis) {
      case AggregateAxis::epsilon: key = r.epsilon.value_or(-1.0); break;
      case AggregateAxis::n_findings: key = r.n_findings; break;
      case AggregateAxis::prior_magnitude: key = r.odds_factor; break;
    }
    Acc& acc = groups[{key, to_string(r.engine), r.epsilon.value_or(-1.0)}];
    if (r.failed) {
      ++acc.failed;
      continue;
    }
    ++acc.ok;
    acc.score_sum += r.score;
    if (r.plausible_set_size) {
      acc.size_sum += *r.plausible_set_size;
      ++acc.size_count;
    }
  }

  std::vector<AggregateRow> rows;
  for (const auto& [k, acc] : groups) {
    AggregateRow row;
    row.key = std::get<0>(k);
    row.engine = engine_from_string(std::get<1>(k));
    if (std::get<2>(k) >= 0.0) row.epsilon = std::get<2>(k);
    row.run_count = acc.ok;
    row.failed_count = acc.failed;
    row.mean_score = acc.ok ? acc.score_sum / static_cast<double>(acc.ok) : 0.0;
    if (acc.size_count > 0)
      row.mean_plausible_set_size = acc.size_sum / static_cast<double>(acc.size_count);
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string fmt(double x, const char* format = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

const char* axis_column(AggregateAxis axis) {
  switch (axis) {
    case AggregateAxis::epsilon: return "epsilon";
    case AggregateAxis::n_findings: return "n_findings";
    case AggregateAxis::prior_magnitude: return "odds_factor";
  }
  return "key";
}

void write_aggregate_rows(std::ofstream& out, const std::vector<AggregateRow>& rows,
                          AggregateAxis axis,
                          const std::map<double, std::string>* key_labels = nullptr) {
  out << axis_column(axis);
  if (key_labels) out << ",mean_prior";
  out << ",engine,epsilon,mean_score,mean_plausible_set_size,run_count,failed_count\n";
  for (const AggregateRow& r : rows) {
    out << fmt(r.key, "%g");
    if (key_labels) out << ',' << key_labels->at(r.key);
    out << ',' << to_string(r.engine) << ',' << (r.epsilon ? fmt(*r.epsilon, "%g") : "") << ','
        << fmt(r.mean_score) << ','
        << (r.mean_plausible_set_size ? fmt(*r.mean_plausible_set_size) : "") << ','
        << r.run_count << ',' << r.failed_count << '\n';
  }
}

void sort_rows(std::vector<AggregateRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
    return std::tie(a.key) < std::tie(b.key) ||
           (a.key == b.key &&
            (to_string(a.engine) < to_string(b.engine) ||
             (to_string(a.engine) == to_string(b.engine) &&
              a.epsilon.value_or(-1.0) < b.epsilon.value_or(-1.0))));
  });
}

}  // namespace

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::vector<RunRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), record_order);

  auto out = open_out(path);
  out << "case_id,true_fault,n_findings,odds_factor,engine,epsilon,posterior_true,"
         "plausible_set_size,rank_of_true,score,status\n";
  for (const RunRecord& r : sorted) {
    out << r.case_id << ',' << r.true_fault << ',' << r.n_findings << ','
        << fmt(r.odds_factor, "%g") << ',' << to_string(r.engine) << ','
        << (r.epsilon ? fmt(*r.epsilon, "%g") : "") << ','
        << (r.posterior_true ? fmt(*r.posterior_true) : "") << ','
        << (r.plausible_set_size ? std::to_string(*r.plausible_set_size) : "") << ','
        << (r.rank_of_true ? std::to_string(*r.rank_of_true) : "") << ','
        << (r.failed ? "" : fmt(r.score)) << ',' << (r.failed ? "failed" : "ok") << '\n';
  }
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (line.rfind("case_id,", 0) != 0) throw IoError(path + ": not a results file");

  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 11) throw IoError(path + ": malformed row: " + line);
    RunRecord r;
    r.case_id = cells[0];
    r.true_fault = cells[1];
    r.n_findings = std::stoi(cells[2]);
    r.odds_factor = std::stod(cells[3]);
    r.engine = engine_from_string(cells[4]);
    if (!cells[5].empty()) r.epsilon = std::stod(cells[5]);
    if (!cells[6].empty()) r.posterior_true = std::stod(cells[6]);
    if (!cells[7].empty()) r.plausible_set_size = std::stoi(cells[7]);
    if (!cells[8].empty()) r.rank_of_true = std::stoi(cells[8]);
    if (!cells[9].empty()) r.score = std::stod(cells[9]);
    r.failed = cells[10] == "failed";
    records.push_back(std::move(r));
  }
  return records;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, AggregateAxis axis,
                         const std::string& path) {
  std::vector<AggregateRow> sorted = rows;
  sort_rows(sorted);
  auto out = open_out(path);
  write_aggregate_rows(out, sorted, axis);
}

void write_figure_data(const std::vector<RunRecord>& records, const CarModel& model,
                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  auto filter = [&](auto&& pred) {
    std::vector<RunRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out), pred);
    return out;
  };
  auto write_axis = [&](const std::vector<RunRecord>& recs, AggregateAxis axis,
                        const char* name, const std::map<double, std::string>* labels) {
    auto out = open_out(path(name));
    if (recs.empty()) {
      std::vector<AggregateRow> none;
      write_aggregate_rows(out, none, axis, labels);
      return;
    }
    auto rows = aggregate(recs, axis);
    sort_rows(rows);
    write_aggregate_rows(out, rows, axis, labels);
  };

  const auto is_kappa_family = [](const RunRecord& r) { return r.engine != Engine::numeric; };
  const auto at_original_priors = [](const RunRecord& r) { return r.odds_factor == 1.0; };
  const auto at_selected_epsilon = [](const RunRecord& r) {
    return r.engine == Engine::numeric || (r.epsilon && *r.epsilon == 0.1);
  };

  write_axis(filter([&](const RunRecord& r) { return is_kappa_family(r) && at_original_priors(r); }),
             AggregateAxis::epsilon, "fig3.csv", nullptr);
  write_axis(filter([&](const RunRecord& r) {
               return r.engine == Engine::kappa && at_original_priors(r) && r.epsilon &&
                      *r.epsilon == 0.1;
             }),
             AggregateAxis::n_findings, "fig4.csv", nullptr);
  write_axis(filter([&](const RunRecord& r) { return at_original_priors(r) && at_selected_epsilon(r); }),
             AggregateAxis::n_findings, "fig5.csv", nullptr);

  std::map<double, std::string> labels;
  for (const RunRecord& r : records) {
    if (labels.count(r.odds_factor)) continue;
    std::string label;
    for (const PriorSummary& s : reference_prior_summaries())
      if (std::abs(s.odds_factor - r.odds_factor) < 1e-9) label = fmt(s.mean, "%.5f");
    if (label.empty()) {
      double sum = 0.0;
      for (const std::string& fault : model.faults)
        sum += scale_prior(model.prior_of(fault), r.odds_factor);
      label = fmt(sum / static_cast<double>(model.faults.size()), "%.5f");
    }
    labels[r.odds_factor] = label;
  }
  write_axis(filter(at_selected_epsilon), AggregateAxis::prior_magnitude, "fig6.csv", &labels);
}

}  // namespace rankbench
