#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rankbench/car.hpp"

namespace rankbench {

enum class Engine { numeric, kappa, kappa_as_prob };

std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);

/// One engine applied to one case under one prior scaling.
struct RunRecord {
  std::string case_id;
  std::string true_fault;
  int n_findings = 0;
  double odds_factor = 1.0;
  Engine engine = Engine::numeric;
  std::optional<double> epsilon;             // kappa-family engines only
  std::optional<double> posterior_true;      // numeric-valued engines only
  std::optional<int> plausible_set_size;     // kappa engine only
  std::optional<int> rank_of_true;           // 1-based, worst tie position
  double score = 0.0;
  bool failed = false;
  std::string error;
};

struct GridConfig {
  std::vector<double> odds_factors{1.0, 10.0, 50.0, 100.0, 300.0, 1000.0};
  std::vector<double> epsilons{0.1, 0.01, 0.001};
  std::vector<Engine> engines{Engine::numeric, Engine::kappa};
  double embedding_base = 0.01;  // rank-to-probability base for kappa-as-prob
  unsigned threads = 1;
};

/// Runs every (engine configuration, odds factor, case) combination.
/// Numeric engines contribute one record per factor and case; kappa
/// engines one per epsilon, factor and case. A failing case yields a
/// record marked failed and the grid continues. Output order is
/// deterministic and independent of the thread count.
std::vector<RunRecord> run_grid(const CarModel& model, const std::vector<TestCase>& cases,
                                const GridConfig& config);

enum class AggregateAxis { epsilon, n_findings, prior_magnitude };

/// Mean scores (and set sizes where defined) grouped by one axis value
/// per engine configuration. Failed runs are excluded from the means
/// and reported in failed_count.
struct AggregateRow {
  double key = 0.0;  // epsilon, findings count, or odds factor
  Engine engine = Engine::numeric;
  std::optional<double> epsilon;
  double mean_score = 0.0;
  std::optional<double> mean_plausible_set_size;
  std::size_t run_count = 0;
  std::size_t failed_count = 0;
};

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records, AggregateAxis axis);

/// results.csv: one row per record, sorted by (case id, factor, engine,
/// epsilon). Byte-stable for identical inputs.
void write_records_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_records_csv(const std::string& path);

/// Generic aggregate table with the axis in the first column.
void write_aggregate_csv(const std::vector<AggregateRow>& rows, AggregateAxis axis,
                         const std::string& path);

/// The four per-figure data files under out_dir:
///   fig3.csv  score by epsilon            (kappa engines, original priors)
///   fig4.csv  plausible-set size by findings count (kappa, eps 0.1, original priors)
///   fig5.csv  score by findings count     (original priors; kappa at eps 0.1)
///   fig6.csv  score by prior magnitude    (all factors; kappa at eps 0.1)
/// fig6 labels each factor with the model's mean scaled prior, using
/// the shipped five-decimal summary for the six reference factors.
void write_figure_data(const std::vector<RunRecord>& records, const CarModel& model,
                       const std::string& out_dir);

}  // namespace rankbench
