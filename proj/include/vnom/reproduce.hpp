#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vnom/eval.hpp"

namespace vnom {

struct ReproduceOptions {
  /// Replicates per setting; 0 keeps each table's default.
  int replicates = 0;
  /// Divides replicate counts and sampler step counts (fixed burn-ins are
  /// left alone).
  double scale_down = 1.0;
  std::uint64_t rng_seed = 1;
  int jobs = 1;
  int kmeans_restarts = 1000;
  /// Skip exact enumeration on the large-small setting.
  bool skip_large_exact = false;
  /// Embedding dimensions for table5; empty keeps {3, 10, 20}.
  std::vector<int> dims;
  /// Step counts for fig5; empty keeps {1e3, 1e4, 1e5}.
  std::vector<std::int64_t> nmcmc_sweep;
  LepScore lep_score = LepScore::kPosterior;
  SelectionLikelihood lep_likelihood = SelectionLikelihood::kObserved;
};

/// How an equitimed sampler budget was set.
struct EquitimeInfo {
  double target_seconds = 0.0;
  CostModel cost;
  std::int64_t steps = 0;
  /// Measured / target runtime for one run at `steps`.
  double verification_ratio = 0.0;
};

struct ReproduceRow {
  std::string setting;
  std::vector<ExperimentReport> reports;
  /// Present when the row contains an equitimed sampler.
  bool has_equitime = false;
  EquitimeInfo equitime;

  const ExperimentReport& report(std::string_view label) const;
};

struct ReproduceResult {
  std::string table;
  std::vector<ReproduceRow> rows;
};

/// "table3", "table4-medium", "table4-large", "table5", "fig5", "er-null".
std::vector<std::string> reproduce_tables();
ReproduceResult reproduce(std::string_view table, const ReproduceOptions& options);

/// MAP +/- 2 s.e. and timing per scheme, one line per report.
void print_result(std::ostream& out, const ReproduceResult& result);
/// CSV: table,setting,label,config,replicates,map,std_error,mean_seconds,median_seconds.
void write_result_csv(std::ostream& out, const ReproduceResult& result);
/// CSV: setting,label,position,probability.
void write_curves_csv(std::ostream& out, const ReproduceResult& result);

}  // namespace vnom
