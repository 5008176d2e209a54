#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vnom/nominate.hpp"
#include "vnom/sbm.hpp"

namespace vnom {

/// Fraction of the first j entries that are truly in block 1, j = 1..|list|.
std::vector<double> precision_at_depth(const NominationList& list, const GroundTruth& truth);

/// Mean of precision@j over j = 1..n_1 - m_1, where n_1 - m_1 is the number
/// of listed vertices whose true block is 1. Throws when that is zero.
double average_precision(const NominationList& list, const GroundTruth& truth);

/// Per-position probability that the listed vertex is in block 1.
struct PrecisionCurve {
  std::vector<double> probability;
  int replicates = 0;
};

/// A simulation setting: the model plus how many seeds each block gets.
struct Protocol {
  std::string name;
  SbmParams params;
  std::vector<int> seed_counts;

  void validate() const;
};

/// One scheme as run inside an experiment. Only the config matching
/// `scheme` is read; RNG seeds inside the configs are replaced per
/// replicate.
struct SchemeSpec {
  std::string label;
  Scheme scheme = Scheme::kChance;
  /// For lc / lcs: plug in seed-subgraph estimates instead of the truth.
  bool estimate_params = false;
  CanonicalOptions canonical;
  McmcConfig mcmc;
  SpectralConfig spectral;
  ExtendedSpectralConfig extended;

  /// Short human-readable echo of the settings that matter for `scheme`.
  std::string describe() const;
};

struct ExperimentReport {
  std::string label;
  Scheme scheme = Scheme::kChance;
  int replicates = 0;
  double map = 0.0;
  /// Sample standard deviation of AP over sqrt(replicates).
  double std_error = 0.0;
  double mean_seconds = 0.0;
  double median_seconds = 0.0;
  std::vector<double> average_precision;
  std::vector<double> seconds;
  PrecisionCurve curve;
  std::string config;
};

struct ExperimentOptions {
  int replicates = 100;
  std::uint64_t rng_seed = 1;
  int jobs = 1;
};

/// Draws replicate `index` of a protocol: random block membership, graph,
/// and seeds, all from streams of (rng_seed, index).
SeedDesignation draw_replicate(const Protocol& protocol, std::uint64_t rng_seed, int index);

/// Seed handed to schemes on replicate `index`; independent of which other
/// schemes run alongside.
std::uint64_t scheme_seed(std::uint64_t rng_seed, int index);

/// Runs one scheme on one graph. `truth_params` feeds lc / lcs unless the
/// spec asks for estimates.
NominationList run_scheme(const SchemeSpec& spec, const SeededGraph& g,
                          const SbmParams& truth_params, std::uint64_t rng_seed);

/// Monte Carlo evaluation of every scheme on the same replicates. Results
/// are identical for a given rng_seed whatever `jobs` is (timings aside).
/// A failing replicate aborts the run with its index in the message.
std::vector<ExperimentReport> run_experiment(const Protocol& protocol,
                                             std::span<const SchemeSpec> schemes,
                                             const ExperimentOptions& options);

/// Linear runtime model for the sampler: seconds = overhead + steps * per_step.
struct TimingSample {
  std::int64_t steps = 0;
  double seconds = 0.0;
};
struct CostModel {
  double overhead_seconds = 0.0;
  double seconds_per_step = 0.0;
};

/// Least-squares line through the samples; one sample gives a line
/// through the origin. Negative intercepts are clamped to zero.
CostModel fit_cost_model(std::span<const TimingSample> samples);

/// Steps whose predicted runtime equals `target_seconds`. Throws when the
/// target does not exceed the fixed overhead.
std::int64_t equitime_mcmc_steps(double target_seconds, const CostModel& model);

/// Times nominate_lcs on `g` at each step count (best of `repeats`) and
/// fits the cost model.
CostModel calibrate_mcmc(const SeededGraph& g, const SbmParams& params, const McmcConfig& base,
                         std::span<const std::int64_t> step_counts, int repeats = 3);

}  // namespace vnom
