#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vnom/nomination_list.hpp"
#include "vnom/rng.hpp"
#include "vnom/sbm.hpp"

namespace vnom {

struct McmcConfig {
  /// Total Metropolis-Hastings steps (nMCMC).
  std::int64_t num_steps = 10000;
  /// Steps discarded before counting; negative means num_steps / 2.
  std::int64_t burn_in = -1;
  std::uint64_t rng_seed = 1;
  /// Steps between full log-likelihood recounts of the cached value.
  std::int64_t audit_interval = 100000;

  std::int64_t resolved_burn_in() const { return burn_in < 0 ? num_steps / 2 : burn_in; }
  void validate() const;
};

/// Metropolis-Hastings state over Phi with the Bernoulli-Laplace swap
/// proposal. Holds a labelling of every vertex (seeds fixed), the ambiguous
/// vertices, and the cached log likelihood of the current labelling.
class ChainState {
 public:
  /// Starts from `phi`, which must lie in Phi for params.block_sizes.
  ChainState(const SeededGraph& g, const SbmParams& params, BlockAssignment phi);

  /// Uniform draw from Phi: a shuffle of the ambiguous label multiset.
  static ChainState uniform(const SeededGraph& g, const SbmParams& params, Rng& rng);

  const BlockAssignment& assignment() const { return phi_; }
  Block label(Vertex v) const { return phi_.labels[v]; }
  double log_likelihood() const { return log_likelihood_; }

  /// Number of unordered ambiguous pairs with different labels: the
  /// proposal's normalising constant.
  std::int64_t cross_pair_count() const;

  /// Uniform pair {u, v} of ambiguous vertices with different labels.
  /// Throws ValidationError when all ambiguous vertices share a label.
  std::pair<Vertex, Vertex> propose(Rng& rng) const;

  /// log Q(phi'|G) - log Q(phi|G) for phi' = phi with u, v swapped. Only
  /// neighbours of u and v contribute; common neighbours cancel.
  double log_ratio(Vertex u, Vertex v) const;

  /// Swaps the labels of u and v; `delta` is the matching log_ratio.
  void apply_swap(Vertex u, Vertex v, double delta);

  /// One Metropolis-Hastings step. Returns true when the proposal was
  /// accepted.
  bool step(Rng& rng);

  /// Log likelihood of the current labelling from block edge counts.
  double recount_log_likelihood() const;

  /// Replaces the cached value with a recount; returns the absolute drift.
  double audit();

 private:
  const SeededGraph* graph_;
  const SbmParams* params_;
  int num_blocks_;
  BlockAssignment phi_;
  std::vector<double> logit_;  // K x K, log(p / (1 - p))
  double log_likelihood_ = 0.0;
  bool has_cross_pair_ = false;
};

/// Frequency estimate of Q(phi(v) = 1 | G) over the retained states.
struct PosteriorEstimate {
  std::vector<Vertex> vertices;
  std::vector<double> block1_frequency;
  /// Per-vertex count of retained states with label 1.
  std::vector<std::int64_t> block1_count;
  std::int64_t num_samples = 0;
  double acceptance_rate = 0.0;
  double max_audit_drift = 0.0;
};

/// Runs one chain from X_0 ~ Uniform(Phi), discards the burn-in, and counts
/// label-1 occupancy over the remaining states.
PosteriorEstimate run_chain(const SeededGraph& g, const SbmParams& params,
                            const McmcConfig& config);

/// Orders A by nonincreasing estimated posterior, ties by ascending id.
NominationList cs_nominate(const PosteriorEstimate& estimate);

}  // namespace vnom
