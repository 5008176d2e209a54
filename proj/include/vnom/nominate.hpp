#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vnom/canonical.hpp"
#include "vnom/embed.hpp"
#include "vnom/gmm.hpp"
#include "vnom/mcmc.hpp"
#include "vnom/nomination_list.hpp"
#include "vnom/sbm.hpp"

namespace vnom {

/// Exact canonical scheme.
NominationList nominate_lc(const SeededGraph& g, const SbmParams& params,
                           const CanonicalOptions& options = {});

/// Canonical sampling scheme.
NominationList nominate_lcs(const SeededGraph& g, const SbmParams& params,
                            const McmcConfig& config);

struct SpectralConfig {
  int dim = 3;
  int num_clusters = 3;
  int kmeans_restarts = 1000;
  /// Shuffle runs of equal distance instead of ordering them by vertex id.
  bool random_ties = false;
  std::uint64_t rng_seed = 1;
  EmbedOptions embed;
};

/// Spectral partitioning: embed, k-means, and rank ambiguous vertices by
/// distance to the centroid of the cluster holding the most block-1 seeds.
/// Scores are negated distances.
NominationList nominate_lp(const SeededGraph& g, const SpectralConfig& config);

/// What the extended spectral scheme ranks by.
enum class LepScore {
  /// log(pi_1 f_1(x)): the weighted block-1 density.
  kWeightedDensity,
  /// log of the block-1 posterior pi_1 f_1(x) / sum_k pi_k f_k(x).
  kPosterior,
};

struct ExtendedSpectralConfig {
  int dim = 3;
  /// Largest mixture size tried.
  int max_components = 4;
  std::vector<CovarianceModel> catalogue = full_catalogue();
  /// Treat seeds outside block 1 as known only to be "not block 1".
  bool quasi_seeding = false;
  /// Fixes the mixing weights at n_k / n for fits with K equal to its length.
  std::optional<std::vector<int>> block_sizes;
  EmOptions em;
  SelectionLikelihood likelihood = SelectionLikelihood::kObserved;
  LepScore score = LepScore::kPosterior;
  std::uint64_t rng_seed = 1;
  EmbedOptions embed;
};

/// Extended spectral partitioning: embed, fit the semi-supervised mixture
/// with BIC' selection, and rank by the block-1 score chosen in `config`.
/// Scores are logs, which order identically and do not underflow. When
/// `fitted` is non-null the selected model is copied there.
NominationList nominate_lep(const SeededGraph& g, const ExtendedSpectralConfig& config,
                            ModelSelection* fitted = nullptr);

/// Uniformly random ordering of A (the chance baseline); all scores 0.
NominationList nominate_chance(const SeededGraph& g, std::uint64_t rng_seed);

}  // namespace vnom
