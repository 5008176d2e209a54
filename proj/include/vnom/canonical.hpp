#pragma once

#include <vector>

#include "vnom/nomination_list.hpp"
#include "vnom/sbm.hpp"

namespace vnom {

/// Q(phi(v) = 1 | G) for each ambiguous vertex, aligned with `vertices`
/// (ascending ids).
struct PosteriorTable {
  std::vector<Vertex> vertices;
  std::vector<double> block1_probability;
  /// |Phi|, the number of labellings that were summed over.
  double num_assignments = 0.0;
};

struct CanonicalOptions {
  /// Refuse to enumerate more labellings than this.
  double max_assignments = 1e8;
  /// Worker threads; the result does not depend on this value.
  int num_threads = 1;
};

/// Number of labellings of the ambiguous vertices with r_i = n_i - m_i in
/// block i: the multinomial coefficient (|A|; r_1, ..., r_K).
double count_assignments(std::span<const int> ambiguous_block_sizes);

/// r_i = n_i - m_i. Throws when a block has more seeds than its size or
/// the totals do not match |A|.
std::vector<int> ambiguous_block_sizes(const SeededGraph& g, std::span<const int> block_sizes);

/// Exact posterior by enumerating every labelling in Phi. Likelihood
/// weights are accumulated in log space.
///
/// Labellings are visited depth-first in lexicographic order of the label
/// vector over the ambiguous vertices; each prefix carries its partial log
/// likelihood so a leaf costs one extra vertex's worth of edges. Only edge
/// terms vary across Phi (the non-edge normaliser depends on block sizes
/// alone), so the walk sums log-odds over edges.
PosteriorTable enumerate_posterior(const SeededGraph& g, const SbmParams& params,
                                   const CanonicalOptions& options = {});

/// Orders A by nonincreasing posterior, ties by ascending vertex id.
NominationList canonical_nominate(const PosteriorTable& posterior);

}  // namespace vnom
