#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vnom/embed.hpp"
#include "vnom/gmm.hpp"
#include "vnom/nomination_list.hpp"
#include "vnom/sbm.hpp"

namespace vnom::io {

// Text formats. Blank lines and lines starting with '#' are ignored except
// for the directives noted below. Vertices are 0-indexed, blocks 1-indexed.

/// "u v" per line. A "# vertices N" directive sets the vertex count (so
/// isolated trailing vertices survive a round trip); otherwise it is one
/// more than the largest endpoint.
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

/// "vertex block" per seed. A "# blocks K" directive gives the block
/// count, otherwise the largest seed label is used; `num_vertices` comes
/// from the graph.
SeededGraph read_seeds(std::istream& in, Graph graph);
void write_seeds(std::ostream& out, const SeededGraph& g);

/// "vertex block" for every vertex.
GroundTruth read_truth(std::istream& in);
void write_truth(std::ostream& out, const GroundTruth& truth);

/// {"num_blocks": K, "block_sizes": [...], "bernoulli": [[...], ...]}.
SbmParams read_params(std::istream& in);
void write_params(std::ostream& out, const SbmParams& params);

/// CSV with header rank,vertex,score,scheme; rank is 1-based.
NominationList read_nomination(std::istream& in);
void write_nomination(std::ostream& out, const NominationList& list);

/// CSV vertex,x1..xd.
void write_embedding(std::ostream& out, const Embedding& emb);
/// CSV index,singular_value,eigenvalue.
void write_scree(std::ostream& out, const Embedding& emb);

/// JSON with the selected fit and the BIC' table over all candidates.
void write_model_selection(std::ostream& out, const ModelSelection& sel);

/// File helpers; failures to open raise ValidationError naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace vnom::io
