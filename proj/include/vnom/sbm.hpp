#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vnom/rng.hpp"

namespace vnom {

/// Vertices are 0-indexed; blocks are 1-indexed (block 1 is the block of
/// interest). Label 0 is reserved for "unknown" in seed-label vectors.
using Vertex = std::int32_t;
using Block = int;

/// Stochastic block model parameters: K blocks with sizes n_1..n_K and a
/// symmetric K x K Bernoulli matrix with entries in (0, 1).
struct SbmParams {
  int num_blocks = 0;
  std::vector<int> block_sizes;
  Eigen::MatrixXd bernoulli;

  int num_vertices() const;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;
};

/// Undirected simple graph in compressed sparse row form. Neighbor lists
/// are sorted ascending.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list. Rejects self-loops, duplicate pairs, and
  /// endpoints outside [0, n).
  Graph(int num_vertices, std::span<const std::pair<Vertex, Vertex>> edges);

  int num_vertices() const { return num_vertices_; }
  std::int64_t num_edges() const { return static_cast<std::int64_t>(adj_.size()) / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  int degree(Vertex v) const {
    return static_cast<int>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_edge(Vertex u, Vertex v) const;

  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<std::pair<Vertex, Vertex>> edge_list() const;

  /// Dense symmetric 0/1 adjacency matrix.
  Eigen::MatrixXd dense_adjacency() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int num_vertices_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<Vertex> adj_;
};

/// A graph with block labels observed on the seed set S only. Ground truth
/// for the ambiguous set A is never stored here; see GroundTruth.
class SeededGraph {
 public:
  SeededGraph() = default;

  /// `seed_labels[v]` is the block of seed v, or 0 when v is ambiguous.
  SeededGraph(Graph graph, int num_blocks, std::vector<Block> seed_labels);

  const Graph& graph() const { return graph_; }
  int num_vertices() const { return graph_.num_vertices(); }
  int num_blocks() const { return num_blocks_; }

  bool is_seed(Vertex v) const { return seed_labels_[v] != 0; }
  Block seed_label(Vertex v) const { return seed_labels_[v]; }
  std::span<const Block> seed_labels() const { return seed_labels_; }

  /// Ambiguous vertices, ascending.
  std::span<const Vertex> ambiguous() const { return ambiguous_; }
  /// Seed vertices, ascending.
  std::span<const Vertex> seeds() const { return seeds_; }

  /// m_i for block i (1-indexed); m() is the total.
  int seed_count(Block i) const { return seed_counts_[i - 1]; }
  const std::vector<int>& seed_counts() const { return seed_counts_; }
  int num_seeds() const { return static_cast<int>(seeds_.size()); }

  friend bool operator==(const SeededGraph&, const SeededGraph&) = default;

 private:
  Graph graph_;
  int num_blocks_ = 0;
  std::vector<Block> seed_labels_;
  std::vector<Vertex> ambiguous_;
  std::vector<Vertex> seeds_;
  std::vector<int> seed_counts_;
};

/// Evaluation-only block labels for every vertex. Nomination schemes never
/// receive this.
struct GroundTruth {
  std::vector<Block> labels;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// A labelling phi: V -> {1..K} that agrees with the seeds and has exactly
/// n_i vertices in block i.
struct BlockAssignment {
  std::vector<Block> labels;
};

/// Throws ValidationError unless `phi` belongs to Phi for (g, block_sizes).
void validate_assignment(const SeededGraph& g, std::span<const int> block_sizes,
                         const BlockAssignment& phi);

/// Edge counts e_{ij} and non-edge counts c_{ij}; only i <= j is populated
/// (0-indexed storage, entry (i-1, j-1) for blocks i, j).
struct BlockEdgeCounts {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> edges;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> non_edges;
};

/// Block labels with n_i consecutive vertices in block i: 1..1 2..2 ...
std::vector<Block> contiguous_membership(std::span<const int> block_sizes);

/// Uniformly random membership with the given block sizes.
std::vector<Block> random_membership(std::span<const int> block_sizes, Rng& rng);

/// Samples each pair {u, v} independently with probability
/// Lambda[b(u)][b(v)].
Graph sample_graph(const SbmParams& params, std::span<const Block> membership,
                   std::uint64_t rng_seed);

struct SeedDesignation {
  SeededGraph graph;
  GroundTruth truth;
};

/// Picks m_i seeds uniformly at random inside each block.
SeedDesignation designate_seeds(Graph graph, std::span<const Block> membership,
                                std::span<const int> seed_counts,
                                std::uint64_t rng_seed);

/// Seed-subgraph estimate of the Bernoulli matrix.
Eigen::MatrixXd estimate_bernoulli(const SeededGraph& g);

/// n_i ~ m_i n / m, repaired so that the sizes sum to n and n_i >= max(m_i, 1).
std::vector<int> estimate_block_sizes(const SeededGraph& g);

BlockEdgeCounts block_edge_counts(const SeededGraph& g, const BlockAssignment& phi);

/// log of prod Lambda^{e} (1 - Lambda)^{c} over i <= j.
double log_likelihood(const BlockEdgeCounts& counts, const Eigen::MatrixXd& bernoulli);

}  // namespace vnom
