#include "vnom/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vnom/error.hpp"

namespace vnom {

int SbmParams::num_vertices() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

void SbmParams::validate() const {
  if (num_blocks < 1) {
    throw ValidationError("block count must be positive");
  }
  if (static_cast<int>(block_sizes.size()) != num_blocks) {
    throw ValidationError("block_sizes has " + std::to_string(block_sizes.size()) +
                          " entries, expected " + std::to_string(num_blocks));
  }
  for (int i = 0; i < num_blocks; ++i) {
    if (block_sizes[i] < 1) {
      throw ValidationError("block " + std::to_string(i + 1) + " has size < 1");
    }
  }
  if (bernoulli.rows() != num_blocks || bernoulli.cols() != num_blocks) {
    throw ValidationError("bernoulli matrix must be " + std::to_string(num_blocks) +
                          "x" + std::to_string(num_blocks));
  }
  for (int i = 0; i < num_blocks; ++i) {
    for (int j = 0; j < num_blocks; ++j) {
      const double p = bernoulli(i, j);
      if (!(p > 0.0 && p < 1.0)) {
        throw ValidationError("bernoulli entry (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") = " + std::to_string(p) +
                              " is outside (0,1)");
      }
      if (p != bernoulli(j, i)) {
        throw ValidationError("bernoulli matrix is not symmetric at (" +
                              std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
    }
  }
}

Graph::Graph(int num_vertices, std::span<const std::pair<Vertex, Vertex>> edges)
    : num_vertices_(num_vertices) {
  if (num_vertices < 0) {
    throw ValidationError("negative vertex count");
  }
  std::vector<std::int64_t> degree(num_vertices, 0);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices) {
      throw ValidationError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                            ") references a vertex outside [0," +
                            std::to_string(num_vertices) + ")");
    }
    if (u == v) {
      throw ValidationError("self-loop at vertex " + std::to_string(u));
    }
    ++degree[u];
    ++degree[v];
  }
  offsets_.assign(num_vertices + 1, 0);
  for (int v = 0; v < num_vertices; ++v) {
    offsets_[v + 1] = offsets_[v] + degree[v];
  }
  adj_.resize(offsets_.back());
  std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    adj_[cursor[u]++] = v;
    adj_[cursor[v]++] = u;
  }
  for (int v = 0; v < num_vertices; ++v) {
    auto first = adj_.begin() + offsets_[v];
    auto last = adj_.begin() + offsets_[v + 1];
    std::sort(first, last);
    auto dup = std::adjacent_find(first, last);
    if (dup != last) {
      throw ValidationError("duplicate edge (" + std::to_string(v) + "," +
                            std::to_string(*dup) + ")");
    }
  }
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  if (degree(u) > degree(v)) {
    std::swap(u, v);
  }
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> Graph::edge_list() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (Vertex u = 0; u < num_vertices_; ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) {
        out.emplace_back(u, v);
      }
    }
  }
  return out;
}

Eigen::MatrixXd Graph::dense_adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(num_vertices_, num_vertices_);
  for (Vertex u = 0; u < num_vertices_; ++u) {
    for (Vertex v : neighbors(u)) {
      a(u, v) = 1.0;
    }
  }
  return a;
}

SeededGraph::SeededGraph(Graph graph, int num_blocks, std::vector<Block> seed_labels)
    : graph_(std::move(graph)),
      num_blocks_(num_blocks),
      seed_labels_(std::move(seed_labels)),
      seed_counts_(num_blocks, 0) {
  if (num_blocks < 1) {
    throw ValidationError("block count must be positive");
  }
  if (static_cast<int>(seed_labels_.size()) != graph_.num_vertices()) {
    throw ValidationError("seed label vector length " +
                          std::to_string(seed_labels_.size()) +
                          " does not match vertex count " +
                          std::to_string(graph_.num_vertices()));
  }
  for (Vertex v = 0; v < graph_.num_vertices(); ++v) {
    const Block b = seed_labels_[v];
    if (b == 0) {
      ambiguous_.push_back(v);
    } else if (b < 1 || b > num_blocks) {
      throw ValidationError("seed " + std::to_string(v) + " has label " +
                            std::to_string(b) + " outside 1.." +
                            std::to_string(num_blocks));
    } else {
      seeds_.push_back(v);
      ++seed_counts_[b - 1];
    }
  }
}

void validate_assignment(const SeededGraph& g, std::span<const int> block_sizes,
                         const BlockAssignment& phi) {
  const int k = g.num_blocks();
  if (static_cast<int>(phi.labels.size()) != g.num_vertices()) {
    throw ValidationError("assignment length does not match vertex count");
  }
  if (static_cast<int>(block_sizes.size()) != k) {
    throw ValidationError("block size vector length does not match block count");
  }
  std::vector<int> hist(k, 0);
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    const Block b = phi.labels[v];
    if (b < 1 || b > k) {
      throw ValidationError("assignment label out of range at vertex " + std::to_string(v));
    }
    if (g.is_seed(v) && g.seed_label(v) != b) {
      throw ValidationError("assignment disagrees with seed label at vertex " +
                            std::to_string(v));
    }
    ++hist[b - 1];
  }
  for (int i = 0; i < k; ++i) {
    if (hist[i] != block_sizes[i]) {
      throw ValidationError("assignment puts " + std::to_string(hist[i]) +
                            " vertices in block " + std::to_string(i + 1) +
                            ", expected " + std::to_string(block_sizes[i]));
    }
  }
}

std::vector<Block> contiguous_membership(std::span<const int> block_sizes) {
  std::vector<Block> b;
  for (std::size_t i = 0; i < block_sizes.size(); ++i) {
    b.insert(b.end(), block_sizes[i], static_cast<Block>(i + 1));
  }
  return b;
}

std::vector<Block> random_membership(std::span<const int> block_sizes, Rng& rng) {
  auto b = contiguous_membership(block_sizes);
  shuffle(b.begin(), b.end(), rng);
  return b;
}

namespace {

void check_membership(std::span<const Block> membership, std::span<const int> block_sizes) {
  std::vector<int> hist(block_sizes.size(), 0);
  for (Block b : membership) {
    if (b < 1 || b > static_cast<Block>(block_sizes.size())) {
      throw ValidationError("membership label " + std::to_string(b) + " out of range");
    }
    ++hist[b - 1];
  }
  for (std::size_t i = 0; i < block_sizes.size(); ++i) {
    if (hist[i] != block_sizes[i]) {
      throw ValidationError("membership has " + std::to_string(hist[i]) +
                            " vertices in block " + std::to_string(i + 1) +
                            ", expected " + std::to_string(block_sizes[i]));
    }
  }
}

}  // namespace

Graph sample_graph(const SbmParams& params, std::span<const Block> membership,
                   std::uint64_t rng_seed) {
  params.validate();
  check_membership(membership, params.block_sizes);
  const int n = params.num_vertices();
  Rng rng(rng_seed);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u = 0; u < n; ++u) {
    const int bu = membership[u] - 1;
    for (Vertex v = u + 1; v < n; ++v) {
      if (uniform01(rng) < params.bernoulli(bu, membership[v] - 1)) {
        edges.emplace_back(u, v);
      }
    }
  }
  return Graph(n, edges);
}

SeedDesignation designate_seeds(Graph graph, std::span<const Block> membership,
                                std::span<const int> seed_counts,
                                std::uint64_t rng_seed) {
  const int k = static_cast<int>(seed_counts.size());
  const int n = graph.num_vertices();
  if (static_cast<int>(membership.size()) != n) {
    throw ValidationError("membership length does not match vertex count");
  }
  std::vector<std::vector<Vertex>> members(k);
  for (Vertex v = 0; v < n; ++v) {
    const Block b = membership[v];
    if (b < 1 || b > k) {
      throw ValidationError("membership label " + std::to_string(b) + " out of range");
    }
    members[b - 1].push_back(v);
  }
  Rng rng(rng_seed);
  std::vector<Block> seed_labels(n, 0);
  for (int i = 0; i < k; ++i) {
    if (seed_counts[i] < 0 || seed_counts[i] > static_cast<int>(members[i].size())) {
      throw ValidationError("block " + std::to_string(i + 1) + " asks for " +
                            std::to_string(seed_counts[i]) + " seeds but has " +
                            std::to_string(members[i].size()) + " vertices");
    }
    shuffle(members[i].begin(), members[i].end(), rng);
    for (int s = 0; s < seed_counts[i]; ++s) {
      seed_labels[members[i][s]] = i + 1;
    }
  }
  GroundTruth truth{std::vector<Block>(membership.begin(), membership.end())};
  return {SeededGraph(std::move(graph), k, std::move(seed_labels)), std::move(truth)};
}

Eigen::MatrixXd estimate_bernoulli(const SeededGraph& g) {
  const int k = g.num_blocks();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
  for (Vertex u : g.seeds()) {
    const int bu = g.seed_label(u) - 1;
    for (Vertex v : g.graph().neighbors(u)) {
      if (v > u && g.is_seed(v)) {
        const int bv = g.seed_label(v) - 1;
        counts(bu, bv) += 1.0;
        if (bu != bv) {
          counts(bv, bu) += 1.0;
        }
      }
    }
  }
  Eigen::MatrixXd est(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double mi = g.seed_count(i + 1);
      const double mj = g.seed_count(j + 1);
      const double pairs = (i == j) ? mi * (mi - 1.0) / 2.0 : mi * mj;
      if (pairs <= 0.0) {
        throw ValidationError("unestimable entry (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + "): too few seeds in block " +
                              std::to_string((i == j || mi == 0) ? i + 1 : j + 1));
      }
      est(i, j) = est(j, i) = counts(i, j) / pairs;
    }
  }
  return est;
}

std::vector<int> estimate_block_sizes(const SeededGraph& g) {
  const int k = g.num_blocks();
  const int n = g.num_vertices();
  const int m = g.num_seeds();
  if (m == 0) {
    throw ValidationError("cannot estimate block sizes without seeds");
  }
  std::vector<int> sizes(k);
  std::vector<double> frac(k);
  int assigned = 0;
  for (int i = 0; i < k; ++i) {
    const double raw = static_cast<double>(g.seed_count(i + 1)) * n / m;
    sizes[i] = static_cast<int>(std::floor(raw));
    frac[i] = raw - sizes[i];
    assigned += sizes[i];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (int r = 0; r < n - assigned; ++r) {
    ++sizes[order[r % k]];
  }
  std::vector<int> floor_of(k);
  for (int i = 0; i < k; ++i) {
    floor_of[i] = std::max(g.seed_count(i + 1), 1);
  }
  if (std::accumulate(floor_of.begin(), floor_of.end(), 0) > n) {
    throw ValidationError("more blocks than vertices; no feasible block sizes");
  }
  for (int i = 0; i < k; ++i) {
    while (sizes[i] < floor_of[i]) {
      int donor = -1;
      for (int j = 0; j < k; ++j) {
        if (j != i && sizes[j] > floor_of[j] && (donor < 0 || sizes[j] > sizes[donor])) {
          donor = j;
        }
      }
      --sizes[donor];
      ++sizes[i];
    }
  }
  return sizes;
}

BlockEdgeCounts block_edge_counts(const SeededGraph& g, const BlockAssignment& phi) {
  const int k = g.num_blocks();
  std::vector<std::int64_t> sizes(k, 0);
  for (Block b : phi.labels) {
    ++sizes[b - 1];
  }
  BlockEdgeCounts out;
  out.edges.setZero(k, k);
  out.non_edges.setZero(k, k);
  const Graph& graph = g.graph();
  for (Vertex u = 0; u < graph.num_vertices(); ++u) {
    const int bu = phi.labels[u] - 1;
    for (Vertex v : graph.neighbors(u)) {
      if (v > u) {
        const int bv = phi.labels[v] - 1;
        ++out.edges(std::min(bu, bv), std::max(bu, bv));
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    out.non_edges(i, i) = sizes[i] * (sizes[i] - 1) / 2 - out.edges(i, i);
    for (int j = i + 1; j < k; ++j) {
      out.non_edges(i, j) = sizes[i] * sizes[j] - out.edges(i, j);
    }
  }
  return out;
}

double log_likelihood(const BlockEdgeCounts& counts, const Eigen::MatrixXd& bernoulli) {
  const auto k = counts.edges.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      const double p = bernoulli(i, j);
      total += static_cast<double>(counts.edges(i, j)) * std::log(p) +
               static_cast<double>(counts.non_edges(i, j)) * std::log1p(-p);
    }
  }
  return total;
}

}  // namespace vnom
