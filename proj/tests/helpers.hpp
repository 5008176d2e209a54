#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "vnom/rng.hpp"
#include "vnom/sbm.hpp"

namespace vnom::testing {

/// A small seeded instance with the parameters it was sampled from.
struct Instance {
  SbmParams params;
  SeededGraph graph;
  GroundTruth truth;
};

/// Random K-block instance with `ambiguous` unlabelled vertices spread over
/// the blocks and 1-2 seeds per block. Bernoulli entries are drawn from
/// [0.1, 0.9].
inline Instance random_instance(int k, int ambiguous, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> amb(k, 0);
  for (int i = 0; i < ambiguous; ++i) {
    ++amb[uniform_below(rng, k)];
  }
  std::vector<int> seeds(k);
  Instance inst;
  inst.params.num_blocks = k;
  for (int i = 0; i < k; ++i) {
    seeds[i] = 1 + static_cast<int>(uniform_below(rng, 2));
    inst.params.block_sizes.push_back(amb[i] + seeds[i]);
  }
  inst.params.bernoulli.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      inst.params.bernoulli(i, j) = inst.params.bernoulli(j, i) = 0.1 + 0.8 * uniform01(rng);
    }
  }
  const auto membership = random_membership(inst.params.block_sizes, rng);
  Graph g = sample_graph(inst.params, membership, rng());
  auto rep = designate_seeds(std::move(g), membership, seeds, rng());
  inst.graph = std::move(rep.graph);
  inst.truth = std::move(rep.truth);
  return inst;
}

/// Log-likelihood of a full labelling by visiting every vertex pair.
inline double pairwise_log_likelihood(const Graph& g, const Eigen::MatrixXd& lambda,
                                      const std::vector<Block>& labels) {
  double ll = 0.0;
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    for (Vertex v = u + 1; v < g.num_vertices(); ++v) {
      const double p = lambda(labels[u] - 1, labels[v] - 1);
      ll += g.has_edge(u, v) ? std::log(p) : std::log1p(-p);
    }
  }
  return ll;
}

/// Every labelling in Phi with its normalised posterior probability,
/// enumerated with std::next_permutation over the ambiguous label multiset.
struct BruteForce {
  std::vector<std::vector<Block>> labellings;
  std::vector<double> probability;
  /// Q(phi(v) = 1) per ambiguous vertex (ascending ids).
  std::vector<double> block1;
};

inline BruteForce brute_force_posterior(const SeededGraph& g, const SbmParams& params) {
  std::vector<Block> multiset;
  for (int i = 1; i <= params.num_blocks; ++i) {
    const int r = params.block_sizes[i - 1] - g.seed_count(i);
    multiset.insert(multiset.end(), r, i);
  }
  std::sort(multiset.begin(), multiset.end());
  const auto amb = g.ambiguous();
  BruteForce bf;
  std::vector<double> logs;
  do {
    std::vector<Block> labels(g.seed_labels().begin(), g.seed_labels().end());
    for (std::size_t i = 0; i < amb.size(); ++i) {
      labels[amb[i]] = multiset[i];
    }
    logs.push_back(pairwise_log_likelihood(g.graph(), params.bernoulli, labels));
    bf.labellings.push_back(std::move(labels));
  } while (std::next_permutation(multiset.begin(), multiset.end()));
  const double mx = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (double l : logs) {
    total += std::exp(l - mx);
  }
  bf.block1.assign(amb.size(), 0.0);
  for (std::size_t s = 0; s < logs.size(); ++s) {
    const double p = std::exp(logs[s] - mx) / total;
    bf.probability.push_back(p);
    for (std::size_t i = 0; i < amb.size(); ++i) {
      if (bf.labellings[s][amb[i]] == 1) {
        bf.block1[i] += p;
      }
    }
  }
  return bf;
}

}  // namespace vnom::testing
