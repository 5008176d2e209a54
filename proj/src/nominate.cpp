#include "vnom/nominate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vnom/error.hpp"
#include "vnom/kmeans.hpp"
#include "vnom/rng.hpp"

namespace vnom {

NominationList nominate_lc(const SeededGraph& g, const SbmParams& params,
                           const CanonicalOptions& options) {
  return canonical_nominate(enumerate_posterior(g, params, options));
}

NominationList nominate_lcs(const SeededGraph& g, const SbmParams& params,
                            const McmcConfig& config) {
  return cs_nominate(run_chain(g, params, config));
}

NominationList nominate_lp(const SeededGraph& g, const SpectralConfig& config) {
  if (config.num_clusters < 1) {
    throw ValidationError("cluster count must be positive");
  }
  if (config.kmeans_restarts < 1) {
    throw ValidationError("k-means restarts must be positive");
  }
  if (g.num_blocks() < 1 || g.seed_count(1) == 0) {
    throw ValidationError("no block-1 seeds to anchor the interest cluster");
  }
  const Embedding emb = adjacency_spectral_embed(g.graph(), config.dim, config.embed);
  Rng rng(config.rng_seed);
  const KMeansResult km = kmeans(emb.coords, config.num_clusters, config.kmeans_restarts, rng);

  std::vector<int> s1_count(config.num_clusters, 0);
  Eigen::VectorXd s1_mean = Eigen::VectorXd::Zero(emb.dim);
  for (Vertex v : g.seeds()) {
    if (g.seed_label(v) == 1) {
      ++s1_count[km.labels[v]];
      s1_mean += emb.coords.row(v).transpose();
    }
  }
  s1_mean /= g.seed_count(1);
  int best = 0;
  for (int c = 1; c < config.num_clusters; ++c) {
    if (s1_count[c] > s1_count[best]) {
      best = c;
    } else if (s1_count[c] == s1_count[best] &&
               (km.centroids.row(c).transpose() - s1_mean).squaredNorm() <
                   (km.centroids.row(best).transpose() - s1_mean).squaredNorm()) {
      best = c;
    }
  }
  const Eigen::VectorXd centre = km.centroids.row(best).transpose();

  const auto amb = g.ambiguous();
  std::vector<double> scores(amb.size());
  for (std::size_t i = 0; i < amb.size(); ++i) {
    scores[i] = -(emb.coords.row(amb[i]).transpose() - centre).norm();
  }
  if (config.random_ties) {
    return rank_by_score_random_ties(Scheme::kSpectral, amb, scores, rng);
  }
  return rank_by_score(Scheme::kSpectral, amb, scores);
}

NominationList nominate_lep(const SeededGraph& g, const ExtendedSpectralConfig& config,
                            ModelSelection* fitted) {
  if (g.num_blocks() < 1 || g.seed_count(1) == 0) {
    throw ValidationError("no block-1 seeds to anchor the interest component");
  }
  const Embedding emb = adjacency_spectral_embed(g.graph(), config.dim, config.embed);

  std::vector<Block> labels(g.seed_labels().begin(), g.seed_labels().end());
  if (config.quasi_seeding) {
    for (Block& b : labels) {
      if (b > 1) {
        b = kNotBlock1;
      }
    }
  }
  SelectOptions opt;
  opt.max_components = config.max_components;
  opt.catalogue = config.catalogue;
  opt.em = config.em;
  opt.em.block_sizes = config.block_sizes;
  opt.likelihood = config.likelihood;
  opt.rng_seed = config.rng_seed;
  ModelSelection sel = select_model(emb.coords, labels, opt);

  // Seed rows enter the likelihood under their own component index, so
  // component 1 is the block-1 component without any matching step.
  const GmmModel& model = sel.best;
  const auto amb = g.ambiguous();
  std::vector<double> scores(amb.size());
  std::vector<double> terms(model.num_components);
  for (std::size_t i = 0; i < amb.size(); ++i) {
    const Eigen::VectorXd x = emb.coords.row(amb[i]).transpose();
    for (int k = 1; k <= model.num_components; ++k) {
      const bool needed = k == 1 || config.score == LepScore::kPosterior;
      terms[k - 1] = needed ? std::log(model.weights[k - 1]) + model.log_density(k, x) : 0.0;
    }
    scores[i] = terms[0];
    if (config.score == LepScore::kPosterior) {
      const double mx = *std::max_element(terms.begin(), terms.end());
      double sum = 0.0;
      for (double t : terms) {
        sum += std::exp(t - mx);
      }
      scores[i] -= mx + std::log(sum);
    }
  }
  if (fitted != nullptr) {
    *fitted = std::move(sel);
  }
  return rank_by_score(Scheme::kExtendedSpectral, amb, scores);
}

NominationList nominate_chance(const SeededGraph& g, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  NominationList list;
  list.scheme = Scheme::kChance;
  list.order.assign(g.ambiguous().begin(), g.ambiguous().end());
  shuffle(list.order.begin(), list.order.end(), rng);
  list.scores.assign(list.order.size(), 0.0);
  return list;
}

}  // namespace vnom
