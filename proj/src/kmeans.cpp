#include "vnom/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "vnom/error.hpp"

namespace vnom {
namespace {

/// Draws an index with probability proportional to `weight`; uniform when
/// all weights are zero.
int draw_weighted(std::span<const double> weight, Rng& rng) {
  double total = 0.0;
  for (double w : weight) {
    total += w;
  }
  if (total <= 0.0) {
    return static_cast<int>(uniform_below(rng, weight.size()));
  }
  double target = uniform01(rng) * total;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    target -= weight[i];
    if (target < 0.0) {
      return static_cast<int>(i);
    }
  }
  return static_cast<int>(weight.size() - 1);
}

int nearest(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& x, double* dist2) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist2 != nullptr) {
    *dist2 = best_d;
  }
  return best;
}

KMeansResult lloyd_once(const Eigen::MatrixXd& x, int k, Rng& rng, int max_iter) {
  const auto n = static_cast<int>(x.rows());
  Eigen::MatrixXd centroids(k, x.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  int pick = static_cast<int>(uniform_below(rng, n));
  centroids.row(0) = x.row(pick);
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(i) - centroids.row(c - 1)).squaredNorm());
    }
    pick = draw_weighted(d2, rng);
    centroids.row(c) = x.row(pick);
  }

  KMeansResult r;
  r.labels.assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = nearest(centroids, x.row(i), nullptr);
      if (c != r.labels[i]) {
        r.labels[i] = c;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> sizes(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(r.labels[i]) += x.row(i);
      ++sizes[r.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        centroids.row(c) = sums.row(c) / sizes[c];
      } else {
        // Empty cluster: move it to the point farthest from its centre.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = (x.row(i) - centroids.row(r.labels[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(c) = x.row(far);
      }
    }
  }
  r.within_ss = 0.0;
  for (int i = 0; i < n; ++i) {
    r.within_ss += (x.row(i) - centroids.row(r.labels[i])).squaredNorm();
  }
  r.centroids = std::move(centroids);
  return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, Rng& rng, int max_iter) {
  if (k < 1 || k > points.rows()) {
    throw ValidationError("k-means with k=" + std::to_string(k) + " on " +
                          std::to_string(points.rows()) + " points");
  }
  if (restarts < 1) {
    throw ValidationError("k-means needs at least one restart");
  }
  KMeansResult best;
  best.within_ss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KMeansResult cur = lloyd_once(points, k, rng, max_iter);
    if (cur.within_ss < best.within_ss) {
      best = std::move(cur);
    }
  }
  return best;
}

std::vector<Block> ss_kmeanspp_init(const Eigen::MatrixXd& points,
                                    std::span<const Block> seed_labels, int k, Rng& rng,
                                    int max_iter) {
  const auto n = static_cast<int>(points.rows());
  const auto d = points.cols();
  if (static_cast<int>(seed_labels.size()) != n) {
    throw ValidationError("seed label vector length does not match point count");
  }
  if (k < 1) {
    throw ValidationError("cluster count must be positive");
  }
  Eigen::MatrixXd seed_sum = Eigen::MatrixXd::Zero(k, d);
  std::vector<int> seed_size(k, 0);
  std::vector<int> unlabeled;
  for (int i = 0; i < n; ++i) {
    const Block b = seed_labels[i];
    if (b == 0) {
      unlabeled.push_back(i);
      continue;
    }
    if (b < 1 || b > k) {
      throw ValidationError("seed class " + std::to_string(b) + " exceeds cluster count " +
                            std::to_string(k));
    }
    seed_sum.row(b - 1) += points.row(i);
    ++seed_size[b - 1];
  }

  std::vector<Block> labels(seed_labels.begin(), seed_labels.end());
  if (unlabeled.empty()) {
    return labels;
  }

  // Seeded classes start at their seed means; the rest by D^2 sampling.
  Eigen::MatrixXd centroids(k, d);
  std::vector<bool> placed(k, false);
  for (int c = 0; c < k; ++c) {
    if (seed_size[c] > 0) {
      centroids.row(c) = seed_sum.row(c) / seed_size[c];
      placed[c] = true;
    }
  }
  std::vector<double> d2(unlabeled.size(), std::numeric_limits<double>::infinity());
  bool any_placed = std::find(placed.begin(), placed.end(), true) != placed.end();
  for (int c = 0; c < k; ++c) {
    if (placed[c]) {
      continue;
    }
    int pick;
    if (!any_placed) {
      pick = static_cast<int>(uniform_below(rng, unlabeled.size()));
    } else {
      for (std::size_t u = 0; u < unlabeled.size(); ++u) {
        for (int o = 0; o < k; ++o) {
          if (placed[o]) {
            d2[u] = std::min(d2[u], (points.row(unlabeled[u]) - centroids.row(o)).squaredNorm());
          }
        }
      }
      pick = draw_weighted(d2, rng);
    }
    centroids.row(c) = points.row(unlabeled[pick]);
    placed[c] = true;
    any_placed = true;
  }

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i : unlabeled) {
      const Block c = nearest(centroids, points.row(i), nullptr) + 1;
      if (c != labels[i]) {
        labels[i] = c;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
    Eigen::MatrixXd sums = seed_sum;
    std::vector<int> sizes = seed_size;
    for (int i : unlabeled) {
      sums.row(labels[i] - 1) += points.row(i);
      ++sizes[labels[i] - 1];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        centroids.row(c) = sums.row(c) / sizes[c];
      }
    }
  }
  return labels;
}

}  // namespace vnom
