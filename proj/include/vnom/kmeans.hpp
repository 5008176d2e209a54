#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vnom/rng.hpp"
#include "vnom/sbm.hpp"

namespace vnom {

struct KMeansResult {
  std::vector<int> labels;     // 0-indexed cluster per row
  Eigen::MatrixXd centroids;   // k x d
  double within_ss = 0.0;      // within-cluster sum of squares
};

/// Lloyd's algorithm from k-means++ seeding; the restart with the smallest
/// within-cluster sum of squares wins.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, int restarts, Rng& rng,
                    int max_iter = 100);

/// Semi-supervised k-means++. Rows whose `seed_labels` entry is nonzero
/// keep that label (1-indexed) and pin the matching centre; remaining
/// centres are drawn by D^2 weighting among unlabelled rows. Lloyd updates
/// move unlabelled rows only, and centroids are taken over seeds plus
/// current members. Returns 1-indexed labels for every row.
std::vector<Block> ss_kmeanspp_init(const Eigen::MatrixXd& points,
                                    std::span<const Block> seed_labels, int k, Rng& rng,
                                    int max_iter = 100);

}  // namespace vnom
