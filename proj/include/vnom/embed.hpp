#pragma once

#include <span>

#include <Eigen/Dense>

#include "vnom/sbm.hpp"

namespace vnom {

/// Adjacency spectral embedding: coords = U |D|^{1/2} built from the
/// eigenpairs of the adjacency matrix with the largest |eigenvalue|.
struct Embedding {
  Eigen::MatrixXd coords;           // n x dim, row v embeds vertex v
  Eigen::VectorXd singular_values;  // |lambda|, nonincreasing
  Eigen::VectorXd eigenvalues;      // signed, same order
  int dim = 0;
};

struct EmbedOptions {
  /// Dense symmetric eigensolver up to this many vertices; Lanczos above.
  int dense_limit = 2000;
  /// Extra Ritz pairs carried beyond the requested dimension.
  int padding = 8;
  /// Relative residual tolerance for the Lanczos solver.
  double tolerance = 1e-10;
};

/// Eigenpairs selected by (|lambda| desc, lambda desc, solver index asc).
/// With a symmetric adjacency matrix (A^T A)^{1/2} = |A|, so the singular
/// values are |lambda|; negative eigenvalues enter the geometry exactly
/// like positive ones.
Embedding adjacency_spectral_embed(const Graph& g, int dim, const EmbedOptions& options = {});

/// Top `count` eigenpairs by |lambda| of a symmetric matrix given only
/// through matrix-vector products (Lanczos with full reorthogonalisation).
/// Exposed for testing the iterative path on small inputs.
struct PartialEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
PartialEigen lanczos_top_magnitude(const Graph& g, int count, const EmbedOptions& options);

/// Profile-likelihood elbow of a scree plot: for each split q, both
/// segments are modelled as Gaussians with a pooled variance and q with
/// the highest profile log-likelihood is returned (1-indexed count of
/// leading values). Input is sorted into nonincreasing order first.
/// Returns 1 when all values are equal.
int scree_elbow(std::span<const double> values);

}  // namespace vnom
