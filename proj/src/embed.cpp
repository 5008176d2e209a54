#include "vnom/embed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "vnom/error.hpp"
#include "vnom/rng.hpp"

namespace vnom {
namespace {

/// Indices of `values` ordered by (|v| desc, v desc, index asc).
std::vector<int> magnitude_order(const Eigen::VectorXd& values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(values[a]);
    const double mb = std::abs(values[b]);
    if (ma != mb) {
      return ma > mb;
    }
    return values[a] > values[b];
  });
  return idx;
}

void multiply(const Graph& g, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const int n = g.num_vertices();
  for (Vertex v = 0; v < n; ++v) {
    double s = 0.0;
    for (Vertex w : g.neighbors(v)) {
      s += x[w];
    }
    y[v] = s;
  }
}

}  // namespace

PartialEigen lanczos_top_magnitude(const Graph& g, int count, const EmbedOptions& options) {
  const int n = g.num_vertices();
  if (count < 1 || count > n) {
    throw ValidationError("requested " + std::to_string(count) + " eigenpairs of a " +
                          std::to_string(n) + "-vertex graph");
  }
  // Deterministic start vector.
  Rng rng(0x5EEDULL);
  Eigen::VectorXd start(n);
  for (int i = 0; i < n; ++i) {
    start[i] = 1.0 + 0.5 * (uniform01(rng) - 0.5);
  }
  start.normalize();

  const int wanted = std::min(n, count + options.padding);
  int steps = std::min(n, std::max(2 * wanted, wanted + 32));
  for (;;) {
    Eigen::MatrixXd basis(n, steps);
    Eigen::VectorXd alpha(steps);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(steps);
    basis.col(0) = start;
    Eigen::VectorXd w(n);
    int built = steps;
    for (int j = 0; j < steps; ++j) {
      multiply(g, basis.col(j), w);
      alpha[j] = basis.col(j).dot(w);
      w -= alpha[j] * basis.col(j);
      if (j > 0) {
        w -= beta[j - 1] * basis.col(j - 1);
      }
      // Full reorthogonalisation, twice.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd h = basis.leftCols(j + 1).transpose() * w;
        w.noalias() -= basis.leftCols(j + 1) * h;
      }
      beta[j] = w.norm();
      if (j + 1 == steps) {
        break;
      }
      if (beta[j] < 1e-12 * std::max(1.0, std::abs(alpha[j]))) {
        // Invariant subspace: the Ritz pairs are exact.
        built = j + 1;
        beta[j] = 0.0;
        break;
      }
      basis.col(j + 1) = w / beta[j];
    }
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
      tri(j, j) = alpha[j];
      if (j + 1 < built) {
        tri(j, j + 1) = tri(j + 1, j) = beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(tri);
    const Eigen::VectorXd& theta = ritz.eigenvalues();
    const auto order = magnitude_order(theta);
    if (built < count) {
      // The start vector spans too few eigenspaces (repeated eigenvalues).
      break;
    }
    PartialEigen out;
    out.values.resize(count);
    out.vectors.resize(n, count);
    const double scale = std::max(1.0, std::abs(theta[order[0]]));
    bool converged = true;
    // Include the first excluded pair so the cut-off ordering is settled.
    const int check = std::min(built, count + 1);
    for (int c = 0; c < check; ++c) {
      const int idx = order[c];
      const double residual = std::abs(beta[built - 1] * ritz.eigenvectors()(built - 1, idx));
      if (residual > options.tolerance * scale) {
        converged = false;
      }
      if (c < count) {
        out.values[c] = theta[idx];
        out.vectors.col(c) = basis.leftCols(built) * ritz.eigenvectors().col(idx);
      }
    }
    if (converged || built < steps || steps == n) {
      return out;
    }
    steps = std::min(n, steps + steps / 2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(g.dense_adjacency());
  const auto order = magnitude_order(dense.eigenvalues());
  PartialEigen out;
  out.values.resize(count);
  out.vectors.resize(n, count);
  for (int c = 0; c < count; ++c) {
    out.values[c] = dense.eigenvalues()[order[c]];
    out.vectors.col(c) = dense.eigenvectors().col(order[c]);
  }
  return out;
}

Embedding adjacency_spectral_embed(const Graph& g, int dim, const EmbedOptions& options) {
  const int n = g.num_vertices();
  if (dim < 1 || dim > n) {
    throw ValidationError("embedding dimension " + std::to_string(dim) + " must lie in 1.." +
                          std::to_string(n));
  }
  Eigen::VectorXd values(dim);
  Eigen::MatrixXd vectors(n, dim);
  if (n <= options.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.dense_adjacency());
    if (solver.info() != Eigen::Success) {
      throw NumericalError("symmetric eigensolver failed");
    }
    const auto order = magnitude_order(solver.eigenvalues());
    for (int c = 0; c < dim; ++c) {
      values[c] = solver.eigenvalues()[order[c]];
      vectors.col(c) = solver.eigenvectors().col(order[c]);
    }
  } else {
    auto part = lanczos_top_magnitude(g, dim, options);
    values = part.values;
    vectors = part.vectors;
  }
  Embedding out;
  out.dim = dim;
  out.eigenvalues = values;
  out.singular_values = values.cwiseAbs();
  out.coords = vectors * out.singular_values.cwiseSqrt().asDiagonal();
  return out;
}

int scree_elbow(std::span<const double> values) {
  const int p = static_cast<int>(values.size());
  if (p < 3) {
    throw ValidationError("scree elbow needs at least 3 values");
  }
  std::vector<double> d(values.begin(), values.end());
  std::sort(d.begin(), d.end(), std::greater<>());
  if (d.front() == d.back()) {
    return 1;
  }
  int best = 1;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int q = 1; q < p; ++q) {
    const double mu1 = std::accumulate(d.begin(), d.begin() + q, 0.0) / q;
    const double mu2 = std::accumulate(d.begin() + q, d.end(), 0.0) / (p - q);
    double ss = 0.0;
    for (int i = 0; i < q; ++i) {
      ss += (d[i] - mu1) * (d[i] - mu1);
    }
    for (int i = q; i < p; ++i) {
      ss += (d[i] - mu2) * (d[i] - mu2);
    }
    const double var = ss / (p - 2);
    if (var <= 0.0) {
      // Both segments constant: a perfect split.
      return q;
    }
    // Profile log-likelihood with pooled variance; the residual term is
    // ss / (2 var) = (p - 2) / 2, identical for every q, but kept for
    // clarity against the density formula.
    const double ll = -0.5 * p * std::log(2.0 * M_PI * var) - ss / (2.0 * var);
    if (ll > best_ll) {
      best_ll = ll;
      best = q;
    }
  }
  return best;
}

}  // namespace vnom
