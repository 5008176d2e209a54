#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vnom/sbm.hpp"

namespace vnom {

/// Gaussian mixture covariance structures (volume/shape/orientation, E =
/// equal across components, V = varying, I = identity).
enum class CovarianceModel { kEII, kVII, kEEI, kVVI, kEEE, kVVV, kEEV };

std::string_view covariance_name(CovarianceModel model);

/// Parses a structure code. Codes from the wider family that have no
/// closed-form M-step here (VEI, EVI, EVE, VEE, VVE, VEV, EVV, and the
/// single-component X, XII, XXI, XXX) are rejected with a message saying
/// so; anything else is an unknown code.
CovarianceModel parse_covariance(std::string_view name);

/// Every implemented structure, in a fixed order.
std::vector<CovarianceModel> full_catalogue();

/// Free covariance parameters for k components in d dimensions.
int covariance_parameter_count(CovarianceModel model, int k, int d);

/// Seed-label value marking a quasi-seed: known to lie outside block 1.
inline constexpr Block kNotBlock1 = -1;

struct EmOptions {
  /// Stop when |l_t - l_{t-1}| <= tol * |l_t| (observed-data likelihood).
  double tol = 1e-6;
  int max_iter = 500;
  /// Ridge added after each M-step: ridge * trace(Sigma) / d * I.
  double ridge = 1e-8;
  /// A covariance whose smallest eigenvalue stays below this collapsed.
  double collapse_eigenvalue = 1e-12;
  /// When set, mixing weights are fixed at n_k / n.
  std::optional<std::vector<int>> block_sizes;
};

struct GmmModel {
  int num_components = 0;
  int dim = 0;
  CovarianceModel covariance = CovarianceModel::kEII;
  bool weights_fixed = false;
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;

  /// Complete-data log-likelihood at the hard labels argmax_k z_vk.
  double log_likelihood = 0.0;
  /// Observed-data (mixture) log-likelihood at the final parameters.
  double observed_log_likelihood = 0.0;
  int parameter_count = 0;
  double bic_prime = 0.0;

  /// Posterior membership for rows that are not fully supervised, in
  /// ascending point order; `responsibility_rows[r]` is the point index.
  Eigen::MatrixXd responsibilities;
  std::vector<int> responsibility_rows;
  /// Seed labels for seeds, argmax responsibility elsewhere (1-indexed).
  std::vector<Block> hard_labels;

  /// Observed-data log-likelihood after every E-step.
  std::vector<double> trace;
  /// Iterations whose M-step reseeded an empty component; EM monotonicity
  /// is not expected across these.
  std::vector<int> reseeded_at;
  int iterations = 0;
  bool converged = false;

  /// log f_{mu_k, Sigma_k}(x), component k 1-indexed.
  double log_density(int k, const Eigen::VectorXd& x) const;
};

/// Weighted M-step for the covariance structure alone: given membership
/// weights (n x k, rows summing to 1 or one-hot) and component means,
/// returns the maximum-likelihood covariances (no ridge).
std::vector<Eigen::MatrixXd> estimate_covariances(CovarianceModel model,
                                                  const Eigen::MatrixXd& points,
                                                  const Eigen::MatrixXd& weights,
                                                  const std::vector<Eigen::VectorXd>& means);

/// Semi-supervised EM. `seed_labels[v]` is 1..k for a seed, 0 otherwise.
/// Seed rows are one-hot throughout; only unlabelled rows get soft
/// responsibilities, and only they inform the mixing weights.
GmmModel em_fit(const Eigen::MatrixXd& points, std::span<const Block> seed_labels, int k,
                CovarianceModel model, std::span<const Block> init_labels,
                const EmOptions& options = {});

/// EM for quasi-seeding: entries equal to kNotBlock1 are known only to lie
/// outside block 1. Their responsibilities range over components 2..k with
/// weights pi_k / (1 - pi_1). Other entries behave as in em_fit, and with
/// no quasi-seeds the trajectory is identical to em_fit.
GmmModel quasi_seed_em_fit(const Eigen::MatrixXd& points, std::span<const Block> seed_labels,
                           int k, CovarianceModel model, std::span<const Block> init_labels,
                           const EmOptions& options = {});

/// 2 l - tau log(n - m) with l the complete-data value. Throws when n <= m.
double bic_prime(const GmmModel& model, int n, int m);
/// Same penalty applied to an arbitrary log-likelihood value.
double bic_prime(double log_likelihood, int parameter_count, int n, int m);

/// Which maximised likelihood enters BIC'.
enum class SelectionLikelihood {
  /// Complete-data value at the hard labels (GmmModel::log_likelihood).
  kComplete,
  /// Mixture value (GmmModel::observed_log_likelihood), as classical BIC.
  kObserved,
};

struct SelectOptions {
  int max_components = 4;
  SelectionLikelihood likelihood = SelectionLikelihood::kObserved;
  std::vector<CovarianceModel> catalogue = full_catalogue();
  EmOptions em;
  std::uint64_t rng_seed = 1;
};

struct CandidateFit {
  int num_components = 0;
  CovarianceModel covariance = CovarianceModel::kEII;
  bool ok = false;
  int parameter_count = 0;
  /// The likelihood that entered BIC' (see SelectOptions::likelihood).
  double log_likelihood = 0.0;
  double bic_prime = 0.0;
  std::string failure;
};

struct ModelSelection {
  GmmModel best;
  std::vector<CandidateFit> candidates;
};

/// Fits every (k, structure) with max(seed classes, 1) <= k <= max and
/// returns the BIC'-maximising model. Ties prefer fewer parameters, then
/// fewer components, then catalogue order. Failed fits are skipped.
ModelSelection select_model(const Eigen::MatrixXd& points, std::span<const Block> seed_labels,
                            const SelectOptions& options);

}  // namespace vnom
