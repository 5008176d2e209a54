#include "vnom/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vnom/error.hpp"
#include "vnom/kmeans.hpp"
#include "vnom/log.hpp"
#include "vnom/rng.hpp"

namespace vnom {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const double* x, int count) {
  double mx = kNegInf;
  for (int i = 0; i < count; ++i) {
    mx = std::max(mx, x[i]);
  }
  if (mx == kNegInf) {
    return kNegInf;
  }
  double s = 0.0;
  for (int i = 0; i < count; ++i) {
    s += std::exp(x[i] - mx);
  }
  return mx + std::log(s);
}

/// Row roles in the semi-supervised likelihood.
enum class Role { kSeed, kFree, kQuasi };

struct Problem {
  const Eigen::MatrixXd& x;
  int n;
  int d;
  int k;
  std::vector<Role> role;
  std::vector<Block> seed;  // label for kSeed rows
  std::vector<int> soft_rows;  // kFree and kQuasi rows, ascending
  int num_free = 0;
  int num_quasi = 0;
};

Problem make_problem(const Eigen::MatrixXd& x, std::span<const Block> labels, int k,
                     bool allow_quasi) {
  Problem p{x, static_cast<int>(x.rows()), static_cast<int>(x.cols()), k, {}, {}, {}, 0, 0};
  if (static_cast<int>(labels.size()) != p.n) {
    throw ValidationError("seed label vector length does not match point count");
  }
  if (k < 1) {
    throw ValidationError("component count must be positive");
  }
  p.role.resize(p.n);
  p.seed.assign(p.n, 0);
  for (int i = 0; i < p.n; ++i) {
    const Block b = labels[i];
    if (b == 0) {
      p.role[i] = Role::kFree;
      p.soft_rows.push_back(i);
      ++p.num_free;
    } else if (b == kNotBlock1 && allow_quasi) {
      if (k < 2) {
        throw ValidationError("quasi-seeds need at least two components");
      }
      p.role[i] = Role::kQuasi;
      p.soft_rows.push_back(i);
      ++p.num_quasi;
    } else if (b >= 1 && b <= k) {
      p.role[i] = Role::kSeed;
      p.seed[i] = b;
    } else {
      throw ValidationError("seed label " + std::to_string(b) + " is outside 1.." +
                            std::to_string(k));
    }
  }
  return p;
}

struct Params {
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
};

/// Cholesky factors and log-determinants for the current covariances.
struct Factors {
  std::vector<Eigen::MatrixXd> lower;
  std::vector<double> log_det;
};

Factors factorize(const std::vector<Eigen::MatrixXd>& cov) {
  Factors f;
  for (std::size_t c = 0; c < cov.size(); ++c) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov[c]);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("covariance of component " + std::to_string(c + 1) +
                           " is not positive definite");
    }
    Eigen::MatrixXd l = llt.matrixL();
    f.log_det.push_back(2.0 * l.diagonal().array().log().sum());
    f.lower.push_back(std::move(l));
  }
  return f;
}

/// n x k matrix of log f_k(x_i).
Eigen::MatrixXd log_densities(const Problem& p, const Params& theta, const Factors& f) {
  Eigen::MatrixXd out(p.n, p.k);
  const double c0 = p.d * std::log(2.0 * std::numbers::pi);
  for (int c = 0; c < p.k; ++c) {
    Eigen::MatrixXd centered = (p.x.rowwise() - theta.means[c].transpose()).transpose();
    f.lower[c].triangularView<Eigen::Lower>().solveInPlace(centered);
    out.col(c) = -0.5 * (c0 + f.log_det[c] + centered.colwise().squaredNorm().transpose().array());
  }
  return out;
}

struct EStep {
  double observed = 0.0;
  Eigen::MatrixXd resp;  // n x k, one-hot on seed rows
};

EStep e_step(const Problem& p, const Params& theta, const Eigen::MatrixXd& logf) {
  EStep e;
  e.resp = Eigen::MatrixXd::Zero(p.n, p.k);
  Eigen::VectorXd log_pi = theta.weights.array().log();
  const double log_rest = p.k > 1 ? log_sum_exp(log_pi.data() + 1, p.k - 1) : kNegInf;
  std::vector<double> buf(p.k);
  for (int i = 0; i < p.n; ++i) {
    switch (p.role[i]) {
      case Role::kSeed:
        e.observed += logf(i, p.seed[i] - 1);
        e.resp(i, p.seed[i] - 1) = 1.0;
        break;
      case Role::kFree: {
        for (int c = 0; c < p.k; ++c) {
          buf[c] = log_pi[c] + logf(i, c);
        }
        const double lse = log_sum_exp(buf.data(), p.k);
        e.observed += lse;
        for (int c = 0; c < p.k; ++c) {
          e.resp(i, c) = std::exp(buf[c] - lse);
        }
        break;
      }
      case Role::kQuasi: {
        buf[0] = kNegInf;
        for (int c = 1; c < p.k; ++c) {
          buf[c] = log_pi[c] - log_rest + logf(i, c);
        }
        const double lse = log_sum_exp(buf.data() + 1, p.k - 1);
        e.observed += lse;
        for (int c = 1; c < p.k; ++c) {
          e.resp(i, c) = std::exp(buf[c] - lse);
        }
        break;
      }
    }
  }
  return e;
}

std::vector<Eigen::MatrixXd> scatter(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                                     const std::vector<Eigen::VectorXd>& means) {
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    Eigen::MatrixXd centered = x.rowwise() - means[c].transpose();
    Eigen::MatrixXd weighted = centered.array().colwise() * w.col(c).array();
    out.push_back(centered.transpose() * weighted);
  }
  return out;
}

}  // namespace

std::string_view covariance_name(CovarianceModel model) {
  switch (model) {
    case CovarianceModel::kEII:
      return "EII";
    case CovarianceModel::kVII:
      return "VII";
    case CovarianceModel::kEEI:
      return "EEI";
    case CovarianceModel::kVVI:
      return "VVI";
    case CovarianceModel::kEEE:
      return "EEE";
    case CovarianceModel::kVVV:
      return "VVV";
    case CovarianceModel::kEEV:
      return "EEV";
  }
  return "?";
}

CovarianceModel parse_covariance(std::string_view name) {
  for (CovarianceModel m : full_catalogue()) {
    if (covariance_name(m) == name) {
      return m;
    }
  }
  for (std::string_view known : {"E", "V", "X", "VEI", "EVI", "EVE", "VEE", "VVE", "VEV", "EVV",
                                 "XII", "XXI", "XXX"}) {
    if (known == name) {
      throw ValidationError("covariance structure '" + std::string(name) +
                            "' is recognized but not implemented");
    }
  }
  throw ValidationError("unknown covariance structure '" + std::string(name) + "'");
}

std::vector<CovarianceModel> full_catalogue() {
  return {CovarianceModel::kEII, CovarianceModel::kVII, CovarianceModel::kEEI,
          CovarianceModel::kVVI, CovarianceModel::kEEE, CovarianceModel::kVVV,
          CovarianceModel::kEEV};
}

int covariance_parameter_count(CovarianceModel model, int k, int d) {
  switch (model) {
    case CovarianceModel::kEII:
      return 1;
    case CovarianceModel::kVII:
      return k;
    case CovarianceModel::kEEI:
      return d;
    case CovarianceModel::kVVI:
      return k * d;
    case CovarianceModel::kEEE:
      return d * (d + 1) / 2;
    case CovarianceModel::kVVV:
      return k * d * (d + 1) / 2;
    case CovarianceModel::kEEV:
      return d * (d + 1) / 2 + (k - 1) * d * (d - 1) / 2;
  }
  return 0;
}

double GmmModel::log_density(int k, const Eigen::VectorXd& x) const {
  Eigen::LLT<Eigen::MatrixXd> llt(covariances[k - 1]);
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::VectorXd z = x - means[k - 1];
  l.triangularView<Eigen::Lower>().solveInPlace(z);
  return -0.5 * (dim * std::log(2.0 * std::numbers::pi) +
                 2.0 * l.diagonal().array().log().sum() + z.squaredNorm());
}

std::vector<Eigen::MatrixXd> estimate_covariances(CovarianceModel model,
                                                  const Eigen::MatrixXd& points,
                                                  const Eigen::MatrixXd& weights,
                                                  const std::vector<Eigen::VectorXd>& means) {
  const auto k = static_cast<int>(weights.cols());
  const auto d = static_cast<int>(points.cols());
  const Eigen::VectorXd nk = weights.colwise().sum().transpose();
  const double total = nk.sum();
  const auto w = scatter(points, weights, means);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
  for (const auto& wk : w) {
    pooled += wk;
  }
  std::vector<Eigen::MatrixXd> cov(k);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  switch (model) {
    case CovarianceModel::kEII: {
      const double lambda = pooled.trace() / (total * d);
      std::fill(cov.begin(), cov.end(), lambda * eye);
      break;
    }
    case CovarianceModel::kVII:
      for (int c = 0; c < k; ++c) {
        cov[c] = (w[c].trace() / (nk[c] * d)) * eye;
      }
      break;
    case CovarianceModel::kEEI: {
      const Eigen::MatrixXd diag = (pooled.diagonal() / total).asDiagonal();
      std::fill(cov.begin(), cov.end(), diag);
      break;
    }
    case CovarianceModel::kVVI:
      for (int c = 0; c < k; ++c) {
        cov[c] = (w[c].diagonal() / nk[c]).asDiagonal();
      }
      break;
    case CovarianceModel::kEEE:
      std::fill(cov.begin(), cov.end(), pooled / total);
      break;
    case CovarianceModel::kVVV:
      for (int c = 0; c < k; ++c) {
        cov[c] = w[c] / nk[c];
      }
      break;
    case CovarianceModel::kEEV: {
      // W_k = L_k Omega_k L_k^T with eigenvalues in decreasing order. The
      // shared volume-times-shape is sum_k Omega_k / n, orientations L_k.
      std::vector<Eigen::MatrixXd> orient(k);
      Eigen::VectorXd shape = Eigen::VectorXd::Zero(d);
      for (int c = 0; c < k; ++c) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w[c]);
        orient[c] = es.eigenvectors().rowwise().reverse();
        shape += es.eigenvalues().reverse();
      }
      shape /= total;
      for (int c = 0; c < k; ++c) {
        cov[c] = orient[c] * shape.asDiagonal() * orient[c].transpose();
        cov[c] = 0.5 * (cov[c] + cov[c].transpose()).eval();
      }
      break;
    }
  }
  return cov;
}

namespace {

/// M-step over all rows. Throws NumericalError on collapse; returns the
/// index of an empty component (0-based) or -1.
int m_step(const Problem& p, const Eigen::MatrixXd& resp, const EmOptions& opt,
           const std::optional<Eigen::VectorXd>& fixed_weights, CovarianceModel model,
           Params& theta) {
  const Eigen::VectorXd nk = resp.colwise().sum().transpose();
  for (int c = 0; c < p.k; ++c) {
    if (nk[c] < 1.0) {
      return c;
    }
  }
  theta.means.assign(p.k, Eigen::VectorXd());
  for (int c = 0; c < p.k; ++c) {
    theta.means[c] = (p.x.transpose() * resp.col(c)) / nk[c];
  }
  theta.covariances = estimate_covariances(model, p.x, resp, theta.means);
  for (int c = 0; c < p.k; ++c) {
    Eigen::MatrixXd& s = theta.covariances[c];
    s += (opt.ridge * s.trace() / p.d) * Eigen::MatrixXd::Identity(p.d, p.d);
    const double smallest =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly)
            .eigenvalues()[0];
    if (!(smallest >= opt.collapse_eigenvalue)) {
      throw NumericalError("covariance collapse in component " + std::to_string(c + 1) +
                           " (smallest eigenvalue " + std::to_string(smallest) + ")");
    }
  }
  if (fixed_weights) {
    theta.weights = *fixed_weights;
    return -1;
  }
  // Mixing weights come from the unlabelled rows only.
  Eigen::VectorXd free_sum = Eigen::VectorXd::Zero(p.k);
  Eigen::VectorXd quasi_sum = Eigen::VectorXd::Zero(p.k);
  for (int i : p.soft_rows) {
    if (p.role[i] == Role::kFree) {
      free_sum += resp.row(i).transpose();
    } else {
      quasi_sum += resp.row(i).transpose();
    }
  }
  if (p.num_quasi == 0) {
    if (p.num_free == 0) {
      theta.weights = Eigen::VectorXd::Constant(p.k, 1.0 / p.k);
    } else {
      theta.weights = free_sum / static_cast<double>(p.num_free);
    }
  } else {
    // pi_1 from the free rows; the remaining mass split by free + quasi
    // responsibility, which maximises the quasi-seeded likelihood.
    const double pi1 = p.num_free > 0 ? free_sum[0] / p.num_free : 0.0;
    const Eigen::VectorXd rest = (free_sum + quasi_sum).tail(p.k - 1);
    theta.weights.resize(p.k);
    theta.weights[0] = pi1;
    theta.weights.tail(p.k - 1) = (1.0 - pi1) * rest / rest.sum();
  }
  return -1;
}

GmmModel fit(const Eigen::MatrixXd& points, std::span<const Block> seed_labels, int k,
             CovarianceModel model, std::span<const Block> init_labels, const EmOptions& opt,
             bool allow_quasi) {
  const Problem p = make_problem(points, seed_labels, k, allow_quasi);
  if (static_cast<int>(init_labels.size()) != p.n) {
    throw ValidationError("initial label vector length does not match point count");
  }
  std::optional<Eigen::VectorXd> fixed_weights;
  if (opt.block_sizes) {
    if (static_cast<int>(opt.block_sizes->size()) != k) {
      throw ValidationError("fixed block sizes must have one entry per component");
    }
    Eigen::VectorXd w(k);
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      w[c] = (*opt.block_sizes)[c];
      total += w[c];
    }
    fixed_weights = w / total;
  }

  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(p.n, k);
  for (int i = 0; i < p.n; ++i) {
    Block b = p.role[i] == Role::kSeed ? p.seed[i] : init_labels[i];
    if (b < 1 || b > k) {
      throw ValidationError("initial label " + std::to_string(b) + " outside 1.." +
                            std::to_string(k));
    }
    if (p.role[i] == Role::kQuasi && b == 1) {
      b = 2;
    }
    resp(i, b - 1) = 1.0;
  }

  GmmModel out;
  out.num_components = k;
  out.dim = p.d;
  out.covariance = model;
  out.weights_fixed = fixed_weights.has_value();

  Params theta;
  std::vector<int> reseeds(k, 0);
  auto run_m_step = [&](Eigen::MatrixXd& r, int iteration) {
    for (;;) {
      const int empty = m_step(p, r, opt, fixed_weights, model, theta);
      if (empty < 0) {
        return;
      }
      if (++reseeds[empty] > 1 || p.soft_rows.empty()) {
        throw NumericalError("component " + std::to_string(empty + 1) + " emptied twice");
      }
      // Move the least confidently assigned unlabelled row into the empty
      // component and redo the M-step.
      int pick = -1;
      double lowest = std::numeric_limits<double>::infinity();
      for (int i : p.soft_rows) {
        if (p.role[i] == Role::kQuasi && empty == 0) {
          continue;
        }
        const double mx = r.row(i).maxCoeff();
        if (mx < lowest) {
          lowest = mx;
          pick = i;
        }
      }
      if (pick < 0) {
        throw NumericalError("component " + std::to_string(empty + 1) + " is empty");
      }
      r.row(pick).setZero();
      r(pick, empty) = 1.0;
      out.reseeded_at.push_back(iteration);
    }
  };

  run_m_step(resp, 0);
  EStep e;
  double previous = kNegInf;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    const Factors f = factorize(theta.covariances);
    const Eigen::MatrixXd logf = log_densities(p, theta, f);
    e = e_step(p, theta, logf);
    if (!std::isfinite(e.observed)) {
      throw NumericalError("non-finite log-likelihood");
    }
    out.trace.push_back(e.observed);
    out.iterations = iter;
    if (iter > 1 && std::abs(e.observed - previous) <= opt.tol * std::abs(e.observed)) {
      out.converged = true;
      break;
    }
    previous = e.observed;
    if (iter == opt.max_iter) {
      break;
    }
    run_m_step(e.resp, iter);
  }

  // Final quantities at the parameters that produced the last E-step.
  const Factors f = factorize(theta.covariances);
  const Eigen::MatrixXd logf = log_densities(p, theta, f);
  out.weights = theta.weights;
  out.means = theta.means;
  out.covariances = theta.covariances;
  out.observed_log_likelihood = e.observed;
  out.hard_labels.assign(p.n, 0);
  out.responsibility_rows = p.soft_rows;
  out.responsibilities.resize(static_cast<Eigen::Index>(p.soft_rows.size()), k);
  const Eigen::VectorXd log_pi = theta.weights.array().log();
  const double log_rest = k > 1 ? log_sum_exp(log_pi.data() + 1, k - 1) : kNegInf;
  double complete = 0.0;
  for (int i = 0; i < p.n; ++i) {
    if (p.role[i] == Role::kSeed) {
      out.hard_labels[i] = p.seed[i];
      complete += logf(i, p.seed[i] - 1);
      continue;
    }
    Eigen::Index best = 0;
    e.resp.row(i).maxCoeff(&best);
    out.hard_labels[i] = static_cast<Block>(best + 1);
    complete += logf(i, best) + log_pi[best];
    if (p.role[i] == Role::kQuasi) {
      complete -= log_rest;
    }
  }
  for (std::size_t r = 0; r < p.soft_rows.size(); ++r) {
    out.responsibilities.row(static_cast<Eigen::Index>(r)) = e.resp.row(p.soft_rows[r]);
  }
  out.log_likelihood = complete;
  out.parameter_count = (fixed_weights ? 0 : k - 1) + k * p.d +
                        covariance_parameter_count(model, k, p.d);
  // Quasi-seeds belong to S, so only free rows count towards n - m.
  out.bic_prime = p.num_free > 0
                      ? 2.0 * complete - out.parameter_count * std::log(p.num_free)
                      : 2.0 * complete;
  return out;
}

}  // namespace

GmmModel em_fit(const Eigen::MatrixXd& points, std::span<const Block> seed_labels, int k,
                CovarianceModel model, std::span<const Block> init_labels,
                const EmOptions& options) {
  return fit(points, seed_labels, k, model, init_labels, options, false);
}

GmmModel quasi_seed_em_fit(const Eigen::MatrixXd& points, std::span<const Block> seed_labels,
                           int k, CovarianceModel model, std::span<const Block> init_labels,
                           const EmOptions& options) {
  return fit(points, seed_labels, k, model, init_labels, options, true);
}

double bic_prime(double log_likelihood, int parameter_count, int n, int m) {
  if (n <= m) {
    throw ValidationError("BIC' needs unlabelled points (n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
  }
  return 2.0 * log_likelihood - parameter_count * std::log(static_cast<double>(n - m));
}

double bic_prime(const GmmModel& model, int n, int m) {
  return bic_prime(model.log_likelihood, model.parameter_count, n, m);
}

ModelSelection select_model(const Eigen::MatrixXd& points, std::span<const Block> seed_labels,
                            const SelectOptions& options) {
  if (options.catalogue.empty()) {
    throw ValidationError("empty covariance catalogue");
  }
  Block max_seed = 0;
  bool quasi = false;
  int seeds = 0;
  for (Block b : seed_labels) {
    max_seed = std::max(max_seed, b);
    quasi = quasi || b == kNotBlock1;
    seeds += b != 0 ? 1 : 0;
  }
  const int k_min = std::max<int>({1, max_seed, quasi ? 2 : 1});
  if (options.max_components < k_min) {
    throw ValidationError("maximum component count " + std::to_string(options.max_components) +
                          " is below the number of seed classes " + std::to_string(k_min));
  }
  const int n = static_cast<int>(points.rows());

  ModelSelection sel;
  bool have_best = false;
  std::size_t best_order = 0;
  std::uint64_t index = 0;
  std::vector<Block> init_seeds(seed_labels.begin(), seed_labels.end());
  for (Block& b : init_seeds) {
    if (b == kNotBlock1) {
      b = 0;
    }
  }
  for (int k = k_min; k <= options.max_components; ++k) {
    for (std::size_t c = 0; c < options.catalogue.size(); ++c, ++index) {
      const CovarianceModel model = options.catalogue[c];
      CandidateFit cand;
      cand.num_components = k;
      cand.covariance = model;
      try {
        Rng rng(stream_seed(options.rng_seed, index));
        EmOptions em = options.em;
        if (em.block_sizes && static_cast<int>(em.block_sizes->size()) != k) {
          em.block_sizes.reset();
        }
        const auto init = ss_kmeanspp_init(points, init_seeds, k, rng);
        GmmModel fit = quasi ? quasi_seed_em_fit(points, seed_labels, k, model, init, em)
                             : em_fit(points, seed_labels, k, model, init, em);
        const double ll = options.likelihood == SelectionLikelihood::kComplete
                              ? fit.log_likelihood
                              : fit.observed_log_likelihood;
        fit.bic_prime = n > seeds ? bic_prime(ll, fit.parameter_count, n, seeds) : 2.0 * ll;
        cand.ok = true;
        cand.parameter_count = fit.parameter_count;
        cand.log_likelihood = ll;
        cand.bic_prime = fit.bic_prime;
        bool better = !have_best;
        if (have_best) {
          const GmmModel& b = sel.best;
          if (fit.bic_prime != b.bic_prime) {
            better = fit.bic_prime > b.bic_prime;
          } else if (fit.parameter_count != b.parameter_count) {
            better = fit.parameter_count < b.parameter_count;
          } else if (k != b.num_components) {
            better = k < b.num_components;
          } else {
            better = c < best_order;
          }
        }
        if (better) {
          sel.best = std::move(fit);
          best_order = c;
          have_best = true;
        }
      } catch (const NumericalError& err) {
        cand.failure = err.what();
        log::warn("skipping " + std::string(covariance_name(model)) + " with k=" +
                  std::to_string(k) + ": " + err.what());
      }
      sel.candidates.push_back(std::move(cand));
    }
  }
  if (!have_best) {
    throw NumericalError("every candidate mixture fit failed");
  }
  return sel;
}

}  // namespace vnom
