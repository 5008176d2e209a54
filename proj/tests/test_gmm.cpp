#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vnom/error.hpp"
#include "vnom/gmm.hpp"
#include "vnom/kmeans.hpp"

namespace vnom {
namespace {

struct Mixture {
  Eigen::MatrixXd x;
  std::vector<Block> truth;
};

/// Draws `n_per` points from each Gaussian N(mu_c, L_c L_c^T).
Mixture sample_mixture(const std::vector<Eigen::VectorXd>& mu, const std::vector<Eigen::MatrixXd>& chol,
                       const std::vector<int>& n_per, Rng& rng) {
  const auto d = mu.front().size();
  Mixture m;
  m.x.resize(std::accumulate(n_per.begin(), n_per.end(), 0), d);
  int row = 0;
  for (std::size_t c = 0; c < mu.size(); ++c) {
    for (int i = 0; i < n_per[c]; ++i, ++row) {
      Eigen::VectorXd z(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        z[j] = normal01(rng);
      }
      m.x.row(row) = (mu[c] + chol[c] * z).transpose();
      m.truth.push_back(static_cast<Block>(c + 1));
    }
  }
  return m;
}

Mixture three_blobs(double sep, int n_per, Rng& rng) {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  return sample_mixture({Eigen::Vector2d(0, 0), Eigen::Vector2d(sep, 0), Eigen::Vector2d(0, sep)},
                        {eye, 0.7 * eye, 1.3 * eye}, {n_per, n_per, n_per}, rng);
}

/// First `per` points of every class become seeds.
std::vector<Block> seeds_from(const Mixture& m, int per) {
  std::vector<Block> s(m.truth.size(), 0);
  std::vector<int> used(8, 0);
  for (std::size_t i = 0; i < m.truth.size(); ++i) {
    if (used[m.truth[i]]++ < per) {
      s[i] = m.truth[i];
    }
  }
  return s;
}

std::vector<Block> init_for(const Eigen::MatrixXd& x, const std::vector<Block>& seeds, int k,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Block> plain = seeds;
  for (Block& b : plain) {
    b = b < 0 ? 0 : b;
  }
  return ss_kmeanspp_init(x, plain, k, rng);
}

TEST(Covariance, NamesAndParsing) {
  for (CovarianceModel m : full_catalogue()) {
    EXPECT_EQ(parse_covariance(covariance_name(m)), m);
  }
  EXPECT_THROW(parse_covariance("VEV"), ValidationError);
  EXPECT_THROW(parse_covariance("QQQ"), ValidationError);
}

TEST(Covariance, ParameterCounts) {
  EXPECT_EQ(covariance_parameter_count(CovarianceModel::kEII, 3, 4), 1);
  EXPECT_EQ(covariance_parameter_count(CovarianceModel::kVII, 3, 4), 3);
  EXPECT_EQ(covariance_parameter_count(CovarianceModel::kEEI, 3, 4), 4);
  EXPECT_EQ(covariance_parameter_count(CovarianceModel::kVVI, 3, 4), 12);
  EXPECT_EQ(covariance_parameter_count(CovarianceModel::kEEE, 3, 4), 10);
  EXPECT_EQ(covariance_parameter_count(CovarianceModel::kVVV, 3, 4), 30);
  EXPECT_EQ(covariance_parameter_count(CovarianceModel::kEEV, 3, 4), 22);
}

/// Upper triangles of every covariance, stacked.
Eigen::VectorXd flatten(const std::vector<Eigen::MatrixXd>& cov) {
  const auto d = cov.front().rows();
  Eigen::VectorXd out(static_cast<Eigen::Index>(cov.size()) * d * (d + 1) / 2);
  Eigen::Index at = 0;
  for (const auto& s : cov) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i; j < d; ++j) {
        out[at++] = s(i, j);
      }
    }
  }
  return out;
}

// The covariance count is the dimension of the set of covariance tuples a
// structure can produce: the rank of the Jacobian of the M-step map with
// respect to the data, estimated by finite differences.
TEST(Covariance, ParameterCountIsJacobianRank) {
  const int n = 36, d = 3, k = 3;
  Rng rng(17);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      x(i, j) = normal01(rng) + (i % k) * 2.0;
    }
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, k);
  for (int i = 0; i < n; ++i) {
    w(i, i % k) = 1.0;
  }
  std::vector<Eigen::VectorXd> means(k, Eigen::VectorXd::Zero(d));
  for (int c = 0; c < k; ++c) {
    means[c] = Eigen::VectorXd::Constant(d, 2.0 * c);
  }
  for (CovarianceModel m : full_catalogue()) {
    const Eigen::VectorXd base = flatten(estimate_covariances(m, x, w, means));
    const int probes = 3 * static_cast<int>(base.size());
    Eigen::MatrixXd jac(base.size(), probes);
    const double h = 1e-6;
    for (int t = 0; t < probes; ++t) {
      Eigen::MatrixXd dx(n, d);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
          dx(i, j) = normal01(rng);
        }
      }
      const Eigen::VectorXd plus = flatten(estimate_covariances(m, x + h * dx, w, means));
      const Eigen::VectorXd minus = flatten(estimate_covariances(m, x - h * dx, w, means));
      jac.col(t) = (plus - minus) / (2.0 * h);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const Eigen::VectorXd sv = svd.singularValues();
    const int rank = static_cast<int>((sv.array() > 1e-6 * sv[0]).count());
    EXPECT_EQ(rank, covariance_parameter_count(m, k, d)) << covariance_name(m);
  }
}

bool is_diagonal(const Eigen::MatrixXd& s) {
  return (s - Eigen::MatrixXd(s.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

TEST(Covariance, StructuralConstraints) {
  Rng rng(4);
  const Mixture m = three_blobs(6.0, 60, rng);
  const auto seeds = seeds_from(m, 5);
  for (CovarianceModel model : full_catalogue()) {
    const GmmModel fit = em_fit(m.x, seeds, 3, model, init_for(m.x, seeds, 3, 1));
    const auto& s = fit.covariances;
    const double tol = 1e-12 * s[0].cwiseAbs().maxCoeff();
    const std::string name(covariance_name(model));
    for (const auto& c : s) {
      EXPECT_LE((c - c.transpose()).cwiseAbs().maxCoeff(), tol) << name;
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues()[0], 0.0) << name;
    }
    const bool spherical = model == CovarianceModel::kEII || model == CovarianceModel::kVII;
    const bool diagonal = spherical || model == CovarianceModel::kEEI || model == CovarianceModel::kVVI;
    const bool equal = model == CovarianceModel::kEII || model == CovarianceModel::kEEI ||
                       model == CovarianceModel::kEEE;
    for (const auto& c : s) {
      if (diagonal) {
        EXPECT_TRUE(is_diagonal(c)) << name;
      }
      if (spherical) {
        EXPECT_NEAR(c(0, 0), c(1, 1), tol) << name;
      }
      if (equal) {
        EXPECT_LE((c - s[0]).cwiseAbs().maxCoeff(), tol) << name;
      }
    }
    if (model == CovarianceModel::kEEV) {
      const Eigen::VectorXd ev0 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s[0]).eigenvalues();
      for (const auto& c : s) {
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues();
        EXPECT_LE((ev - ev0).cwiseAbs().maxCoeff(), 1e-10 * ev0.maxCoeff()) << name;
      }
    }
    if (!equal && model != CovarianceModel::kEEV) {
      EXPECT_GT((s[1] - s[2]).cwiseAbs().maxCoeff(), 1e-3) << name;
    }
  }
}

TEST(EmFit, LikelihoodMonotoneAndResponsibilitiesNormalised) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    const Mixture m = three_blobs(3.0, 80, rng);
    const auto seeds = seeds_from(m, 3);
    for (CovarianceModel model : full_catalogue()) {
      for (int k = 3; k <= 4; ++k) {
        GmmModel fit;
        try {
          fit = em_fit(m.x, seeds, k, model, init_for(m.x, seeds, k, seed));
        } catch (const NumericalError&) {
          continue;
        }
        for (std::size_t t = 1; t < fit.trace.size(); ++t) {
          const bool reseeded = std::find(fit.reseeded_at.begin(), fit.reseeded_at.end(),
                                          static_cast<int>(t)) != fit.reseeded_at.end();
          if (!reseeded) {
            EXPECT_GE(fit.trace[t], fit.trace[t - 1] - 1e-9 * std::abs(fit.trace[t - 1]))
                << covariance_name(model) << " k=" << k << " t=" << t;
          }
        }
        for (Eigen::Index r = 0; r < fit.responsibilities.rows(); ++r) {
          EXPECT_NEAR(fit.responsibilities.row(r).sum(), 1.0, 1e-12);
        }
        EXPECT_NEAR(fit.weights.sum(), 1.0, 1e-12);
      }
    }
  }
}

TEST(EmFit, SingleComponentIsClosedForm) {
  Rng rng(8);
  const Eigen::MatrixXd l = (Eigen::MatrixXd(2, 2) << 1.0, 0.0, 0.6, 0.5).finished();
  const Mixture m = sample_mixture({Eigen::Vector2d(1, -2)}, {l}, {200}, rng);
  const std::vector<Block> none(200, 0), init(200, 1);
  const Eigen::RowVectorXd mean = m.x.colwise().mean();
  const Eigen::MatrixXd centred = m.x.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / 200.0;
  const GmmModel vvv = em_fit(m.x, none, 1, CovarianceModel::kVVV, init);
  EXPECT_LE((vvv.means[0] - mean.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((vvv.covariances[0] - cov).cwiseAbs().maxCoeff(), 1e-7);
  const GmmModel eii = em_fit(m.x, none, 1, CovarianceModel::kEII, init);
  EXPECT_NEAR(eii.covariances[0](0, 0), cov.trace() / 2.0, 1e-7);
  EXPECT_LE(vvv.iterations, 2);
}

TEST(EmFit, EqualWeightEiiBoundaryIsBisector) {
  Rng rng(12);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const Mixture m =
      sample_mixture({Eigen::Vector2d(-2, 0), Eigen::Vector2d(2, 0)}, {eye, eye}, {150, 150}, rng);
  const auto seeds = seeds_from(m, 10);
  EmOptions opt;
  opt.block_sizes = std::vector<int>{150, 150};
  const GmmModel fit = em_fit(m.x, seeds, 2, CovarianceModel::kEII, init_for(m.x, seeds, 2, 3), opt);
  for (int t = 0; t < 500; ++t) {
    const Eigen::Vector2d x(4.0 * normal01(rng), 4.0 * normal01(rng));
    const double by_density = fit.log_density(1, x) - fit.log_density(2, x);
    const double by_distance = (x - fit.means[1]).squaredNorm() - (x - fit.means[0]).squaredNorm();
    if (std::abs(by_distance) > 1e-9) {
      EXPECT_EQ(by_density > 0.0, by_distance > 0.0);
    }
  }
}

TEST(EmFit, RecoversKnownVvvMixture) {
  Rng rng(21);
  const Eigen::MatrixXd l1 = (Eigen::MatrixXd(2, 2) << 1.0, 0.0, 0.5, 0.8).finished();
  const Eigen::MatrixXd l2 = (Eigen::MatrixXd(2, 2) << 0.6, 0.0, -0.3, 1.2).finished();
  const std::vector<Eigen::VectorXd> mu = {Eigen::Vector2d(0, 0), Eigen::Vector2d(6, 3)};
  const Mixture m = sample_mixture(mu, {l1, l2}, {2000, 3000}, rng);
  const auto seeds = seeds_from(m, 50);
  const GmmModel fit = em_fit(m.x, seeds, 2, CovarianceModel::kVVV, init_for(m.x, seeds, 2, 5));
  const double pi[2] = {0.4, 0.6};
  const int n_free = 4900;
  EXPECT_NEAR(fit.weights[0], 1950.0 / n_free, 3.0 * std::sqrt(pi[0] * pi[1] / n_free));
  const std::vector<Eigen::MatrixXd> sigma = {l1 * l1.transpose(), l2 * l2.transpose()};
  for (int c = 0; c < 2; ++c) {
    const double nc = c == 0 ? 2000.0 : 3000.0;
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(fit.means[c][i], mu[c][i], 3.0 * std::sqrt(sigma[c](i, i) / nc));
      for (int j = 0; j < 2; ++j) {
        const double se = std::sqrt((sigma[c](i, i) * sigma[c](j, j) + sigma[c](i, j) * sigma[c](i, j)) / nc);
        EXPECT_NEAR(fit.covariances[c](i, j), sigma[c](i, j), 3.0 * se);
      }
    }
  }
}

TEST(EmFit, EmptyComponentIsReseeded) {
  // Everything starts in component 1; the reseeded row sits in the left
  // blob, far from the pooled mean, so component 2 survives.
  Rng rng(3);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const Mixture m =
      sample_mixture({Eigen::Vector2d(0, 0), Eigen::Vector2d(50, 0)}, {eye, eye}, {45, 45}, rng);
  const std::vector<Block> none(90, 0), init(90, 1);
  const GmmModel fit = em_fit(m.x, none, 2, CovarianceModel::kEII, init);
  ASSERT_FALSE(fit.reseeded_at.empty());
  EXPECT_EQ(fit.reseeded_at.front(), 0);
  EXPECT_TRUE(std::isfinite(fit.observed_log_likelihood));
}

TEST(EmFit, CollapseRaisesNumericalError) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(20, 2);
  for (int i = 10; i < 20; ++i) {
    x.row(i) << 5.0 + 0.1 * i, 1.0 - 0.05 * i;
  }
  std::vector<Block> seeds(20, 0), init(20, 2);
  for (int i = 0; i < 10; ++i) {
    seeds[i] = 1;
  }
  EXPECT_THROW(em_fit(x, seeds, 2, CovarianceModel::kVVV, init), NumericalError);
}

TEST(EmFit, RejectsBadLabels) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 2);
  const std::vector<Block> init(6, 1);
  EXPECT_THROW(em_fit(x, std::vector<Block>{3, 0, 0, 0, 0, 0}, 2, CovarianceModel::kEII, init),
               ValidationError);
  EXPECT_THROW(em_fit(x, std::vector<Block>{kNotBlock1, 0, 0, 0, 0, 0}, 2, CovarianceModel::kEII, init),
               ValidationError);
  EXPECT_THROW(em_fit(x, std::vector<Block>(5, 0), 2, CovarianceModel::kEII, init), ValidationError);
}

TEST(QuasiSeed, WithoutQuasiSeedsMatchesEmFitBitwise) {
  Rng rng(6);
  const Mixture m = three_blobs(3.0, 50, rng);
  const auto seeds = seeds_from(m, 4);
  const auto init = init_for(m.x, seeds, 3, 2);
  for (CovarianceModel model : full_catalogue()) {
    const GmmModel a = em_fit(m.x, seeds, 3, model, init);
    const GmmModel b = quasi_seed_em_fit(m.x, seeds, 3, model, init);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.log_likelihood, b.log_likelihood);
    EXPECT_EQ(a.hard_labels, b.hard_labels);
  }
}

TEST(QuasiSeed, TwoComponentsReduceToFullSeeding) {
  Rng rng(7);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const Mixture m =
      sample_mixture({Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 1)}, {eye, eye}, {60, 60}, rng);
  auto full = seeds_from(m, 6);
  auto quasi = full;
  for (Block& b : quasi) {
    b = b == 2 ? kNotBlock1 : b;
  }
  const auto init = init_for(m.x, full, 2, 1);
  const GmmModel a = em_fit(m.x, full, 2, CovarianceModel::kVVV, init);
  const GmmModel b = quasi_seed_em_fit(m.x, quasi, 2, CovarianceModel::kVVV, init);
  EXPECT_LE(std::abs(a.weights[0] - b.weights[0]), 1e-12);
  for (int c = 0; c < 2; ++c) {
    EXPECT_LE((a.means[c] - b.means[c]).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((a.covariances[c] - b.covariances[c]).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_EQ(a.hard_labels, b.hard_labels);
}

/// Error on unlabelled-in-both rows, with components 2..k matched to
/// classes 2..k by the best permutation.
double error_rate(const GmmModel& fit, const Mixture& m, const std::vector<Block>& full) {
  std::vector<Block> perm = {2, 3};
  double best = 1.0;
  do {
    int wrong = 0, total = 0;
    for (std::size_t i = 0; i < m.truth.size(); ++i) {
      if (full[i] != 0) {
        continue;
      }
      Block h = fit.hard_labels[i];
      h = h == 1 ? 1 : perm[h - 2];
      wrong += h != m.truth[i] ? 1 : 0;
      ++total;
    }
    best = std::min(best, static_cast<double>(wrong) / total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(QuasiSeed, InformationOrdering) {
  double full_err = 0.0, quasi_err = 0.0, unseeded_err = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    Rng rng(100 + s);
    const Mixture m = three_blobs(2.5, 100, rng);
    const auto full = seeds_from(m, 10);
    auto quasi = full, unseeded = full;
    for (std::size_t i = 0; i < full.size(); ++i) {
      quasi[i] = full[i] > 1 ? kNotBlock1 : full[i];
      unseeded[i] = full[i] > 1 ? 0 : full[i];
    }
    const auto init_full = init_for(m.x, full, 3, s);
    const auto init_rest = init_for(m.x, unseeded, 3, s);
    full_err += error_rate(em_fit(m.x, full, 3, CovarianceModel::kVVV, init_full), m, full);
    quasi_err += error_rate(quasi_seed_em_fit(m.x, quasi, 3, CovarianceModel::kVVV, init_rest), m, full);
    unseeded_err += error_rate(em_fit(m.x, unseeded, 3, CovarianceModel::kVVV, init_rest), m, full);
  }
  EXPECT_LE(quasi_err / 10, full_err / 10 + 0.05);
  EXPECT_LE(quasi_err, unseeded_err + 1e-12);
}

TEST(BicPrime, PenaltyArithmetic) {
  EXPECT_DOUBLE_EQ(bic_prime(-12.5, 0, 100, 10), -25.0);
  EXPECT_GT(bic_prime(-12.5, 3, 100, 10), bic_prime(-12.5, 4, 100, 10));
  EXPECT_DOUBLE_EQ(bic_prime(-12.5, 4, 100, 10), -25.0 - 4.0 * std::log(90.0));
  EXPECT_THROW(bic_prime(-1.0, 1, 5, 5), ValidationError);
  // BIC with log n versus BIC' with log(n - m): the gap is tau log(n/(n-m)).
  for (int n : {100, 10000, 1000000}) {
    const int m = 10;
    const double bic = 2.0 * -7.0 - 6.0 * std::log(n);
    const double gap = std::abs(bic - bic_prime(-7.0, 6, n, m));
    EXPECT_NEAR(gap, 6.0 * std::log(static_cast<double>(n) / (n - m)), 1e-9);
  }
  EXPECT_LT(6.0 * std::log(1e6 / (1e6 - 10)), 1e-4);
}

TEST(BicPrime, ModelOverloadUsesCompleteLikelihood) {
  Rng rng(1);
  const Mixture m = three_blobs(4.0, 40, rng);
  const auto seeds = seeds_from(m, 2);
  const GmmModel fit = em_fit(m.x, seeds, 3, CovarianceModel::kEEE, init_for(m.x, seeds, 3, 1));
  EXPECT_DOUBLE_EQ(bic_prime(fit, 120, 6), 2.0 * fit.log_likelihood - fit.parameter_count * std::log(114.0));
  EXPECT_EQ(fit.parameter_count, 2 + 3 * 2 + 3);
}

TEST(SelectModel, SingleEntryCatalogue) {
  Rng rng(2);
  const Mixture m = three_blobs(4.0, 40, rng);
  SelectOptions opt;
  opt.catalogue = {CovarianceModel::kVVI};
  opt.max_components = 3;
  const auto sel = select_model(m.x, seeds_from(m, 2), opt);
  EXPECT_EQ(sel.best.covariance, CovarianceModel::kVVI);
  EXPECT_EQ(sel.candidates.size(), 1u);
}

TEST(SelectModel, RecoversThreeSphericalClusters) {
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(stream_seed(11, trial));
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    const Mixture m = sample_mixture({Eigen::Vector2d(0, 0), Eigen::Vector2d(10, 0), Eigen::Vector2d(0, 10)},
                                     {eye, eye, eye}, {60, 60, 60}, rng);
    std::vector<Block> seeds(m.truth.size(), 0);
    seeds[0] = 1;
    SelectOptions opt;
    opt.catalogue = {CovarianceModel::kEII, CovarianceModel::kVVV};
    opt.rng_seed = trial;
    hits += select_model(m.x, seeds, opt).best.num_components == 3 ? 1 : 0;
  }
  EXPECT_GE(hits, 95);
}

TEST(SelectModel, CandidateTableAndBounds) {
  Rng rng(5);
  const Mixture m = three_blobs(4.0, 40, rng);
  const auto seeds = seeds_from(m, 2);
  SelectOptions opt;
  opt.max_components = 4;
  const auto sel = select_model(m.x, seeds, opt);
  // K ranges over 3..4 because three seed classes are present.
  EXPECT_EQ(sel.candidates.size(), 2 * full_catalogue().size());
  for (const auto& c : sel.candidates) {
    if (c.ok) {
      EXPECT_LE(c.bic_prime, sel.best.bic_prime);
    }
  }
  opt.max_components = 2;
  EXPECT_THROW(select_model(m.x, seeds, opt), ValidationError);
  opt.catalogue.clear();
  EXPECT_THROW(select_model(m.x, seeds, opt), ValidationError);
}

TEST(SelectModel, DeterministicUnderSeed) {
  Rng rng(5);
  const Mixture m = three_blobs(2.0, 40, rng);
  const auto seeds = seeds_from(m, 2);
  SelectOptions opt;
  const auto a = select_model(m.x, seeds, opt);
  const auto b = select_model(m.x, seeds, opt);
  EXPECT_EQ(a.best.hard_labels, b.best.hard_labels);
  EXPECT_EQ(a.best.bic_prime, b.best.bic_prime);
}

}  // namespace
}  // namespace vnom
