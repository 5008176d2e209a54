#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "helpers.hpp"
#include "vnom/canonical.hpp"
#include "vnom/error.hpp"
#include "vnom/mcmc.hpp"

namespace vnom {
namespace {

TEST(ChainState, IncrementalRatioMatchesRecount) {
  const auto inst = testing::random_instance(3, 30, 21);
  Rng rng(4);
  ChainState state = ChainState::uniform(inst.graph, inst.params, rng);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const auto [u, v] = state.propose(rng);
    const double before = state.recount_log_likelihood();
    const double delta = state.log_ratio(u, v);
    state.apply_swap(u, v, delta);
    worst = std::max(worst, std::abs(state.recount_log_likelihood() - before - delta));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(ChainState, StepsConserveBlockCounts) {
  const auto inst = testing::random_instance(3, 12, 9);
  Rng rng(2);
  ChainState state = ChainState::uniform(inst.graph, inst.params, rng);
  for (int t = 0; t < 5000; ++t) {
    state.step(rng);
    ASSERT_NO_THROW(validate_assignment(inst.graph, inst.params.block_sizes, state.assignment()));
  }
}

TEST(ChainState, ProposalRejectsSingleLabel) {
  auto inst = testing::random_instance(2, 4, 1);
  // Put every ambiguous vertex in block 1.
  inst.params.block_sizes[0] += inst.params.block_sizes[1] - inst.graph.seed_count(2);
  inst.params.block_sizes[1] = inst.graph.seed_count(2);
  Rng rng(1);
  ChainState state = ChainState::uniform(inst.graph, inst.params, rng);
  EXPECT_EQ(state.cross_pair_count(), 0);
  EXPECT_THROW(state.propose(rng), ValidationError);
}

/// Full transition matrix of the chain over Phi, built from the proposal
/// and acceptance rules stated independently of the implementation.
TEST(ChainState, DetailedBalanceOnEnumerableInstance) {
  const auto inst = testing::random_instance(3, 6, 33);
  const auto bf = testing::brute_force_posterior(inst.graph, inst.params);
  std::map<std::vector<Block>, std::size_t> index;
  for (std::size_t s = 0; s < bf.labellings.size(); ++s) {
    index[bf.labellings[s]] = s;
  }
  const auto amb = inst.graph.ambiguous();
  const std::size_t n = bf.labellings.size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    ChainState state(inst.graph, inst.params, BlockAssignment{bf.labellings[s]});
    const double pairs = static_cast<double>(state.cross_pair_count());
    for (std::size_t i = 0; i < amb.size(); ++i) {
      for (std::size_t j = i + 1; j < amb.size(); ++j) {
        if (state.label(amb[i]) == state.label(amb[j])) {
          continue;
        }
        auto next = bf.labellings[s];
        std::swap(next[amb[i]], next[amb[j]]);
        const std::size_t t = index.at(next);
        ChainState other(inst.graph, inst.params, BlockAssignment{next});
        // Both states have the same cross-pair count (swap keeps the
        // label multiset), so the Hastings correction is 1.
        ASSERT_EQ(other.cross_pair_count(), state.cross_pair_count());
        const double accept = std::min(1.0, bf.probability[t] / bf.probability[s]);
        EXPECT_NEAR(std::exp(state.log_ratio(amb[i], amb[j])),
                    bf.probability[t] / bf.probability[s], 1e-9 * (1.0 + bf.probability[t] / bf.probability[s]));
        p(s, t) += accept / pairs;
      }
    }
    p(s, s) = 1.0 - p.row(s).sum();
  }
  double worst = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      worst = std::max(worst, std::abs(bf.probability[s] * p(s, t) - bf.probability[t] * p(t, s)));
    }
  }
  EXPECT_LE(worst, 1e-9);
  // Stationarity follows: pi P = pi.
  Eigen::RowVectorXd pi = Eigen::Map<const Eigen::RowVectorXd>(bf.probability.data(), n);
  EXPECT_LE((pi * p - pi).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(RunChain, FrequenciesApproachExactPosterior) {
  const auto inst = testing::random_instance(2, 7, 12);
  const auto exact = enumerate_posterior(inst.graph, inst.params);
  McmcConfig cfg;
  cfg.num_steps = 400000;
  cfg.burn_in = 1000;
  cfg.rng_seed = 3;
  const auto est = run_chain(inst.graph, inst.params, cfg);
  EXPECT_EQ(est.num_samples, cfg.num_steps - cfg.burn_in);
  for (std::size_t i = 0; i < exact.vertices.size(); ++i) {
    EXPECT_NEAR(est.block1_frequency[i], exact.block1_probability[i], 0.02);
  }
  const double sum = std::accumulate(est.block1_frequency.begin(), est.block1_frequency.end(), 0.0);
  EXPECT_NEAR(sum, inst.params.block_sizes[0] - inst.graph.seed_count(1), 1e-9);
  EXPECT_LE(est.max_audit_drift, 1e-8);
}

TEST(RunChain, DeterministicUnderSeed) {
  const auto inst = testing::random_instance(3, 20, 2);
  McmcConfig cfg;
  cfg.num_steps = 20000;
  cfg.rng_seed = 17;
  const auto a = run_chain(inst.graph, inst.params, cfg);
  const auto b = run_chain(inst.graph, inst.params, cfg);
  EXPECT_EQ(a.block1_count, b.block1_count);
  EXPECT_EQ(a.acceptance_rate, b.acceptance_rate);
  cfg.rng_seed = 18;
  EXPECT_NE(run_chain(inst.graph, inst.params, cfg).block1_count, a.block1_count);
}

TEST(RunChain, BurnInDefaultsToHalf) {
  McmcConfig cfg;
  cfg.num_steps = 1001;
  EXPECT_EQ(cfg.resolved_burn_in(), 500);
  cfg.burn_in = 1001;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.burn_in = 0;
  cfg.num_steps = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(CsNominate, OrdersByFrequencyThenId) {
  PosteriorEstimate e;
  e.vertices = {1, 4, 6};
  e.block1_frequency = {0.5, 0.5, 0.9};
  const auto list = cs_nominate(e);
  EXPECT_EQ(list.order, (std::vector<Vertex>{6, 1, 4}));
  EXPECT_EQ(list.scheme, Scheme::kCanonicalSampling);
}


SeededGraph six_vertex_graph() {
  const std::vector<std::pair<Vertex, Vertex>> edges = {{0, 2}, {0, 3}, {1, 4}, {1, 5},
                                                        {2, 3}, {4, 5}, {3, 4}};
  return SeededGraph(Graph(6, edges), 2, {1, 2, 0, 0, 0, 0});
}

SbmParams six_vertex_params() {
  SbmParams p;
  p.num_blocks = 2;
  p.block_sizes = {3, 3};
  p.bernoulli.resize(2, 2);
  p.bernoulli << 0.7, 0.2, 0.2, 0.7;
  return p;
}

TEST(ChainState, CrossPairCount) {
  // Ambiguous sizes (4,3,3) plus one seed per block.
  SbmParams p;
  p.num_blocks = 3;
  p.block_sizes = {5, 4, 4};
  p.bernoulli = Eigen::MatrixXd::Constant(3, 3, 0.4);
  std::vector<Block> seeds(13, 0);
  seeds[0] = 1;
  seeds[1] = 2;
  seeds[2] = 3;
  const SeededGraph g(Graph(13, std::vector<std::pair<Vertex, Vertex>>{}), 3, seeds);
  Rng rng(1);
  EXPECT_EQ(ChainState::uniform(g, p, rng).cross_pair_count(), 33);
}

TEST(ChainState, ProposalUniformOverCrossPairs) {
  // Ambiguous labels (1,1,2): pairs {a1,b} and {a2,b} only.
  SbmParams p;
  p.num_blocks = 2;
  p.block_sizes = {3, 2};
  p.bernoulli = Eigen::MatrixXd::Constant(2, 2, 0.5);
  const SeededGraph g(Graph(5, std::vector<std::pair<Vertex, Vertex>>{}), 2, {1, 2, 0, 0, 0});
  ChainState state(g, p, BlockAssignment{{1, 2, 1, 1, 2}});
  Rng rng(12);
  std::map<std::pair<Vertex, Vertex>, int> counts;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    auto [u, v] = state.propose(rng);
    ASSERT_NE(state.label(u), state.label(v));
    counts[{std::min(u, v), std::max(u, v)}]++;
  }
  ASSERT_EQ(counts.size(), 2u);
  // Chi-square with one degree of freedom, 0.999 quantile 10.83.
  double chi2 = 0.0;
  for (const auto& [pair, c] : counts) {
    chi2 += (c - draws / 2.0) * (c - draws / 2.0) / (draws / 2.0);
  }
  EXPECT_LT(chi2, 10.83);
}

TEST(ChainState, ProposalFrequenciesWithinThreeSigma) {
  SbmParams p;
  p.num_blocks = 3;
  p.block_sizes = {4, 3, 3};
  p.bernoulli = Eigen::MatrixXd::Constant(3, 3, 0.5);
  const SeededGraph g(Graph(10, std::vector<std::pair<Vertex, Vertex>>{}), 3,
                      std::vector<Block>(10, 0));
  ChainState state(g, p, BlockAssignment{{1, 1, 1, 1, 2, 2, 2, 3, 3, 3}});
  Rng rng(77);
  std::map<std::pair<Vertex, Vertex>, int> counts;
  const int draws = 1000000;
  for (int t = 0; t < draws; ++t) {
    auto [u, v] = state.propose(rng);
    counts[{std::min(u, v), std::max(u, v)}]++;
  }
  ASSERT_EQ(counts.size(), 33u);
  const double expect = draws / 33.0;
  const double sigma = std::sqrt(draws * (1.0 / 33.0) * (32.0 / 33.0));
  // Bonferroni over 33 cells: 4 sigma keeps the family error near 0.2%.
  for (const auto& [pair, c] : counts) {
    EXPECT_NEAR(c, expect, 4.0 * sigma);
  }
}

TEST(ChainState, NeutralSwaps) {
  // 2 and 3 share their neighbourhood outside {2,3}.
  const std::vector<std::pair<Vertex, Vertex>> edges = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const SeededGraph g(Graph(5, edges), 2, {1, 2, 0, 0, 0});
  SbmParams p;
  p.num_blocks = 2;
  p.block_sizes = {2, 3};
  p.bernoulli.resize(2, 2);
  p.bernoulli << 0.8, 0.15, 0.15, 0.6;
  ChainState state(g, p, BlockAssignment{{1, 2, 1, 2, 2}});
  EXPECT_NEAR(state.log_ratio(2, 3), 0.0, 1e-14);

  auto er = testing::random_instance(3, 12, 4);
  er.params.bernoulli.setConstant(0.3);
  Rng rng(9);
  ChainState s2 = ChainState::uniform(er.graph, er.params, rng);
  for (int t = 0; t < 200; ++t) {
    const auto [u, v] = s2.propose(rng);
    EXPECT_NEAR(s2.log_ratio(u, v), 0.0, 1e-12);
    EXPECT_TRUE(s2.step(rng));
  }
}

TEST(ChainState, StationaryDistributionMatchesExact) {
  const SeededGraph g = six_vertex_graph();
  const SbmParams p = six_vertex_params();
  const auto bf = testing::brute_force_posterior(g, p);
  ASSERT_EQ(bf.labellings.size(), 6u);
  std::map<std::vector<Block>, std::size_t> index;
  for (std::size_t s = 0; s < bf.labellings.size(); ++s) {
    index[bf.labellings[s]] = s;
  }
  Rng rng(31);
  ChainState state = ChainState::uniform(g, p, rng);
  std::vector<double> visits(6, 0.0);
  const int steps = 1000000;
  for (int t = 0; t < steps; ++t) {
    state.step(rng);
    visits[index.at(state.assignment().labels)] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t s = 0; s < 6; ++s) {
    tv += 0.5 * std::abs(visits[s] / steps - bf.probability[s]);
  }
  EXPECT_LT(tv, 0.01);
}

TEST(RunChain, SixVertexConvergesToExact) {
  const SeededGraph g = six_vertex_graph();
  const SbmParams p = six_vertex_params();
  const auto exact = enumerate_posterior(g, p);
  McmcConfig cfg;
  cfg.burn_in = 1000;
  cfg.num_steps = 1000000 + cfg.burn_in;
  cfg.rng_seed = 2;
  const auto est = run_chain(g, p, cfg);
  for (std::size_t i = 0; i < exact.vertices.size(); ++i) {
    EXPECT_NEAR(est.block1_frequency[i], exact.block1_probability[i], 0.02);
  }
}

TEST(RunChain, ErdosRenyiNearUniform) {
  auto inst = testing::random_instance(3, 12, 15);
  inst.params.bernoulli.setConstant(0.5);
  McmcConfig cfg;
  cfg.num_steps = 200000;
  cfg.rng_seed = 6;
  const auto est = run_chain(inst.graph, inst.params, cfg);
  const double r1 = inst.params.block_sizes[0] - inst.graph.seed_count(1);
  for (double f : est.block1_frequency) {
    EXPECT_NEAR(f, r1 / 12.0, 0.02);
  }
  EXPECT_EQ(est.acceptance_rate, 1.0);
}

TEST(CsNominate, MatchesCanonicalWhenSeparated) {
  int checked = 0;
  for (std::uint64_t s = 1; s <= 30 && checked < 5; ++s) {
    const auto inst = testing::random_instance(2, 7, 500 + s);
    const auto exact = enumerate_posterior(inst.graph, inst.params);
    auto q = exact.block1_probability;
    std::sort(q.begin(), q.end());
    bool gaps = true;
    for (std::size_t i = 1; i < q.size(); ++i) {
      gaps = gaps && q[i] - q[i - 1] > 0.05;
    }
    if (!gaps) {
      continue;
    }
    McmcConfig cfg;
    cfg.burn_in = 1000;
    cfg.num_steps = 1000000 + cfg.burn_in;
    cfg.rng_seed = s;
    const auto est = run_chain(inst.graph, inst.params, cfg);
    for (std::size_t i = 0; i < q.size(); ++i) {
      ASSERT_NEAR(est.block1_frequency[i], exact.block1_probability[i], 0.02);
    }
    EXPECT_EQ(cs_nominate(est).order, canonical_nominate(exact).order);
    ++checked;
  }
  EXPECT_GE(checked, 1);
}

TEST(CsNominate, TiesAndIdentity) {
  PosteriorEstimate e;
  e.vertices = {0, 1, 2, 3};
  e.block1_frequency = {0.3, 0.3, 0.3, 0.3};
  EXPECT_EQ(cs_nominate(e).order, (std::vector<Vertex>{0, 1, 2, 3}));
  e.block1_frequency = {0.9, 0.6, 0.3, 0.1};
  EXPECT_EQ(cs_nominate(e).order, (std::vector<Vertex>{0, 1, 2, 3}));
}

}  // namespace
}  // namespace vnom
