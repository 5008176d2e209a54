#include "vnom/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vnom/canonical.hpp"
#include "vnom/error.hpp"

namespace vnom {

void McmcConfig::validate() const {
  if (num_steps <= 0) {
    throw ValidationError("nMCMC must be positive");
  }
  const auto t = resolved_burn_in();
  if (t >= num_steps) {
    throw ValidationError("burn-in (" + std::to_string(t) + ") must be below nMCMC (" +
                          std::to_string(num_steps) + ")");
  }
  if (audit_interval <= 0) {
    throw ValidationError("audit interval must be positive");
  }
}

ChainState::ChainState(const SeededGraph& g, const SbmParams& params, BlockAssignment phi)
    : graph_(&g), params_(&params), num_blocks_(params.num_blocks), phi_(std::move(phi)) {
  params.validate();
  validate_assignment(g, params.block_sizes, phi_);
  logit_.resize(num_blocks_ * num_blocks_);
  for (int i = 0; i < num_blocks_; ++i) {
    for (int j = 0; j < num_blocks_; ++j) {
      const double p = params.bernoulli(i, j);
      logit_[i * num_blocks_ + j] = std::log(p) - std::log1p(-p);
    }
  }
  log_likelihood_ = recount_log_likelihood();
  // Swaps conserve the label histogram, so this holds for the whole chain.
  const auto amb = g.ambiguous();
  has_cross_pair_ = std::any_of(amb.begin(), amb.end(), [&](Vertex v) {
    return phi_.labels[v] != phi_.labels[amb[0]];
  });
}

ChainState ChainState::uniform(const SeededGraph& g, const SbmParams& params, Rng& rng) {
  const auto remaining = ambiguous_block_sizes(g, params.block_sizes);
  std::vector<Block> pool;
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    pool.insert(pool.end(), remaining[i], static_cast<Block>(i + 1));
  }
  shuffle(pool.begin(), pool.end(), rng);
  BlockAssignment phi{std::vector<Block>(g.seed_labels().begin(), g.seed_labels().end())};
  const auto amb = g.ambiguous();
  for (std::size_t p = 0; p < amb.size(); ++p) {
    phi.labels[amb[p]] = pool[p];
  }
  return ChainState(g, params, std::move(phi));
}

std::int64_t ChainState::cross_pair_count() const {
  std::vector<std::int64_t> hist(num_blocks_, 0);
  for (Vertex v : graph_->ambiguous()) {
    ++hist[phi_.labels[v] - 1];
  }
  const auto a = static_cast<std::int64_t>(graph_->ambiguous().size());
  std::int64_t count = a * (a - 1) / 2;
  for (auto h : hist) {
    count -= h * (h - 1) / 2;
  }
  return count;
}

std::pair<Vertex, Vertex> ChainState::propose(Rng& rng) const {
  const auto amb = graph_->ambiguous();
  const auto a = static_cast<std::uint64_t>(amb.size());
  if (a < 2) {
    throw ValidationError("degenerate state space: fewer than two ambiguous vertices");
  }
  if (!has_cross_pair_) {
    throw ValidationError("degenerate state space: all ambiguous vertices share one label");
  }
  for (;;) {
    const Vertex u = amb[uniform_below(rng, a)];
    const Vertex v = amb[uniform_below(rng, a)];
    if (phi_.labels[u] != phi_.labels[v]) {
      return {u, v};
    }
  }
}

double ChainState::log_ratio(Vertex u, Vertex v) const {
  const int i = phi_.labels[u] - 1;
  const int j = phi_.labels[v] - 1;
  const int k = num_blocks_;
  // Per-neighbour factor for label l: logit(l, j) - logit(l, i). Neighbours
  // of u enter with +1, neighbours of v with -1; the pair {u, v} itself is
  // unchanged by the swap and is skipped.
  double sum = 0.0;
  for (Vertex w : graph_->graph().neighbors(u)) {
    if (w != v) {
      const int l = phi_.labels[w] - 1;
      sum += logit_[l * k + j] - logit_[l * k + i];
    }
  }
  for (Vertex w : graph_->graph().neighbors(v)) {
    if (w != u) {
      const int l = phi_.labels[w] - 1;
      sum -= logit_[l * k + j] - logit_[l * k + i];
    }
  }
  return sum;
}

void ChainState::apply_swap(Vertex u, Vertex v, double delta) {
  std::swap(phi_.labels[u], phi_.labels[v]);
  log_likelihood_ += delta;
}

bool ChainState::step(Rng& rng) {
  const auto [u, v] = propose(rng);
  const double delta = log_ratio(u, v);
  if (delta >= 0.0 || uniform01(rng) < std::exp(delta)) {
    apply_swap(u, v, delta);
    return true;
  }
  return false;
}

double ChainState::recount_log_likelihood() const {
  return vnom::log_likelihood(block_edge_counts(*graph_, phi_), params_->bernoulli);
}

double ChainState::audit() {
  const double fresh = recount_log_likelihood();
  const double drift = std::abs(fresh - log_likelihood_);
  log_likelihood_ = fresh;
  return drift;
}

PosteriorEstimate run_chain(const SeededGraph& g, const SbmParams& params,
                            const McmcConfig& config) {
  config.validate();
  Rng rng(config.rng_seed);
  ChainState state = ChainState::uniform(g, params, rng);

  const auto amb = g.ambiguous();
  const int a = static_cast<int>(amb.size());
  std::vector<int> position(g.num_vertices(), -1);
  for (int p = 0; p < a; ++p) {
    position[amb[p]] = p;
  }

  // States X_{T+1} .. X_N are retained. A vertex that holds label 1 from
  // state s0 up to (excluding) state s1 contributes |[s0, s1) ∩ (T, N]|.
  const std::int64_t n_steps = config.num_steps;
  const std::int64_t first_kept = config.resolved_burn_in() + 1;
  std::vector<std::int64_t> since(a, 0);
  std::vector<std::int64_t> count(a, 0);
  auto credit = [&](int p, std::int64_t until) {
    const std::int64_t from = std::max(since[p], first_kept);
    if (until > from) {
      count[p] += until - from;
    }
  };

  PosteriorEstimate out;
  out.vertices.assign(amb.begin(), amb.end());
  if (a == 0) {
    return out;
  }
  std::int64_t accepted = 0;
  for (std::int64_t s = 1; s <= n_steps; ++s) {
    const auto [u, v] = state.propose(rng);
    const double delta = state.log_ratio(u, v);
    if (delta >= 0.0 || uniform01(rng) < std::exp(delta)) {
      for (Vertex w : {u, v}) {
        const int p = position[w];
        if (state.label(w) == 1) {
          credit(p, s);
        } else {
          since[p] = s;
        }
      }
      state.apply_swap(u, v, delta);
      ++accepted;
    }
    if (s % config.audit_interval == 0) {
      out.max_audit_drift = std::max(out.max_audit_drift, state.audit());
    }
  }
  for (int p = 0; p < a; ++p) {
    if (state.label(amb[p]) == 1) {
      credit(p, n_steps + 1);
    }
  }

  out.num_samples = n_steps - first_kept + 1;
  out.block1_count = count;
  out.block1_frequency.resize(a);
  for (int p = 0; p < a; ++p) {
    out.block1_frequency[p] = static_cast<double>(count[p]) / static_cast<double>(out.num_samples);
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(n_steps);
  return out;
}

NominationList cs_nominate(const PosteriorEstimate& estimate) {
  return rank_by_score(Scheme::kCanonicalSampling, estimate.vertices, estimate.block1_frequency);
}

}  // namespace vnom
