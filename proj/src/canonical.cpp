#include "vnom/canonical.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "vnom/error.hpp"

namespace vnom {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string short_number(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

/// Running log-sum-exp: value() == log(sum exp(x)) over everything added.
struct LogSum {
  double max = kNegInf;
  double scaled = 0.0;

  void add(double x) {
    if (x <= max) {
      scaled += std::exp(x - max);
    } else {
      scaled = scaled * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  void merge(const LogSum& o) {
    if (o.max == kNegInf) {
      return;
    }
    if (o.max <= max) {
      scaled += o.scaled * std::exp(o.max - max);
    } else {
      scaled = scaled * std::exp(max - o.max) + o.scaled;
      max = o.max;
    }
  }
  double value() const { return max == kNegInf ? kNegInf : max + std::log(scaled); }
};

class Enumerator {
 public:
  Enumerator(const SeededGraph& g, const SbmParams& params, std::vector<int> remaining)
      : k_(params.num_blocks), a_(static_cast<int>(g.ambiguous().size())),
        remaining_(std::move(remaining)) {
    logit_.resize(k_ * k_);
    for (int i = 0; i < k_; ++i) {
      for (int j = 0; j < k_; ++j) {
        const double p = params.bernoulli(i, j);
        logit_[i * k_ + j] = std::log(p) - std::log1p(-p);
      }
    }
    std::vector<int> position(g.num_vertices(), -1);
    for (int p = 0; p < a_; ++p) {
      position[g.ambiguous()[p]] = p;
    }
    seed_term_.assign(static_cast<std::size_t>(a_) * k_, 0.0);
    earlier_.resize(a_);
    for (int p = 0; p < a_; ++p) {
      const Vertex v = g.ambiguous()[p];
      for (Vertex w : g.graph().neighbors(v)) {
        if (g.is_seed(w)) {
          const int bw = g.seed_label(w) - 1;
          for (int k = 0; k < k_; ++k) {
            seed_term_[p * k_ + k] += logit_[k * k_ + bw];
          }
        } else if (position[w] < p) {
          earlier_[p].push_back(position[w]);
        }
      }
    }
  }

  int size() const { return a_; }

  /// Enumerates all completions of `prefix` (labels 0-indexed) with
  /// partial log likelihood `base`; accumulates into `total` and `block1`.
  void run(std::vector<int> prefix, LogSum& total, std::vector<LogSum>& block1) const {
    std::vector<int> labels(a_, -1);
    std::vector<int> remaining = remaining_;
    double base = 0.0;
    for (int p = 0; p < static_cast<int>(prefix.size()); ++p) {
      labels[p] = prefix[p];
      --remaining[prefix[p]];
      base += increment(labels, p, prefix[p]);
    }
    Walk walk{labels, remaining, block1};
    total = descend(walk, static_cast<int>(prefix.size()), base);
  }

  /// All valid label prefixes of length `depth`, in lexicographic order.
  std::vector<std::vector<int>> prefixes(int depth) const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::vector<int> remaining = remaining_;
    collect(depth, cur, remaining, out);
    return out;
  }

 private:
  struct Walk {
    std::vector<int>& labels;
    std::vector<int>& remaining;
    std::vector<LogSum>& block1;
  };

  double increment(const std::vector<int>& labels, int p, int k) const {
    double delta = seed_term_[p * k_ + k];
    const double* row = logit_.data() + k * k_;
    for (int q : earlier_[p]) {
      delta += row[labels[q]];
    }
    return delta;
  }

  LogSum descend(Walk& w, int p, double partial) const {
    LogSum here;
    if (p == a_) {
      here.add(partial);
      return here;
    }
    for (int k = 0; k < k_; ++k) {
      if (w.remaining[k] == 0) {
        continue;
      }
      --w.remaining[k];
      w.labels[p] = k;
      LogSum child = descend(w, p + 1, partial + increment(w.labels, p, k));
      w.labels[p] = -1;
      ++w.remaining[k];
      if (k == 0) {
        w.block1[p].merge(child);
      }
      here.merge(child);
    }
    return here;
  }

  void collect(int depth, std::vector<int>& cur, std::vector<int>& remaining,
               std::vector<std::vector<int>>& out) const {
    if (static_cast<int>(cur.size()) == depth) {
      out.push_back(cur);
      return;
    }
    for (int k = 0; k < k_; ++k) {
      if (remaining[k] == 0) {
        continue;
      }
      --remaining[k];
      cur.push_back(k);
      collect(depth, cur, remaining, out);
      cur.pop_back();
      ++remaining[k];
    }
  }

  int k_;
  int a_;
  std::vector<int> remaining_;
  std::vector<double> logit_;
  std::vector<double> seed_term_;
  std::vector<std::vector<int>> earlier_;
};

}  // namespace

double count_assignments(std::span<const int> ambiguous_block_sizes) {
  double log_count = 0.0;
  int total = 0;
  for (int r : ambiguous_block_sizes) {
    total += r;
    log_count -= std::lgamma(r + 1.0);
  }
  log_count += std::lgamma(total + 1.0);
  return std::round(std::exp(log_count));
}

std::vector<int> ambiguous_block_sizes(const SeededGraph& g, std::span<const int> block_sizes) {
  if (static_cast<int>(block_sizes.size()) != g.num_blocks()) {
    throw ValidationError("block size vector has " + std::to_string(block_sizes.size()) +
                          " entries, graph has " + std::to_string(g.num_blocks()) +
                          " blocks");
  }
  std::vector<int> r(block_sizes.size());
  int total = 0;
  for (std::size_t i = 0; i < block_sizes.size(); ++i) {
    r[i] = block_sizes[i] - g.seed_count(static_cast<Block>(i + 1));
    if (r[i] < 0) {
      throw ValidationError("block " + std::to_string(i + 1) + " has more seeds than its size");
    }
    total += r[i];
  }
  if (total != static_cast<int>(g.ambiguous().size())) {
    throw ValidationError("block sizes sum to " + std::to_string(total + g.num_seeds()) +
                          " but the graph has " + std::to_string(g.num_vertices()) +
                          " vertices");
  }
  return r;
}

PosteriorTable enumerate_posterior(const SeededGraph& g, const SbmParams& params,
                                   const CanonicalOptions& options) {
  params.validate();
  if (params.num_blocks != g.num_blocks()) {
    throw ValidationError("parameter block count does not match the graph");
  }
  auto remaining = ambiguous_block_sizes(g, params.block_sizes);
  const double count = count_assignments(remaining);
  if (count > options.max_assignments) {
    throw CapacityError("exact enumeration needs " + short_number(count) +
                        " labellings, above the limit of " +
                        short_number(options.max_assignments) +
                        "; use the sampling scheme (lcs) instead");
  }

  PosteriorTable out;
  out.vertices.assign(g.ambiguous().begin(), g.ambiguous().end());
  out.num_assignments = count;
  const int a = static_cast<int>(out.vertices.size());
  if (a == 0) {
    return out;
  }

  const Enumerator walker(g, params, remaining);
  // Chunking is fixed by prefix depth, not by thread count, and chunks are
  // merged in lexicographic order, so the result is thread-count invariant.
  const int depth = std::min(a, 2);
  const auto chunks = walker.prefixes(depth);
  std::vector<LogSum> chunk_total(chunks.size());
  std::vector<std::vector<LogSum>> chunk_block1(chunks.size(), std::vector<LogSum>(a));

  auto work = [&](std::size_t c) {
    walker.run(chunks[c], chunk_total[c], chunk_block1[c]);
    // Prefix positions are fixed within a chunk; credit them directly.
    for (int p = 0; p < depth; ++p) {
      if (chunks[c][p] == 0) {
        chunk_block1[c][p] = chunk_total[c];
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.num_threads, static_cast<int>(chunks.size())));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      work(c);
    }
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < chunks.size(); c += threads) {
          work(c);
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  LogSum total;
  std::vector<LogSum> block1(a);
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    total.merge(chunk_total[c]);
    for (int p = 0; p < a; ++p) {
      block1[p].merge(chunk_block1[c][p]);
    }
  }
  const double log_total = total.value();
  out.block1_probability.resize(a);
  for (int p = 0; p < a; ++p) {
    const double lv = block1[p].value();
    out.block1_probability[p] = lv == kNegInf ? 0.0 : std::min(1.0, std::exp(lv - log_total));
  }
  return out;
}

NominationList canonical_nominate(const PosteriorTable& posterior) {
  return rank_by_score(Scheme::kCanonical, posterior.vertices, posterior.block1_probability);
}

}  // namespace vnom
