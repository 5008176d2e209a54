#include "vnom/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "vnom/error.hpp"
#include "vnom/rng.hpp"

namespace vnom {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  if (v.empty()) {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::vector<double> precision_at_depth(const NominationList& list, const GroundTruth& truth) {
  std::vector<double> out(list.size());
  int hits = 0;
  for (std::size_t j = 0; j < list.size(); ++j) {
    const Vertex v = list.order[j];
    if (v < 0 || static_cast<std::size_t>(v) >= truth.labels.size()) {
      throw ValidationError("listed vertex " + std::to_string(v) + " has no ground truth");
    }
    hits += truth.labels[v] == 1 ? 1 : 0;
    out[j] = static_cast<double>(hits) / static_cast<double>(j + 1);
  }
  return out;
}

double average_precision(const NominationList& list, const GroundTruth& truth) {
  const std::vector<double> prec = precision_at_depth(list, truth);
  std::size_t depth = 0;
  for (Vertex v : list.order) {
    depth += truth.labels[v] == 1 ? 1 : 0;
  }
  if (depth == 0) {
    throw ValidationError("no block-1 vertex among the listed vertices; precision depth is empty");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < depth; ++j) {
    sum += prec[j];
  }
  return sum / static_cast<double>(depth);
}

void Protocol::validate() const {
  params.validate();
  if (static_cast<int>(seed_counts.size()) != params.num_blocks) {
    throw ValidationError("protocol '" + name + "' needs one seed count per block");
  }
  for (int i = 0; i < params.num_blocks; ++i) {
    if (seed_counts[i] < 0 || seed_counts[i] > params.block_sizes[i]) {
      throw ValidationError("protocol '" + name + "' seed count out of range for block " +
                            std::to_string(i + 1));
    }
  }
}

std::string SchemeSpec::describe() const {
  std::ostringstream out;
  out << scheme_tag(scheme);
  switch (scheme) {
    case Scheme::kCanonical:
      out << (estimate_params ? " params=estimated" : " params=true");
      break;
    case Scheme::kCanonicalSampling:
      out << " nmcmc=" << mcmc.num_steps << " burn_in=" << mcmc.resolved_burn_in()
          << (estimate_params ? " params=estimated" : " params=true");
      break;
    case Scheme::kSpectral:
      out << " dim=" << spectral.dim << " k=" << spectral.num_clusters
          << " restarts=" << spectral.kmeans_restarts;
      break;
    case Scheme::kExtendedSpectral: {
      out << " dim=" << extended.dim << " max_k=" << extended.max_components << " catalogue=";
      for (std::size_t i = 0; i < extended.catalogue.size(); ++i) {
        out << (i ? "," : "") << covariance_name(extended.catalogue[i]);
      }
      if (extended.quasi_seeding) {
        out << " quasi";
      }
      out << (extended.likelihood == SelectionLikelihood::kObserved ? " bic=observed"
                                                                    : " bic=complete");
      out << (extended.score == LepScore::kPosterior ? " score=posterior" : " score=density");
      break;
    }
    case Scheme::kChance:
      break;
  }
  return out.str();
}

SeedDesignation draw_replicate(const Protocol& protocol, std::uint64_t rng_seed, int index) {
  const std::uint64_t base = stream_seed(rng_seed, static_cast<std::uint64_t>(index));
  Rng rng(stream_seed(base, 0));
  const std::vector<Block> membership = random_membership(protocol.params.block_sizes, rng);
  Graph graph = sample_graph(protocol.params, membership, stream_seed(base, 1));
  return designate_seeds(std::move(graph), membership, protocol.seed_counts, stream_seed(base, 2));
}

std::uint64_t scheme_seed(std::uint64_t rng_seed, int index) {
  return stream_seed(stream_seed(rng_seed, static_cast<std::uint64_t>(index)), 3);
}

NominationList run_scheme(const SchemeSpec& spec, const SeededGraph& g,
                          const SbmParams& truth_params, std::uint64_t rng_seed) {
  auto model_params = [&] {
    if (!spec.estimate_params) {
      return truth_params;
    }
    SbmParams est;
    est.num_blocks = g.num_blocks();
    est.block_sizes = estimate_block_sizes(g);
    est.bernoulli = estimate_bernoulli(g);
    return est;
  };
  switch (spec.scheme) {
    case Scheme::kCanonical:
      return nominate_lc(g, model_params(), spec.canonical);
    case Scheme::kCanonicalSampling: {
      McmcConfig cfg = spec.mcmc;
      cfg.rng_seed = rng_seed;
      return nominate_lcs(g, model_params(), cfg);
    }
    case Scheme::kSpectral: {
      SpectralConfig cfg = spec.spectral;
      cfg.rng_seed = rng_seed;
      return nominate_lp(g, cfg);
    }
    case Scheme::kExtendedSpectral: {
      ExtendedSpectralConfig cfg = spec.extended;
      cfg.rng_seed = rng_seed;
      return nominate_lep(g, cfg);
    }
    case Scheme::kChance:
      return nominate_chance(g, rng_seed);
  }
  throw ValidationError("unknown scheme");
}

std::vector<ExperimentReport> run_experiment(const Protocol& protocol,
                                             std::span<const SchemeSpec> schemes,
                                             const ExperimentOptions& options) {
  protocol.validate();
  if (options.replicates < 1) {
    throw ValidationError("replicate count must be positive");
  }
  if (schemes.empty()) {
    throw ValidationError("no schemes to evaluate");
  }
  const int reps = options.replicates;
  const std::size_t ns = schemes.size();
  // Per-replicate results, filled by whichever worker ran the replicate
  // and aggregated afterwards in replicate order.
  std::vector<std::vector<double>> ap(ns, std::vector<double>(reps));
  std::vector<std::vector<double>> secs(ns, std::vector<double>(reps));
  std::vector<std::vector<std::vector<char>>> hit(ns, std::vector<std::vector<char>>(reps));

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  int err_index = -1;
  std::exception_ptr err;

  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= reps || failed.load()) {
        return;
      }
      try {
        const SeedDesignation rep = draw_replicate(protocol, options.rng_seed, r);
        const std::uint64_t seed = scheme_seed(options.rng_seed, r);
        for (std::size_t s = 0; s < ns; ++s) {
          const auto start = Clock::now();
          const NominationList list = run_scheme(schemes[s], rep.graph, protocol.params, seed);
          secs[s][r] = seconds_since(start);
          ap[s][r] = average_precision(list, rep.truth);
          auto& h = hit[s][r];
          h.resize(list.size());
          for (std::size_t i = 0; i < list.size(); ++i) {
            h[i] = rep.truth.labels[list.order[i]] == 1 ? 1 : 0;
          }
        }
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (err_index < 0 || r < err_index) {
          err_index = r;
          err = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  const int jobs = std::max(1, std::min(options.jobs, reps));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (err) {
    const std::string prefix = "replicate " + std::to_string(err_index) + ": ";
    try {
      std::rethrow_exception(err);
    } catch (const ValidationError& e) {
      throw ValidationError(prefix + e.what());
    } catch (const CapacityError& e) {
      throw CapacityError(prefix + e.what());
    } catch (const Error& e) {
      throw NumericalError(prefix + e.what());
    } catch (const std::exception& e) {
      throw NumericalError(prefix + e.what());
    }
  }

  std::vector<ExperimentReport> out;
  for (std::size_t s = 0; s < ns; ++s) {
    ExperimentReport rep;
    rep.label = schemes[s].label.empty() ? std::string(scheme_tag(schemes[s].scheme))
                                         : schemes[s].label;
    rep.scheme = schemes[s].scheme;
    rep.replicates = reps;
    rep.config = schemes[s].describe();
    rep.average_precision = ap[s];
    rep.seconds = secs[s];
    rep.map = std::accumulate(ap[s].begin(), ap[s].end(), 0.0) / reps;
    if (reps > 1) {
      double ss = 0.0;
      for (double a : ap[s]) {
        ss += (a - rep.map) * (a - rep.map);
      }
      rep.std_error = std::sqrt(ss / (reps - 1)) / std::sqrt(static_cast<double>(reps));
    }
    rep.mean_seconds = std::accumulate(secs[s].begin(), secs[s].end(), 0.0) / reps;
    rep.median_seconds = median(secs[s]);
    const std::size_t len = hit[s][0].size();
    rep.curve.replicates = reps;
    rep.curve.probability.assign(len, 0.0);
    for (int r = 0; r < reps; ++r) {
      for (std::size_t i = 0; i < len; ++i) {
        rep.curve.probability[i] += hit[s][r][i];
      }
    }
    for (double& p : rep.curve.probability) {
      p /= reps;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

CostModel fit_cost_model(std::span<const TimingSample> samples) {
  if (samples.empty()) {
    throw ValidationError("no timing samples");
  }
  CostModel m;
  if (samples.size() == 1) {
    if (samples[0].steps <= 0) {
      throw ValidationError("timing sample needs a positive step count");
    }
    m.seconds_per_step = samples[0].seconds / static_cast<double>(samples[0].steps);
    return m;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& t : samples) {
    const auto x = static_cast<double>(t.steps);
    sx += x;
    sy += t.seconds;
    sxx += x * x;
    sxy += x * t.seconds;
  }
  const auto n = static_cast<double>(samples.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) {
    throw ValidationError("timing samples need at least two distinct step counts");
  }
  m.seconds_per_step = (n * sxy - sx * sy) / denom;
  m.overhead_seconds = (sy - m.seconds_per_step * sx) / n;
  if (m.overhead_seconds < 0.0) {
    m.overhead_seconds = 0.0;
    m.seconds_per_step = sxy / sxx;
  }
  if (!(m.seconds_per_step > 0.0)) {
    throw NumericalError("calibration gave a nonpositive cost per step");
  }
  return m;
}

std::int64_t equitime_mcmc_steps(double target_seconds, const CostModel& model) {
  if (!(target_seconds > model.overhead_seconds)) {
    throw ValidationError("target time " + std::to_string(target_seconds) +
                          " s does not exceed the sampler overhead " +
                          std::to_string(model.overhead_seconds) + " s");
  }
  return std::max<std::int64_t>(
      1, std::llround((target_seconds - model.overhead_seconds) / model.seconds_per_step));
}

CostModel calibrate_mcmc(const SeededGraph& g, const SbmParams& params, const McmcConfig& base,
                         std::span<const std::int64_t> step_counts, int repeats) {
  std::vector<TimingSample> samples;
  for (std::int64_t steps : step_counts) {
    McmcConfig cfg = base;
    cfg.num_steps = steps;
    if (cfg.burn_in >= steps) {
      cfg.burn_in = steps / 2;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, repeats); ++r) {
      const auto start = Clock::now();
      (void)nominate_lcs(g, params, cfg);
      best = std::min(best, seconds_since(start));
    }
    samples.push_back({steps, best});
  }
  return fit_cost_model(samples);
}

}  // namespace vnom
