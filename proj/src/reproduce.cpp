#include "vnom/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "vnom/error.hpp"
#include "vnom/log.hpp"
#include "vnom/presets.hpp"

namespace vnom {
namespace {

struct Scaler {
  const ReproduceOptions& opt;

  int reps(int table_default) const {
    const int base = opt.replicates > 0 ? opt.replicates : table_default;
    return std::max(1, static_cast<int>(std::lround(base / opt.scale_down)));
  }
  std::int64_t steps(std::int64_t n) const {
    return std::max<std::int64_t>(2, std::llround(static_cast<double>(n) / opt.scale_down));
  }
};

SchemeSpec lc_spec() {
  SchemeSpec s;
  s.label = "lc";
  s.scheme = Scheme::kCanonical;
  return s;
}

SchemeSpec lcs_spec(std::string label, std::int64_t steps, std::int64_t burn_in = -1) {
  SchemeSpec s;
  s.label = std::move(label);
  s.scheme = Scheme::kCanonicalSampling;
  s.mcmc.num_steps = steps;
  s.mcmc.burn_in = burn_in;
  return s;
}

SchemeSpec lp_spec(int dim, int k, int restarts) {
  SchemeSpec s;
  s.label = "lp";
  s.scheme = Scheme::kSpectral;
  s.spectral.dim = dim;
  s.spectral.num_clusters = k;
  s.spectral.kmeans_restarts = restarts;
  return s;
}

SchemeSpec lep_spec(int dim, int max_k, const ReproduceOptions& opt) {
  SchemeSpec s;
  s.label = "lep";
  s.scheme = Scheme::kExtendedSpectral;
  s.extended.dim = dim;
  s.extended.max_components = max_k;
  s.extended.score = opt.lep_score;
  s.extended.likelihood = opt.lep_likelihood;
  return s;
}

ExperimentOptions experiment_options(const ReproduceOptions& opt, int reps) {
  ExperimentOptions e;
  e.replicates = reps;
  e.rng_seed = opt.rng_seed;
  e.jobs = opt.jobs;
  return e;
}

double time_once(const SeededGraph& g, const SbmParams& params, const McmcConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  (void)nominate_lcs(g, params, cfg);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Sampler budget whose runtime matches `target` seconds on this protocol,
/// calibrated on replicate 0 in two rounds (coarse, then around the answer).
EquitimeInfo equitime_budget(const Protocol& p, double target, std::int64_t burn_in,
                             std::uint64_t rng_seed) {
  const SeedDesignation rep = draw_replicate(p, rng_seed, 0);
  McmcConfig base;
  base.burn_in = burn_in;
  base.rng_seed = scheme_seed(rng_seed, 0);
  const std::int64_t floor_steps = std::max<std::int64_t>(burn_in + 1, 1000);
  const std::vector<std::int64_t> coarse = {floor_steps, 10 * floor_steps};
  EquitimeInfo info;
  info.target_seconds = target;
  CostModel model = calibrate_mcmc(rep.graph, p.params, base, coarse);
  std::int64_t guess = equitime_mcmc_steps(target, model);
  const std::vector<std::int64_t> fine = {std::max(floor_steps, guess / 2),
                                          std::max(floor_steps + 1, guess)};
  info.cost = calibrate_mcmc(rep.graph, p.params, base, fine);
  info.steps = std::max(floor_steps, equitime_mcmc_steps(target, info.cost));
  McmcConfig check = base;
  check.num_steps = info.steps;
  info.verification_ratio = time_once(rep.graph, p.params, check) / target;
  log::info("equitime " + p.name + ": target " + std::to_string(target) + " s -> " +
            std::to_string(info.steps) + " steps");
  return info;
}

ReproduceRow run_row(const Protocol& p, const std::vector<SchemeSpec>& specs, int reps,
                     const ReproduceOptions& opt) {
  ReproduceRow row;
  row.setting = p.name;
  row.reports = run_experiment(p, specs, experiment_options(opt, reps));
  return row;
}

void add_equitime(ReproduceRow& row, const Protocol& p, const std::string& against,
                  std::int64_t burn_in, int reps, const ReproduceOptions& opt) {
  const double target = row.report(against).mean_seconds;
  row.equitime = equitime_budget(p, target, burn_in, opt.rng_seed);
  row.has_equitime = true;
  const std::vector<SchemeSpec> specs = {lcs_spec("lcs-equitime", row.equitime.steps, burn_in)};
  auto extra = run_experiment(p, specs, experiment_options(opt, reps));
  row.reports.push_back(std::move(extra.front()));
}

ReproduceResult table3(const ReproduceOptions& opt) {
  const Scaler sc{opt};
  ReproduceResult res{"table3", {}};
  for (const char* name : {"small-small", "medium-small", "large-small"}) {
    std::vector<SchemeSpec> specs;
    if (!(opt.skip_large_exact && std::string_view(name) == "large-small")) {
      specs.push_back(lc_spec());
    }
    specs.push_back(lcs_spec("lcs", sc.steps(10000)));
    res.rows.push_back(run_row(preset_protocol(name), specs, sc.reps(2000), opt));
  }
  return res;
}

ReproduceResult table4(const ReproduceOptions& opt, bool large) {
  const Scaler sc{opt};
  const Protocol p = preset_protocol(large ? "large" : "medium");
  const int reps = sc.reps(large ? 2 : 50);
  const std::vector<SchemeSpec> specs = {lp_spec(3, 3, opt.kmeans_restarts), lep_spec(3, 4, opt),
                                         lcs_spec("lcs", sc.steps(100000))};
  ReproduceResult res{large ? "table4-large" : "table4-medium", {}};
  res.rows.push_back(run_row(p, specs, reps, opt));
  if (!large) {
    add_equitime(res.rows.back(), p, "lep", -1, reps, opt);
  }
  return res;
}

ReproduceResult table5(const ReproduceOptions& opt) {
  const Scaler sc{opt};
  const Protocol p = preset_protocol("ten-block");
  const std::vector<int> dims = opt.dims.empty() ? std::vector<int>{3, 10, 20} : opt.dims;
  ReproduceResult res{"table5", {}};
  for (int d : dims) {
    const std::vector<SchemeSpec> specs = {lep_spec(d, 10, opt)};
    ReproduceRow row = run_row(p, specs, sc.reps(50), opt);
    row.setting = "ten-block dim=" + std::to_string(d);
    add_equitime(row, p, "lep", 5000, sc.reps(50), opt);
    res.rows.push_back(std::move(row));
  }
  return res;
}

ReproduceResult fig5(const ReproduceOptions& opt) {
  const Scaler sc{opt};
  const std::vector<std::int64_t> sweep =
      opt.nmcmc_sweep.empty() ? std::vector<std::int64_t>{1000, 10000, 100000} : opt.nmcmc_sweep;
  std::vector<SchemeSpec> specs;
  for (std::int64_t n : sweep) {
    specs.push_back(lcs_spec("lcs-" + std::to_string(n), sc.steps(n)));
  }
  ReproduceResult res{"fig5", {}};
  res.rows.push_back(run_row(preset_protocol("medium"), specs, sc.reps(50), opt));
  return res;
}

ReproduceResult er_null(const ReproduceOptions& opt) {
  const Scaler sc{opt};
  ReproduceResult res{"er-null", {}};
  res.rows.push_back(run_row(preset_protocol("er-small"),
                             {lc_spec(), lcs_spec("lcs", sc.steps(10000))}, sc.reps(500), opt));
  SchemeSpec chance;
  chance.label = "chance";
  chance.scheme = Scheme::kChance;
  res.rows.push_back(run_row(preset_protocol("er-medium"),
                             {lp_spec(3, 3, opt.kmeans_restarts), lep_spec(3, 3, opt),
                              lcs_spec("lcs", sc.steps(10000)), chance},
                             sc.reps(500), opt));
  return res;
}

}  // namespace

const ExperimentReport& ReproduceRow::report(std::string_view label) const {
  for (const auto& r : reports) {
    if (r.label == label) {
      return r;
    }
  }
  throw ValidationError("no report labelled '" + std::string(label) + "' in " + setting);
}

std::vector<std::string> reproduce_tables() {
  return {"table3", "table4-medium", "table4-large", "table5", "fig5", "er-null"};
}

ReproduceResult reproduce(std::string_view table, const ReproduceOptions& options) {
  if (!(options.scale_down >= 1.0)) {
    throw ValidationError("scale-down factor must be at least 1");
  }
  if (table == "table3") {
    return table3(options);
  }
  if (table == "table4-medium") {
    return table4(options, false);
  }
  if (table == "table4-large") {
    return table4(options, true);
  }
  if (table == "table5") {
    return table5(options);
  }
  if (table == "fig5") {
    return fig5(options);
  }
  if (table == "er-null") {
    return er_null(options);
  }
  throw ValidationError("unknown table '" + std::string(table) + "'");
}

void print_result(std::ostream& out, const ReproduceResult& result) {
  out << result.table << '\n';
  for (const auto& row : result.rows) {
    out << "  " << row.setting << '\n';
    for (const auto& r : row.reports) {
      out << "    " << std::left << std::setw(14) << r.label << std::right << std::fixed
          << std::setprecision(4) << "MAP " << r.map << " +/- " << 2.0 * r.std_error
          << "  mean " << std::setprecision(4) << r.mean_seconds << " s  median "
          << r.median_seconds << " s  (" << r.config << ", nMC=" << r.replicates << ")\n";
    }
    if (row.has_equitime) {
      out << "    equitime: target " << row.equitime.target_seconds << " s, "
          << row.equitime.steps << " steps, overhead " << row.equitime.cost.overhead_seconds
          << " s, per step " << std::scientific << std::setprecision(3)
          << row.equitime.cost.seconds_per_step << std::fixed << " s, check ratio "
          << std::setprecision(2) << row.equitime.verification_ratio << '\n';
    }
  }
  out.unsetf(std::ios::floatfield);
}

void write_result_csv(std::ostream& out, const ReproduceResult& result) {
  out << "table,setting,label,config,replicates,map,std_error,mean_seconds,median_seconds\n";
  out << std::setprecision(10);
  for (const auto& row : result.rows) {
    for (const auto& r : row.reports) {
      out << result.table << ',' << row.setting << ',' << r.label << ",\"" << r.config << "\","
          << r.replicates << ',' << r.map << ',' << r.std_error << ',' << r.mean_seconds << ','
          << r.median_seconds << '\n';
    }
  }
}

void write_curves_csv(std::ostream& out, const ReproduceResult& result) {
  out << "setting,label,position,probability\n";
  out << std::setprecision(10);
  for (const auto& row : result.rows) {
    for (const auto& r : row.reports) {
      for (std::size_t i = 0; i < r.curve.probability.size(); ++i) {
        out << row.setting << ',' << r.label << ',' << i + 1 << ',' << r.curve.probability[i]
            << '\n';
      }
    }
  }
}

}  // namespace vnom
