// Command-line front end: generate, nominate, evaluate, embed, reproduce.
//
// Exit codes: 0 ok, 2 invalid input, 3 capacity guard, 4 numerical failure.
// Errors are printed as one line on stderr:
//   vnom: error=<validation|capacity|numerical> message=<text>

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vnom/embed.hpp"
#include "vnom/error.hpp"
#include "vnom/eval.hpp"
#include "vnom/io.hpp"
#include "vnom/log.hpp"
#include "vnom/nominate.hpp"
#include "vnom/presets.hpp"
#include "vnom/reproduce.hpp"

namespace {

using namespace vnom;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return 2;
    case ErrorKind::kCapacity:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
  }
  return 1;
}

void report_error(const char* kind, std::string message) {
  for (char& c : message) {
    if (c == '\n' || c == '\r') {
      c = ' ';
    }
  }
  std::cerr << "vnom: error=" << kind << " message=" << message << '\n';
}

std::istringstream open_input(const std::string& path) {
  return std::istringstream(io::read_file(path));
}

/// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_file(path, text);
  }
}

std::vector<CovarianceModel> parse_catalogue(const std::string& list) {
  std::vector<CovarianceModel> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(parse_covariance(item));
    }
  }
  if (out.empty()) {
    throw ValidationError("empty covariance catalogue");
  }
  return out;
}

struct Common {
  std::uint64_t seed = 1;
  int jobs = 1;
  bool verbose = false;
  bool quiet = false;
};

struct GenerateArgs {
  std::string preset;
  std::string params;
  std::vector<int> seed_counts;
  std::string out = "graph";
};

int cmd_generate(const GenerateArgs& a, const Common& c) {
  Protocol p;
  if (!a.preset.empty()) {
    p = preset_protocol(a.preset);
  } else if (!a.params.empty()) {
    auto in = open_input(a.params);
    p.name = a.params;
    p.params = io::read_params(in);
    p.seed_counts = a.seed_counts;
  } else {
    throw ValidationError("generate needs --preset or --params");
  }
  if (!a.preset.empty() && !a.seed_counts.empty()) {
    p.seed_counts = a.seed_counts;
  }
  p.validate();
  const SeedDesignation rep = draw_replicate(p, c.seed, 0);
  std::ostringstream edges, seeds, truth, params;
  io::write_edge_list(edges, rep.graph.graph());
  io::write_seeds(seeds, rep.graph);
  io::write_truth(truth, rep.truth);
  io::write_params(params, p.params);
  io::write_file(a.out + ".edges", edges.str());
  io::write_file(a.out + ".seeds", seeds.str());
  io::write_file(a.out + ".truth", truth.str());
  io::write_file(a.out + ".params.json", params.str());
  std::cout << params.str();
  return 0;
}

struct NominateArgs {
  std::string scheme;
  std::string graph;
  std::string seeds;
  std::string params;
  bool estimate_params = false;
  int dim = 3;
  int k = 3;
  int max_k = 4;
  std::string catalogue;
  std::int64_t nmcmc = 10000;
  std::int64_t burn_in = -1;
  int restarts = 1000;
  bool quasi = false;
  bool random_ties = false;
  bool fix_weights = false;
  LepScore lep_score = LepScore::kPosterior;
  SelectionLikelihood bic = SelectionLikelihood::kObserved;
  std::string model_out;
  std::string out;
};

SbmParams model_params(const NominateArgs& a, const SeededGraph& g) {
  if (a.estimate_params) {
    SbmParams p;
    p.num_blocks = g.num_blocks();
    p.block_sizes = estimate_block_sizes(g);
    p.bernoulli = estimate_bernoulli(g);
    return p;
  }
  if (a.params.empty()) {
    throw ValidationError("scheme '" + a.scheme + "' needs --params or --estimate-params");
  }
  auto in = open_input(a.params);
  SbmParams p = io::read_params(in);
  if (p.num_blocks != g.num_blocks()) {
    throw ValidationError("params have " + std::to_string(p.num_blocks) +
                          " blocks but the seed file declares " +
                          std::to_string(g.num_blocks()));
  }
  return p;
}

int cmd_nominate(const NominateArgs& a, const Common& c) {
  const Scheme scheme = parse_scheme(a.scheme);
  auto gin = open_input(a.graph);
  Graph graph = io::read_edge_list(gin);
  auto sin = open_input(a.seeds);
  const SeededGraph g = io::read_seeds(sin, std::move(graph));

  NominationList list;
  switch (scheme) {
    case Scheme::kCanonical: {
      CanonicalOptions opt;
      opt.num_threads = c.jobs;
      list = nominate_lc(g, model_params(a, g), opt);
      break;
    }
    case Scheme::kCanonicalSampling: {
      McmcConfig cfg;
      cfg.num_steps = a.nmcmc;
      cfg.burn_in = a.burn_in;
      cfg.rng_seed = c.seed;
      list = nominate_lcs(g, model_params(a, g), cfg);
      break;
    }
    case Scheme::kSpectral: {
      SpectralConfig cfg;
      cfg.dim = a.dim;
      cfg.num_clusters = a.k;
      cfg.kmeans_restarts = a.restarts;
      cfg.random_ties = a.random_ties;
      cfg.rng_seed = c.seed;
      list = nominate_lp(g, cfg);
      break;
    }
    case Scheme::kExtendedSpectral: {
      ExtendedSpectralConfig cfg;
      cfg.dim = a.dim;
      cfg.max_components = a.max_k;
      if (!a.catalogue.empty()) {
        cfg.catalogue = parse_catalogue(a.catalogue);
      }
      cfg.quasi_seeding = a.quasi;
      cfg.score = a.lep_score;
      cfg.likelihood = a.bic;
      if (a.fix_weights) {
        cfg.block_sizes = model_params(a, g).block_sizes;
      }
      cfg.rng_seed = c.seed;
      ModelSelection sel;
      list = nominate_lep(g, cfg, &sel);
      if (!a.model_out.empty()) {
        std::ostringstream m;
        io::write_model_selection(m, sel);
        io::write_file(a.model_out, m.str());
      }
      break;
    }
    case Scheme::kChance:
      list = nominate_chance(g, c.seed);
      break;
  }
  std::ostringstream out;
  io::write_nomination(out, list);
  emit(a.out, out.str());
  return 0;
}

struct EvaluateArgs {
  std::string list;
  std::string truth;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  auto lin = open_input(a.list);
  const NominationList list = io::read_nomination(lin);
  auto tin = open_input(a.truth);
  const GroundTruth truth = io::read_truth(tin);
  for (Vertex v : list.order) {
    if (v < 0 || static_cast<std::size_t>(v) >= truth.labels.size()) {
      throw ValidationError("nominated vertex " + std::to_string(v) + " is not in the truth file");
    }
  }
  const double ap = average_precision(list, truth);
  const std::vector<double> prec = precision_at_depth(list, truth);
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# average_precision " << ap << '\n';
  out << "depth,vertex,in_block_1,precision\n";
  for (std::size_t j = 0; j < prec.size(); ++j) {
    out << j + 1 << ',' << list.order[j] << ',' << (truth.labels[list.order[j]] == 1 ? 1 : 0)
        << ',' << prec[j] << '\n';
  }
  emit(a.out, out.str());
  return 0;
}

struct EmbedArgs {
  std::string graph;
  int dim = 3;
  std::string out;
  std::string scree;
};

int cmd_embed(const EmbedArgs& a) {
  auto gin = open_input(a.graph);
  const Graph g = io::read_edge_list(gin);
  const Embedding emb = adjacency_spectral_embed(g, a.dim);
  std::ostringstream out;
  io::write_embedding(out, emb);
  emit(a.out, out.str());
  if (!a.scree.empty()) {
    std::ostringstream s;
    io::write_scree(s, emb);
    io::write_file(a.scree, s.str());
    if (emb.singular_values.size() >= 3) {
      const std::vector<double> sv(emb.singular_values.data(),
                                   emb.singular_values.data() + emb.singular_values.size());
      std::cerr << "suggested dimension " << scree_elbow(sv) << '\n';
    }
  }
  return 0;
}

struct ReproduceArgs {
  std::string table;
  int replicates = 0;
  double scale_down = 1.0;
  int restarts = 1000;
  bool skip_large_exact = false;
  std::vector<int> dims;
  std::vector<std::int64_t> sweep;
  LepScore lep_score = LepScore::kPosterior;
  SelectionLikelihood bic = SelectionLikelihood::kObserved;
  std::string out;
  std::string curves;
};

int cmd_reproduce(const ReproduceArgs& a, const Common& c) {
  ReproduceOptions opt;
  opt.replicates = a.replicates;
  opt.scale_down = a.scale_down;
  opt.rng_seed = c.seed;
  opt.jobs = c.jobs;
  opt.kmeans_restarts = a.restarts;
  opt.skip_large_exact = a.skip_large_exact;
  opt.dims = a.dims;
  opt.nmcmc_sweep = a.sweep;
  opt.lep_score = a.lep_score;
  opt.lep_likelihood = a.bic;
  const ReproduceResult res = reproduce(a.table, opt);
  print_result(std::cout, res);
  if (!a.out.empty()) {
    std::ostringstream csv;
    write_result_csv(csv, res);
    io::write_file(a.out, csv.str());
  }
  if (!a.curves.empty()) {
    std::ostringstream csv;
    write_curves_csv(csv, res);
    io::write_file(a.curves, csv.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertex nomination for stochastic block model graphs"};
  app.set_config("--config", "", "Read flags from a TOML/INI file; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  const std::map<std::string, LepScore> score_names = {{"posterior", LepScore::kPosterior},
                                                       {"density", LepScore::kWeightedDensity}};
  const std::map<std::string, SelectionLikelihood> bic_names = {
      {"observed", SelectionLikelihood::kObserved}, {"complete", SelectionLikelihood::kComplete}};

  Common common;
  app.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", common.verbose, "Progress messages");
  app.add_flag("-q,--quiet", common.quiet, "Suppress warnings");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample a seeded SBM graph");
  generate->add_option("--preset", gen.preset, "Named setting")
      ->check(CLI::IsMember(preset_names()));
  generate->add_option("--params", gen.params, "SBM parameter JSON");
  generate->add_option("--seed-counts", gen.seed_counts, "Seeds per block")->delimiter(',');
  generate->add_option("--out", gen.out, "Output prefix")->capture_default_str();

  NominateArgs nom;
  auto* nominate = app.add_subcommand("nominate", "Rank the ambiguous vertices");
  nominate->add_option("--scheme", nom.scheme, "lc, lcs, lp, lep or chance")->required();
  nominate->add_option("--graph", nom.graph, "Edge list")->required();
  nominate->add_option("--seeds", nom.seeds, "Seed file")->required();
  nominate->add_option("--params", nom.params, "SBM parameter JSON");
  nominate->add_flag("--estimate-params", nom.estimate_params, "Estimate parameters from seeds");
  nominate->add_option("--dim", nom.dim, "Embedding dimension")->capture_default_str();
  nominate->add_option("--k", nom.k, "k-means clusters (lp)")->capture_default_str();
  nominate->add_option("--max-k", nom.max_k, "Largest mixture size (lep)")->capture_default_str();
  nominate->add_option("--catalogue", nom.catalogue, "Covariance structures, comma separated");
  nominate->add_option("--nmcmc", nom.nmcmc, "Sampler steps (lcs)")->capture_default_str();
  nominate->add_option("--burn-in", nom.burn_in, "Burn-in steps; default nmcmc/2");
  nominate->add_option("--restarts", nom.restarts, "k-means restarts (lp)")->capture_default_str();
  nominate->add_flag("--quasi-seeding", nom.quasi, "Seeds outside block 1 only say 'not 1' (lep)");
  nominate->add_flag("--random-ties", nom.random_ties, "Shuffle equal distances (lp)");
  nominate->add_flag("--fix-weights", nom.fix_weights, "Mixing weights from block sizes (lep)");
  nominate->add_option("--lep-score", nom.lep_score, "posterior or density (lep)")
      ->transform(CLI::CheckedTransformer(score_names));
  nominate->add_option("--bic-likelihood", nom.bic, "observed or complete (lep)")
      ->transform(CLI::CheckedTransformer(bic_names));
  nominate->add_option("--model-out", nom.model_out, "Write the mixture fit as JSON (lep)");
  nominate->add_option("--out", nom.out, "Output CSV (default stdout)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Average precision of a nomination list");
  evaluate->add_option("list,--list", ev.list, "Nomination CSV")->required();
  evaluate->add_option("--truth", ev.truth, "Truth file")->required();
  evaluate->add_option("--out", ev.out, "Output (default stdout)");

  EmbedArgs em;
  auto* embed = app.add_subcommand("embed", "Adjacency spectral embedding");
  embed->add_option("--graph", em.graph, "Edge list")->required();
  embed->add_option("--dim", em.dim, "Embedding dimension")->capture_default_str();
  embed->add_option("--out", em.out, "Embedding CSV (default stdout)");
  embed->add_option("--scree", em.scree, "Scree CSV");

  ReproduceArgs rep;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Run a simulation table");
  reproduce_cmd->add_option("table", rep.table, "Table name")
      ->required()
      ->check(CLI::IsMember(reproduce_tables()));
  reproduce_cmd->add_option("--replicates", rep.replicates, "Override the replicate count");
  reproduce_cmd->add_option("--scale-down", rep.scale_down, "Divide replicates and steps")
      ->capture_default_str();
  reproduce_cmd->add_option("--restarts", rep.restarts, "k-means restarts")->capture_default_str();
  reproduce_cmd->add_flag("--skip-large-exact", rep.skip_large_exact,
                          "Skip exact enumeration on large-small");
  reproduce_cmd->add_option("--dims", rep.dims, "Embedding dimensions (table5)")->delimiter(',');
  reproduce_cmd->add_option("--nmcmc", rep.sweep, "Step counts (fig5)")->delimiter(',');
  reproduce_cmd->add_option("--lep-score", rep.lep_score, "posterior or density")
      ->transform(CLI::CheckedTransformer(score_names));
  reproduce_cmd->add_option("--bic-likelihood", rep.bic, "observed or complete")
      ->transform(CLI::CheckedTransformer(bic_names));
  reproduce_cmd->add_option("--out", rep.out, "Summary CSV");
  reproduce_cmd->add_option("--curves", rep.curves, "Precision curve CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("validation", e.what());
    return 2;
  }

  log::set_level(common.quiet     ? log::Level::kQuiet
                 : common.verbose ? log::Level::kInfo
                                  : log::Level::kWarn);
  try {
    if (*generate) {
      return cmd_generate(gen, common);
    }
    if (*nominate) {
      return cmd_nominate(nom, common);
    }
    if (*evaluate) {
      return cmd_evaluate(ev);
    }
    if (*embed) {
      return cmd_embed(em);
    }
    return cmd_reproduce(rep, common);
  } catch (const Error& e) {
    report_error(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    report_error("capacity", "out of memory");
    return 3;
  } catch (const std::exception& e) {
    report_error("numerical", e.what());
    return 4;
  }
}
