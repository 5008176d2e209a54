#include "vnom/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "vnom/error.hpp"

namespace vnom::io {
namespace {

using nlohmann::json;

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Value of a "# key N" directive on this line, if it is one.
std::optional<long long> directive(const std::string& line, std::string_view key) {
  std::istringstream ss(line.substr(1));
  std::string word;
  long long value = 0;
  if (ss >> word && word == key && ss >> value) {
    return value;
  }
  return std::nullopt;
}

/// Reads "a b" integer pairs; calls on_directive for comment lines.
template <typename Directive>
std::vector<std::pair<long long, long long>> read_pairs(std::istream& in, const char* what,
                                                        Directive on_directive) {
  std::vector<std::pair<long long, long long>> out;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      on_directive(line);
      continue;
    }
    std::istringstream ss(line);
    long long a = 0, b = 0;
    std::string extra;
    if (!(ss >> a >> b) || (ss >> extra)) {
      throw ValidationError(std::string(what) + " line " + std::to_string(lineno) +
                            ": expected two integers");
    }
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  long long declared = -1;
  const auto pairs = read_pairs(in, "edge list", [&](const std::string& line) {
    if (auto v = directive(line, "vertices")) {
      declared = *v;
    }
  });
  long long largest = -1;
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a > std::numeric_limits<Vertex>::max() ||
        b > std::numeric_limits<Vertex>::max()) {
      throw ValidationError("edge list: vertex id out of range");
    }
    largest = std::max({largest, a, b});
    edges.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
  }
  const long long n = declared >= 0 ? declared : largest + 1;
  if (largest >= n) {
    throw ValidationError("edge list: vertex " + std::to_string(largest) +
                          " exceeds declared count " + std::to_string(n));
  }
  return Graph(static_cast<int>(n), edges);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# vertices " << g.num_vertices() << '\n';
  for (const auto& [u, v] : g.edge_list()) {
    out << u << ' ' << v << '\n';
  }
}

SeededGraph read_seeds(std::istream& in, Graph graph) {
  long long blocks = -1;
  const auto pairs = read_pairs(in, "seed file", [&](const std::string& line) {
    if (auto v = directive(line, "blocks")) {
      blocks = *v;
    }
  });
  std::vector<Block> labels(graph.num_vertices(), 0);
  long long largest = 0;
  for (const auto& [v, b] : pairs) {
    if (v < 0 || v >= graph.num_vertices()) {
      throw ValidationError("seed file: vertex " + std::to_string(v) + " not in graph");
    }
    if (b < 1) {
      throw ValidationError("seed file: block labels start at 1");
    }
    if (labels[v] != 0) {
      throw ValidationError("seed file: vertex " + std::to_string(v) + " listed twice");
    }
    labels[v] = static_cast<Block>(b);
    largest = std::max(largest, b);
  }
  const long long k = blocks >= 0 ? blocks : largest;
  return SeededGraph(std::move(graph), static_cast<int>(k), std::move(labels));
}

void write_seeds(std::ostream& out, const SeededGraph& g) {
  out << "# blocks " << g.num_blocks() << '\n';
  for (Vertex v : g.seeds()) {
    out << v << ' ' << g.seed_label(v) << '\n';
  }
}

GroundTruth read_truth(std::istream& in) {
  const auto pairs = read_pairs(in, "truth file", [](const std::string&) {});
  GroundTruth t;
  t.labels.assign(pairs.size(), 0);
  for (const auto& [v, b] : pairs) {
    if (v < 0 || v >= static_cast<long long>(pairs.size())) {
      throw ValidationError("truth file: vertex ids must be 0..n-1");
    }
    if (b < 1) {
      throw ValidationError("truth file: block labels start at 1");
    }
    if (t.labels[v] != 0) {
      throw ValidationError("truth file: vertex " + std::to_string(v) + " listed twice");
    }
    t.labels[v] = static_cast<Block>(b);
  }
  return t;
}

void write_truth(std::ostream& out, const GroundTruth& truth) {
  for (std::size_t v = 0; v < truth.labels.size(); ++v) {
    out << v << ' ' << truth.labels[v] << '\n';
  }
}

SbmParams read_params(std::istream& in) {
  SbmParams p;
  try {
    const json j = json::parse(in);
    p.num_blocks = j.at("num_blocks").get<int>();
    p.block_sizes = j.at("block_sizes").get<std::vector<int>>();
    const auto rows = j.at("bernoulli").get<std::vector<std::vector<double>>>();
    p.bernoulli.resize(static_cast<Eigen::Index>(rows.size()),
                       rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size()) {
        throw ValidationError("params: bernoulli rows differ in length");
      }
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        p.bernoulli(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("params: ") + e.what());
  }
  p.validate();
  return p;
}

void write_params(std::ostream& out, const SbmParams& params) {
  json j;
  j["num_blocks"] = params.num_blocks;
  j["block_sizes"] = params.block_sizes;
  j["bernoulli"] = matrix_json(params.bernoulli);
  out << j.dump(2) << '\n';
}

NominationList read_nomination(std::istream& in) {
  NominationList list;
  std::string raw;
  int lineno = 0;
  bool header = false;
  bool scheme_seen = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto cols = split_csv(line);
    if (!header) {
      if (cols.size() < 3 || cols[0] != "rank" || cols[1] != "vertex" || cols[2] != "score") {
        throw ValidationError("nomination file: expected header rank,vertex,score,scheme");
      }
      header = true;
      continue;
    }
    if (cols.size() < 3) {
      throw ValidationError("nomination file line " + std::to_string(lineno) +
                            ": expected rank,vertex,score");
    }
    try {
      const long long rank = std::stoll(cols[0]);
      if (rank != static_cast<long long>(list.order.size()) + 1) {
        throw ValidationError("nomination file line " + std::to_string(lineno) +
                              ": ranks must run 1, 2, ...");
      }
      list.order.push_back(static_cast<Vertex>(std::stoll(cols[1])));
      list.scores.push_back(std::stod(cols[2]));
    } catch (const std::logic_error&) {
      throw ValidationError("nomination file line " + std::to_string(lineno) +
                            ": malformed number");
    }
    if (cols.size() >= 4 && !scheme_seen) {
      list.scheme = parse_scheme(cols[3]);
      scheme_seen = true;
    }
  }
  if (!header) {
    throw ValidationError("nomination file: empty");
  }
  std::vector<Vertex> sorted = list.order;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("nomination file: a vertex appears twice");
  }
  return list;
}

void write_nomination(std::ostream& out, const NominationList& list) {
  out << "rank,vertex,score,scheme\n" << std::setprecision(kDigits);
  for (std::size_t i = 0; i < list.size(); ++i) {
    out << i + 1 << ',' << list.order[i] << ',' << list.scores[i] << ','
        << scheme_tag(list.scheme) << '\n';
  }
}

void write_embedding(std::ostream& out, const Embedding& emb) {
  out << "vertex";
  for (int j = 0; j < emb.dim; ++j) {
    out << ",x" << j + 1;
  }
  out << '\n' << std::setprecision(kDigits);
  for (Eigen::Index v = 0; v < emb.coords.rows(); ++v) {
    out << v;
    for (int j = 0; j < emb.dim; ++j) {
      out << ',' << emb.coords(v, j);
    }
    out << '\n';
  }
}

void write_scree(std::ostream& out, const Embedding& emb) {
  out << "index,singular_value,eigenvalue\n" << std::setprecision(kDigits);
  for (Eigen::Index i = 0; i < emb.singular_values.size(); ++i) {
    out << i + 1 << ',' << emb.singular_values[i] << ',' << emb.eigenvalues[i] << '\n';
  }
}

void write_model_selection(std::ostream& out, const ModelSelection& sel) {
  const GmmModel& m = sel.best;
  json best;
  best["num_components"] = m.num_components;
  best["covariance"] = std::string(covariance_name(m.covariance));
  best["weights_fixed"] = m.weights_fixed;
  best["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
  json means = json::array();
  json covs = json::array();
  for (int k = 0; k < m.num_components; ++k) {
    means.push_back(std::vector<double>(m.means[k].data(), m.means[k].data() + m.means[k].size()));
    covs.push_back(matrix_json(m.covariances[k]));
  }
  best["means"] = std::move(means);
  best["covariances"] = std::move(covs);
  best["log_likelihood"] = m.log_likelihood;
  best["observed_log_likelihood"] = m.observed_log_likelihood;
  best["parameter_count"] = m.parameter_count;
  best["bic_prime"] = m.bic_prime;
  best["iterations"] = m.iterations;
  best["converged"] = m.converged;

  json table = json::array();
  for (const auto& c : sel.candidates) {
    json row;
    row["num_components"] = c.num_components;
    row["covariance"] = std::string(covariance_name(c.covariance));
    row["ok"] = c.ok;
    if (c.ok) {
      row["parameter_count"] = c.parameter_count;
      row["log_likelihood"] = c.log_likelihood;
      row["bic_prime"] = c.bic_prime;
    } else {
      row["failure"] = c.failure;
    }
    table.push_back(std::move(row));
  }
  json j;
  j["selected"] = std::move(best);
  j["candidates"] = std::move(table);
  out << j.dump(2) << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open '" + path + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << contents) || !out.flush()) {
    throw ValidationError("cannot write '" + path + "'");
  }
}

}  // namespace vnom::io
