#include "vnom/presets.hpp"

#include <cstdlib>
#include <string>

#include "vnom/error.hpp"

namespace vnom {
namespace {

Protocol three_block(std::string name, std::vector<int> ambiguous, std::vector<int> seeds,
                     double alpha) {
  Protocol p;
  p.name = std::move(name);
  p.params.num_blocks = 3;
  for (int i = 0; i < 3; ++i) {
    p.params.block_sizes.push_back(ambiguous[i] + seeds[i]);
  }
  p.params.bernoulli = lambda_alpha(alpha);
  p.seed_counts = std::move(seeds);
  return p;
}

}  // namespace

Eigen::MatrixXd lambda_alpha(double alpha) {
  Eigen::MatrixXd b(3, 3);
  b << 0.5, 0.3, 0.4,
       0.3, 0.8, 0.6,
       0.4, 0.6, 0.3;
  return alpha * b + (1.0 - alpha) * Eigen::MatrixXd::Constant(3, 3, 0.5);
}

Eigen::MatrixXd ten_block_lambda() {
  Eigen::MatrixXd l(10, 10);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      switch (std::abs(i - j)) {
        case 0:
          l(i, j) = 0.30;
          break;
        case 1:
          l(i, j) = 0.27;
          break;
        case 2:
          l(i, j) = 0.24;
          break;
        default:
          l(i, j) = 0.21;
      }
    }
  }
  return l;
}

Protocol preset_protocol(std::string_view name) {
  if (name == "small-small") {
    return three_block("small-small", {4, 3, 3}, {4, 0, 0}, 1.0);
  }
  if (name == "medium-small") {
    return three_block("medium-small", {7, 4, 4}, {4, 0, 0}, 1.0);
  }
  if (name == "large-small") {
    return three_block("large-small", {8, 5, 4}, {4, 0, 0}, 1.0);
  }
  if (name == "medium") {
    return three_block("medium", {200, 150, 150}, {20, 0, 0}, 0.3);
  }
  if (name == "large") {
    return three_block("large", {4000, 3000, 3000}, {40, 0, 0}, 0.13);
  }
  if (name == "ten-block") {
    Protocol p;
    p.name = "ten-block";
    p.params.num_blocks = 10;
    p.params.block_sizes.assign(10, 100);
    p.params.bernoulli = ten_block_lambda();
    p.seed_counts.assign(10, 20);
    return p;
  }
  // Erdos-Renyi nulls: one small enough to enumerate, one for the
  // spectral schemes.
  if (name == "er-small") {
    return three_block("er-small", {4, 4, 4}, {4, 2, 2}, 0.0);
  }
  if (name == "er-medium") {
    return three_block("er-medium", {90, 90, 90}, {10, 10, 10}, 0.0);
  }
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"small-small", "medium-small", "large-small", "medium",
          "large",       "ten-block",    "er-small",    "er-medium"};
}

}  // namespace vnom
