#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vnom/eval.hpp"

namespace vnom {

/// alpha * B + (1 - alpha) * 0.5 J for the three-block base matrix B.
Eigen::MatrixXd lambda_alpha(double alpha);

/// Ten-block banded matrix: .30 on the diagonal, .27 and .24 one and two
/// steps off it, .21 elsewhere.
Eigen::MatrixXd ten_block_lambda();

/// Named simulation settings: "small-small", "medium-small", "large-small",
/// "medium", "large", "ten-block", "er-small", "er-medium".
Protocol preset_protocol(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace vnom
