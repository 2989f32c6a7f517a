#pragma once

#include <vector>

#include <Eigen/Dense>

namespace gsr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

}  // namespace gsr
