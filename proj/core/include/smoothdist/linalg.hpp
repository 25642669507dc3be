#pragma once

#include <Eigen/Dense>

namespace smoothdist {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace smoothdist
