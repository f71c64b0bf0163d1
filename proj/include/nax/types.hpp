#pragma once

#include <Eigen/Dense>

namespace nax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace nax
