#pragma once

#include <Eigen/Dense>

namespace gnnrisk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

}  // namespace gnnrisk
