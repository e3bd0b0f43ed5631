#pragma once

#include <Eigen/Core>

namespace eigenfem {

// Small dense vectors and matrices for d <= 3; no heap allocation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline constexpr int kMaxDim = 3;

} // namespace eigenfem
