#pragma once

#include <array>
#include <span>

namespace eigenfem {

/// Barycentric quadrature point on a simplex; weight is the fraction of |K|.
struct QuadraturePoint {
    std::array<double, 4> bary{};
    double weight = 0.0;
};

/// Degree-2 exact rules: 2D edge midpoints (weights 1/3), 3D four-point rule
/// (weights 1/4).
std::span<const QuadraturePoint> degree2_rule(int dim);

} // namespace eigenfem
