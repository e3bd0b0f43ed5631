#include "eigenfem/quadrature.hpp"

#include "eigenfem/errors.hpp"

namespace eigenfem {

namespace {

constexpr double kTetA = 0.5854101966249685;
constexpr double kTetB = 0.1381966011250105;

constexpr std::array<QuadraturePoint, 3> kTriangle{{
    {{0.5, 0.5, 0.0, 0.0}, 1.0 / 3.0},
    {{0.0, 0.5, 0.5, 0.0}, 1.0 / 3.0},
    {{0.5, 0.0, 0.5, 0.0}, 1.0 / 3.0},
}};

constexpr std::array<QuadraturePoint, 4> kTetrahedron{{
    {{kTetA, kTetB, kTetB, kTetB}, 0.25},
    {{kTetB, kTetA, kTetB, kTetB}, 0.25},
    {{kTetB, kTetB, kTetA, kTetB}, 0.25},
    {{kTetB, kTetB, kTetB, kTetA}, 0.25},
}};

} // namespace

std::span<const QuadraturePoint> degree2_rule(int dim) {
    if (dim == 2) return kTriangle;
    if (dim == 3) return kTetrahedron;
    throw UnsupportedError("quadrature is available for d = 2 and d = 3 only");
}

} // namespace eigenfem
