#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eigenfem/mesh.hpp"
#include "eigenfem/types.hpp"

namespace eigenfem {

/// Operator data for  -div(D grad u) + b . grad u + c u = lambda u.
/// Evaluators must be pure; they are called concurrently from element loops.
struct ProblemCoefficients {
    std::string label;
    int dim = 2;
    std::function<Mat(const Vec&)> diffusion;
    std::function<Vec(const Vec&)> convection;
    std::function<double(const Vec&)> reaction;
    /// Analytic divergence of the convection field.
    std::function<double(const Vec&)> convection_divergence;
    /// True when b vanishes identically (symmetric operator).
    bool convection_free = false;
};

struct ElementCoefficientStats {
    Mat D_K;  ///< average of D over K
    double lambda_min_DK = 0.0;
    double lambda_max_DK = 0.0;
    double b_sup = 0.0;  ///< sampled max of |b| over K
    double c_sup = 0.0;  ///< sampled max of |c| over K
};

/// Extreme eigenvalues of a symmetric 2x2 (closed form) or 3x3 (cyclic Jacobi) matrix.
std::pair<double, double> symmetric_eigen_extremes(const Mat& S);

/// Throws CoefficientError unless D is symmetric within 1e-12 and positive definite.
void validate_diffusion(const Mat& D, const Vec& x);

/// D_K by the degree-2 rule; sup-norms sampled at quadrature nodes and vertices.
ElementCoefficientStats element_stats(const ProblemCoefficients& coeffs, const SimplicialMesh& mesh, std::size_t K);

/// element_stats for every element, in parallel.
std::vector<ElementCoefficientStats> element_stats_all(const ProblemCoefficients& coeffs, const SimplicialMesh& mesh);

std::vector<std::string> catalog_names();

/// Built-in problems: ex5_1 .. ex5_5k100 and laplace. Throws CoefficientError
/// for unknown names.
ProblemCoefficients catalog(std::string_view name);

/// Constant D, b, c.
ProblemCoefficients constant_problem(std::string label, const Mat& D, const Vec& b, double c);

/// {"label": ..., "diffusion": [[...]], "convection": [...], "reaction": c}
ProblemCoefficients problem_from_json(const nlohmann::json& j);

struct AssumptionCheck {
    bool ok = true;
    double min_value = 0.0;  ///< min of c - div(b)/2 over the samples
    Vec worst_point;
};

/// Checks c - div(b)/2 >= -1e-12 and validates D on an n x n grid over the unit square (2D only).
AssumptionCheck assumption_check(const ProblemCoefficients& coeffs, int n = 100);

/// Paper-reported principal eigenvalue of a catalog problem on the unit square
/// (ex5_5 on the holed square), or 0 when none is known.
double reported_reference(std::string_view name);

} // namespace eigenfem
