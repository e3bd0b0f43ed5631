#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eigenfem/assembly.hpp"
#include "eigenfem/coefficients.hpp"
#include "eigenfem/geometry.hpp"
#include "eigenfem/mesh.hpp"

namespace eigenfem {

/// Slack for the weak (<=) and strict (<) comparisons of angle conditions.
inline constexpr double kConditionTol = 1e-12;

struct ElementCondition {
    int element = 0;
    double alpha_max = 0.0;  ///< largest metric dihedral angle of K
    /// arccos(h_K |b|/(lambda_min (d+1)) + h_K^2 |c|/(lambda_min (d+1)(d+2))); NaN when undefined.
    double bound = 0.0;
    bool bound_defined = true;
    bool pass_weak = false;
    bool pass_strict = false;
    std::string reason;  ///< set when the element fails
};

/// Delaunay-type data for an edge shared by two triangles K < K'.
struct EdgeCondition {
    int v0 = 0, v1 = 0;
    int K = 0, K_prime = 0;
    double alpha_K = 0.0;        ///< metric angle of K facing the edge
    double alpha_K_prime = 0.0;
    double theta = 0.0;
    double lhs = 0.0;            ///< bracketed half-sum including theta
    double alpha_sum = 0.0;      ///< same expression with theta = 0
    /// Both endpoints interior; only these edges carry a matrix entry and enter the verdict.
    bool interior = false;
    bool pass_weak = false;
    bool pass_strict = false;
};

enum class ConditionLevel { strict, weak, fail };
std::string to_string(ConditionLevel level);

struct ConditionVerdicts {
    bool nonobtuse_weak = false;
    bool nonobtuse_strict = false;
    bool delaunay_available = false;  ///< 2D only
    bool delaunay_weak = false;
    bool delaunay_strict = false;
    bool interiorly_connected = false;
    bool connectivity_vacuous = false;
    int interior_components = 0;
};

struct ConditionReport {
    std::string mesh_label;
    std::string coeffs_label;
    int dim = 2;
    std::vector<ElementCondition> per_element;
    std::vector<EdgeCondition> per_edge;
    double alpha_max = 0.0;  ///< max over elements
    double alpha_sum = 0.0;  ///< max over two-element edges (2D)
    ConditionVerdicts verdicts;

    /// strict: a strict condition holds and the interior is connected;
    /// weak: a weak condition holds; fail otherwise.
    ConditionLevel level() const;
};

/// arccot with range (0, pi).
double arccot(double x);

std::vector<ElementCondition> check_nonobtuse(const SimplicialMesh& mesh, const std::vector<ElementGeometry>& geoms,
                                              const std::vector<ElementCoefficientStats>& stats);
std::vector<ElementCondition> check_nonobtuse(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs);

/// Throws UnsupportedError unless the mesh is 2D.
std::vector<EdgeCondition> check_delaunay_type(const SimplicialMesh& mesh, const std::vector<ElementGeometry>& geoms,
                                               const std::vector<ElementCoefficientStats>& stats);
std::vector<EdgeCondition> check_delaunay_type(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs);

ConditionReport analyze_conditions(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs);

struct EntryBound {
    int row = 0, col = 0;  ///< interior ordinals, row < col
    double a_jk = 0.0;
    double a_kj = 0.0;
    double bound_general = 0.0;  ///< patch-sum bound valid in any dimension
    double bound_2d = 0.0;       ///< two-element bound (2D, two incident elements), else NaN
    bool violated = false;
};

struct EntryBoundReport {
    std::vector<EntryBound> entries;
    int violations = 0;
    bool all_nonpositive = true;  ///< every assembled off-diagonal a_jk <= 0
    bool bounds_nonpositive = true;
};

/// Compares each interior off-diagonal pair of A with the patch bounds.
EntryBoundReport entry_bound_report(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs,
                                    const AssembledSystem& system);

struct MUniformity {
    std::vector<double> equidistribution;  ///< |K| det(M_K)^{1/2} N / sigma_h, ideal 1
    std::vector<double> alignment;         ///< tr(J^T M J) / (d det(J^T M J)^{1/d}), ideal 1
    double sigma_h = 0.0;
};

/// M_K is averaged over K with the degree-2 rule; the Jacobian maps from the
/// regular unit-edge simplex.
MUniformity m_uniformity(const SimplicialMesh& mesh, const std::function<Mat(const Vec&)>& metric);

nlohmann::json to_json(const ConditionReport& report);
std::string per_element_csv(const ConditionReport& report);
std::string per_edge_csv(const ConditionReport& report);

} // namespace eigenfem
