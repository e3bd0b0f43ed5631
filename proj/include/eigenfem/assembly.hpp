#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "eigenfem/coefficients.hpp"
#include "eigenfem/geometry.hpp"
#include "eigenfem/mesh.hpp"
#include "eigenfem/sparse.hpp"

namespace eigenfem {

enum class MassTreatment { consistent, lumped };

MassTreatment parse_mass_treatment(const std::string& name);
std::string to_string(MassTreatment mass);

/// Interior-node Galerkin system A u = lambda B u.
struct AssembledSystem {
    SparseMatrix A;
    SparseMatrix A_diffusion;       ///< diffusion part of A only
    SparseMatrix B;                 ///< consistent mass
    std::vector<double> B_lumped;   ///< row-sum lumped mass
    std::string mesh_label;
    std::string coeffs_label;

    int size() const { return A.rows(); }
};

/// Element contributions indexed by local vertex (row a, column b).
struct LocalMatrices {
    using Block = std::array<std::array<double, 4>, 4>;
    Block stiffness{};  ///< diffusion + convection + reaction
    Block diffusion{};
    Block mass{};
};

/// Local matrices of element K; convection and reaction use the degree-2 rule.
LocalMatrices element_matrices(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs,
                               const ElementGeometry& geom, const ElementCoefficientStats& stats, std::size_t K);

/// Interior-interior sparsity pattern: rows and columns by interior ordinal.
SparseMatrix interior_pattern(const SimplicialMesh& mesh);

/// Element kernels run in parallel; each row then gathers its contributions in
/// ascending element order, so the result is bitwise identical to a serial
/// element-by-element scatter.
AssembledSystem assemble(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs);

/// F(v) = [v^T A_D v + sum_K int_K (c - div b / 2) (v^h)^2] / v^T M v, with M
/// the consistent or lumped mass. Throws InvalidInput for a zero vector.
double rayleigh(const AssembledSystem& system, const ProblemCoefficients& coeffs, const SimplicialMesh& mesh,
                std::span<const double> v, MassTreatment mass = MassTreatment::consistent);

} // namespace eigenfem
