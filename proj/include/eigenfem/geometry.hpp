#pragma once

#include <array>
#include <vector>

#include "eigenfem/mesh.hpp"
#include "eigenfem/types.hpp"

namespace eigenfem {

/// Euclidean geometric data of one simplex. Local index j refers to the j-th
/// vertex of the element; face j is the face opposite that vertex.
struct ElementGeometry {
    int dim = 2;
    double volume = 0.0;
    double diameter = 0.0;                    ///< longest Euclidean edge
    std::array<Vec, 4> grad_basis;            ///< grad phi_j, constant on K
    std::array<Vec, 4> inner_normals;         ///< unit q_j with grad phi_j = -q_j / h_j
    std::array<double, 4> altitudes_euclid{};  ///< h_j = 1 / |grad phi_j|
    /// Jacobian of the affine map from the regular simplex with unit edges,
    /// so that an equilateral element has a scaled orthogonal jacobian.
    Mat jacobian;

    int num_vertices() const { return dim + 1; }
};

ElementGeometry compute_geometry(const SimplicialMesh& mesh, std::size_t K);

/// compute_geometry over all elements, in parallel.
std::vector<ElementGeometry> compute_geometry_all(const SimplicialMesh& mesh);

/// Altitude j measured in the metric D^{-1}: 1 / sqrt(grad phi_j^T D grad phi_j).
double metric_altitude(const ElementGeometry& geom, const Mat& D_K, int j);

/// Cosine of the dihedral angle between faces j and k in the metric D^{-1}.
double metric_cos(const ElementGeometry& geom, const Mat& D_K, int j, int k);

/// Dihedral angle between faces j != k in the metric D^{-1}, in
/// [1e-12, pi - 1e-12]. Throws InvalidParameter if D_K is not positive definite.
double metric_dihedral_angle(const ElementGeometry& geom, const Mat& D_K, int j, int k);

double max_metric_angle(const ElementGeometry& geom, const Mat& D_K);

/// grad phi_j^T D_K grad phi_k from the gradients.
double stiffness_kernel(const ElementGeometry& geom, const Mat& D_K, int j, int k);

/// Same quantity through -cos(alpha_jk) / (h_{j,D^-1} h_{k,D^-1}); for j == k
/// returns 1 / h_{j,D^-1}^2.
double stiffness_kernel_from_angle(const ElementGeometry& geom, const Mat& D_K, int j, int k);

} // namespace eigenfem
