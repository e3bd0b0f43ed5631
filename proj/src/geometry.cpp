#include "eigenfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <fmt/format.h>

#include "eigenfem/coefficients.hpp"
#include "eigenfem/errors.hpp"
#include "eigenfem/parallel.hpp"

namespace eigenfem {

namespace {

constexpr double kAngleFloor = 1e-12;

const Mat& regular_reference_inverse(int dim) {
    static const Mat inv2 = [] {
        Mat R(2, 2);
        R << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
        return Mat(R.inverse());
    }();
    static const Mat inv3 = [] {
        Mat R(3, 3);
        R << 1.0, 0.5, 0.5, 0.0, std::sqrt(3.0) / 2.0, std::sqrt(3.0) / 6.0, 0.0, 0.0, std::sqrt(2.0 / 3.0);
        return Mat(R.inverse());
    }();
    return dim == 2 ? inv2 : inv3;
}

void require_pd(const Mat& D) {
    const auto [lmin, lmax] = symmetric_eigen_extremes(D);
    (void)lmax;
    if (!(lmin > 0.0)) throw InvalidParameter("metric tensor D_K is not positive definite");
}

} // namespace

ElementGeometry compute_geometry(const SimplicialMesh& mesh, std::size_t K) {
    const int dim = mesh.dim();
    auto el = mesh.element(K);
    ElementGeometry g;
    g.dim = dim;

    std::array<Vec, 4> x;
    for (int a = 0; a <= dim; ++a) x[static_cast<std::size_t>(a)] = mesh.vertex(static_cast<std::size_t>(el[a]));
    Mat E(dim, dim);
    for (int c = 0; c < dim; ++c) E.col(c) = x[static_cast<std::size_t>(c + 1)] - x[0];

    const double det = E.determinant();
    g.volume = std::abs(det) / (dim == 2 ? 2.0 : 6.0);
    const Mat Einv = E.inverse();

    Vec sum = Vec::Zero(dim);
    for (int j = 1; j <= dim; ++j) {
        g.grad_basis[static_cast<std::size_t>(j)] = Einv.row(j - 1).transpose();
        sum += g.grad_basis[static_cast<std::size_t>(j)];
    }
    g.grad_basis[0] = -sum;
    for (int j = 0; j <= dim; ++j) {
        const auto& gj = g.grad_basis[static_cast<std::size_t>(j)];
        const double n = gj.norm();
        g.altitudes_euclid[static_cast<std::size_t>(j)] = 1.0 / n;
        g.inner_normals[static_cast<std::size_t>(j)] = -gj / n;
    }
    for (int a = 0; a <= dim; ++a)
        for (int b = a + 1; b <= dim; ++b)
            g.diameter = std::max(g.diameter, (x[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(b)]).norm());
    g.jacobian = E * regular_reference_inverse(dim);
    return g;
}

std::vector<ElementGeometry> compute_geometry_all(const SimplicialMesh& mesh) {
    std::vector<ElementGeometry> out(mesh.num_elements());
    parallel_for(out.size(), [&](std::size_t k) { out[k] = compute_geometry(mesh, k); });
    return out;
}

double metric_altitude(const ElementGeometry& geom, const Mat& D_K, int j) {
    const auto& gj = geom.grad_basis[static_cast<std::size_t>(j)];
    return 1.0 / std::sqrt(gj.dot(D_K * gj));
}

double metric_cos(const ElementGeometry& geom, const Mat& D_K, int j, int k) {
    const auto& qj = geom.inner_normals[static_cast<std::size_t>(j)];
    const auto& qk = geom.inner_normals[static_cast<std::size_t>(k)];
    return -qj.dot(D_K * qk) / std::sqrt(qj.dot(D_K * qj) * qk.dot(D_K * qk));
}

double metric_dihedral_angle(const ElementGeometry& geom, const Mat& D_K, int j, int k) {
    if (j == k) throw InvalidParameter("dihedral angle needs two distinct faces");
    require_pd(D_K);
    const double c = std::clamp(metric_cos(geom, D_K, j, k), -1.0, 1.0);
    return std::clamp(std::acos(c), kAngleFloor, std::numbers::pi - kAngleFloor);
}

double max_metric_angle(const ElementGeometry& geom, const Mat& D_K) {
    double best = 0.0;
    for (int j = 0; j <= geom.dim; ++j)
        for (int k = j + 1; k <= geom.dim; ++k) best = std::max(best, metric_dihedral_angle(geom, D_K, j, k));
    return best;
}

double stiffness_kernel(const ElementGeometry& geom, const Mat& D_K, int j, int k) {
    return geom.grad_basis[static_cast<std::size_t>(j)].dot(D_K * geom.grad_basis[static_cast<std::size_t>(k)]);
}

double stiffness_kernel_from_angle(const ElementGeometry& geom, const Mat& D_K, int j, int k) {
    const double hj = metric_altitude(geom, D_K, j);
    if (j == k) return 1.0 / (hj * hj);
    return -metric_cos(geom, D_K, j, k) / (hj * metric_altitude(geom, D_K, k));
}

} // namespace eigenfem
