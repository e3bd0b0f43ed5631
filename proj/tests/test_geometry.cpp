#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eigenfem/coefficients.hpp"
#include "eigenfem/errors.hpp"
#include "eigenfem/geometry.hpp"
#include "eigenfem/reference.hpp"
#include "support/fixtures.hpp"

using namespace eigenfem;
using std::numbers::pi;

namespace {

SimplicialMesh triangle(double x0, double y0, double x1, double y1, double x2, double y2) {
    return SimplicialMesh(2, {x0, y0, x1, y1, x2, y2}, {0, 1, 2}, {true, true, true});
}

Mat m2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

const Mat kAniso = m2(10, 9, 9, 10);

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("unit right triangle") {
    auto g = compute_geometry(triangle(0, 0, 1, 0, 0, 1), 0);
    const Mat I = Mat::Identity(2, 2);
    CHECK(g.volume == doctest::Approx(0.5));
    CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
    CHECK(g.grad_basis[0][0] == doctest::Approx(-1.0));
    CHECK(g.grad_basis[0][1] == doctest::Approx(-1.0));
    CHECK(g.grad_basis[1][0] == doctest::Approx(1.0));
    CHECK(g.altitudes_euclid[1] == doctest::Approx(1.0));
    CHECK(g.altitudes_euclid[0] == doctest::Approx(std::sqrt(0.5)));

    CHECK(metric_dihedral_angle(g, I, 1, 2) == doctest::Approx(pi / 2));
    CHECK(metric_dihedral_angle(g, I, 0, 1) == doctest::Approx(pi / 4));
    CHECK(metric_dihedral_angle(g, I, 0, 2) == doctest::Approx(pi / 4));
    CHECK(std::abs(stiffness_kernel(g, I, 1, 2)) <= 1e-15);
    CHECK(stiffness_kernel(g, I, 0, 1) == doctest::Approx(-1.0));
    CHECK(stiffness_kernel(g, I, 0, 0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(metric_dihedral_angle(g, m2(1, 0, 0, -1), 0, 1), InvalidParameter);
}

TEST_CASE("example meshes under the anisotropic diffusion") {
    auto m135 = generate_structured(StructuredKind::Mesh135, 11);
    auto m45 = generate_structured(StructuredKind::Mesh45, 11);
    for (std::size_t K = 0; K < m45.num_elements(); ++K) {
        CHECK(std::abs(max_metric_angle(compute_geometry(m135, K), kAniso) - 0.86 * pi) <= 5e-3 * pi);
        CHECK(std::abs(max_metric_angle(compute_geometry(m45, K), kAniso) - 0.43 * pi) <= 5e-3 * pi);
    }
}

TEST_CASE("equilateral triangle and scaling invariance") {
    auto g = compute_geometry(triangle(0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2), 0);
    CHECK(max_metric_angle(g, Mat::Identity(2, 2)) == doctest::Approx(pi / 3));
    // Jacobian from the regular unit-edge triangle is a rotation here.
    const Mat JtJ = g.jacobian.transpose() * g.jacobian;
    CHECK((JtJ - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

    auto t = compute_geometry(triangle(0.1, 0.2, 0.9, 0.35, 0.3, 0.8), 0);
    for (double c : {0.01, 3.0, 250.0})
        for (int j = 0; j < 3; ++j)
            for (int k = j + 1; k < 3; ++k) {
                CHECK(metric_dihedral_angle(t, c * Mat::Identity(2, 2), j, k) ==
                      doctest::Approx(metric_dihedral_angle(t, Mat::Identity(2, 2), j, k)).epsilon(1e-13));
                CHECK(metric_dihedral_angle(t, c * kAniso, j, k) ==
                      doctest::Approx(metric_dihedral_angle(t, kAniso, j, k)).epsilon(1e-13));
            }
}

TEST_CASE("rotation invariance") {
    const double th = 0.7;
    Mat R = m2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th));
    std::vector<Vec> p(3, Vec(2));
    p[0] << 0.1, 0.2;
    p[1] << 0.9, 0.35;
    p[2] << 0.3, 0.8;
    auto a = compute_geometry(triangle(p[0][0], p[0][1], p[1][0], p[1][1], p[2][0], p[2][1]), 0);
    std::vector<Vec> q;
    for (const auto& v : p) q.push_back(R * v);
    auto b = compute_geometry(triangle(q[0][0], q[0][1], q[1][0], q[1][1], q[2][0], q[2][1]), 0);
    const Mat D = m2(3, 1, 1, 2);
    const Mat Dr = R * D * R.transpose();
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k)
            CHECK(metric_dihedral_angle(b, Dr, j, k) == doctest::Approx(metric_dihedral_angle(a, D, j, k)).epsilon(1e-12));
}

TEST_CASE("metric angles of a triangle sum to pi") {
    std::vector<SimplicialMesh> meshes{generate_structured(StructuredKind::Mesh45, 9),
                                       generate_structured(StructuredKind::Mesh135, 9), testing::hex_lattice_mesh(3),
                                       testing::staggered_square_mesh(9)};
    for (const auto& name : catalog_names()) {
        auto coeffs = catalog(name);
        for (const auto& m : meshes) {
            auto stats = element_stats_all(coeffs, m);
            for (std::size_t K = 0; K < m.num_elements(); ++K) {
                auto g = compute_geometry(m, K);
                const Mat& D = stats[K].D_K;
                const double s = metric_dihedral_angle(g, D, 0, 1) + metric_dihedral_angle(g, D, 0, 2) +
                                 metric_dihedral_angle(g, D, 1, 2);
                CHECK(std::abs(s - pi) <= 1e-10);
            }
        }
    }
}

TEST_CASE("stiffness kernel identity on all catalog meshes") {
    double worst = 0.0;
    for (const auto& name : catalog_names()) {
        auto coeffs = catalog(name);
        for (auto kind : {StructuredKind::Mesh45, StructuredKind::Mesh135}) {
            auto m = generate_structured(kind, 9);
            auto stats = element_stats_all(coeffs, m);
            for (std::size_t K = 0; K < m.num_elements(); ++K) {
                auto g = compute_geometry(m, K);
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) {
                        const double direct = stiffness_kernel(g, stats[K].D_K, j, k);
                        const double viaAngle = stiffness_kernel_from_angle(g, stats[K].D_K, j, k);
                        worst = std::max(worst, std::abs(direct - viaAngle) / std::max(1.0, std::abs(direct)));
                    }
            }
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("regular tetrahedron") {
    const double s = 1.0 / std::sqrt(2.0);
    SimplicialMesh t(3, {0, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 1}, {0, 1, 2, 3}, {true, true, true, true});
    auto g = compute_geometry(t, 0);
    CHECK(g.volume == doctest::Approx(1.0 / 3.0));
    CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
    const Mat I = Mat::Identity(3, 3);
    for (int j = 0; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k) CHECK(metric_dihedral_angle(g, I, j, k) == doctest::Approx(std::acos(1.0 / 3.0)));
    const Mat JtJ = g.jacobian.transpose() * g.jacobian / (2.0 * s * s * 2.0);
    CHECK((JtJ - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            CHECK(stiffness_kernel(g, I, j, k) == doctest::Approx(stiffness_kernel_from_angle(g, I, j, k)));
    // Gradients of the barycentric coordinates sum to zero.
    Vec sum = Vec::Zero(3);
    for (int j = 0; j < 4; ++j) sum += g.grad_basis[static_cast<std::size_t>(j)];
    CHECK(sum.norm() <= 1e-14);
}

TEST_CASE("parallel geometry matches the serial reference") {
    auto m = generate_structured(StructuredKind::Mesh135, 31);
    auto par = compute_geometry_all(m);
    auto ser = reference::geometry_serial(m);
    REQUIRE(par.size() == ser.size());
    for (std::size_t K = 0; K < par.size(); ++K) {
        CHECK(par[K].volume == ser[K].volume);
        for (int j = 0; j < 3; ++j) CHECK(par[K].grad_basis[static_cast<std::size_t>(j)] == ser[K].grad_basis[static_cast<std::size_t>(j)]);
    }
}

}
