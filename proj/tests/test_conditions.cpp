#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eigenfem/conditions.hpp"
#include "eigenfem/errors.hpp"
#include "eigenfem/matrix_analysis.hpp"
#include "support/fixtures.hpp"

using namespace eigenfem;
using std::numbers::pi;

TEST_SUITE("conditions") {

TEST_CASE("arccot range") {
    CHECK(arccot(0.0) == doctest::Approx(pi / 2));
    CHECK(arccot(1.0) == doctest::Approx(pi / 4));
    CHECK(arccot(-1.0) == doctest::Approx(3 * pi / 4));
    CHECK(arccot(1e12) > 0.0);
    CHECK(arccot(-1e12) < pi);
    for (double a : {0.1, 1.0, 1.5, 2.0, 3.0}) CHECK(arccot(1.0 / std::tan(a)) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("nonobtuse condition on the example meshes") {
    auto c = catalog("ex5_1");
    auto r45 = check_nonobtuse(generate_structured(StructuredKind::Mesh45, 11), c);
    for (const auto& e : r45) {
        CHECK(e.bound == doctest::Approx(pi / 2));
        CHECK(e.pass_strict);
    }
    auto r135 = check_nonobtuse(generate_structured(StructuredKind::Mesh135, 11), c);
    for (const auto& e : r135) {
        CHECK_FALSE(e.pass_weak);
        CHECK(e.reason == "obtuse metric angle");
    }

    SimplicialMesh eq(2, {0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2}, {0, 1, 2}, {true, true, true});
    auto re = check_nonobtuse(eq, catalog("laplace"));
    CHECK(re[0].alpha_max == doctest::Approx(pi / 3));
    CHECK(re[0].pass_strict);
}

TEST_CASE("bound undefined when convection dominates") {
    auto r = check_nonobtuse(generate_structured(StructuredKind::Mesh45, 3), catalog("ex5_2"));
    for (const auto& e : r) {
        CHECK_FALSE(e.bound_defined);
        CHECK(std::isnan(e.bound));
        CHECK_FALSE(e.pass_weak);
        CHECK(e.reason == "convection/reaction dominates at this h");
    }
    // The bound shrinks below pi/2 by the convection and reaction terms.
    auto fine = check_nonobtuse(generate_structured(StructuredKind::Mesh45, 201), catalog("ex5_2"));
    const double h = std::sqrt(2.0) / 200;
    const double arg = h * 50 * std::sqrt(2.0) / 3.0 + h * h * 1.0 / 12.0;
    CHECK(fine[0].bound == doctest::Approx(std::acos(arg)).epsilon(1e-12));
}

TEST_CASE("Delaunay-type aggregates on the example meshes") {
    auto c = catalog("ex5_1");
    auto r45 = analyze_conditions(generate_structured(StructuredKind::Mesh45, 41), c);
    auto r135 = analyze_conditions(generate_structured(StructuredKind::Mesh135, 41), c);
    CHECK(std::abs(r45.alpha_max - 0.43 * pi) <= 5e-3 * pi);
    CHECK(std::abs(r45.alpha_sum - 0.86 * pi) <= 5e-3 * pi);
    CHECK(std::abs(r135.alpha_max - 0.86 * pi) <= 5e-3 * pi);
    CHECK(std::abs(r135.alpha_sum - 1.71 * pi) <= 5e-3 * pi);
    CHECK(r45.verdicts.delaunay_strict);
    CHECK(r45.verdicts.nonobtuse_strict);
    CHECK(r45.level() == ConditionLevel::strict);
    CHECK_FALSE(r135.verdicts.delaunay_weak);
    CHECK_FALSE(r135.verdicts.nonobtuse_weak);
    CHECK(r135.level() == ConditionLevel::fail);
}

TEST_CASE("isotropic case reduces to the classical Delaunay sum") {
    for (const auto& m : {generate_structured(StructuredKind::Mesh135, 9), testing::staggered_square_mesh(9),
                          testing::hex_lattice_mesh(3)}) {
        auto edges = check_delaunay_type(m, catalog("laplace"));
        CHECK_FALSE(edges.empty());
        for (const auto& e : edges) {
            CHECK(e.theta == 0.0);
            CHECK(std::abs(e.lhs - (e.alpha_K + e.alpha_K_prime)) <= 1e-10);
            CHECK(std::abs(e.alpha_sum - e.lhs) <= 1e-12);
            CHECK(e.K < e.K_prime);
        }
    }
}

TEST_CASE("theta by hand for constant convection") {
    auto m = generate_structured(StructuredKind::Mesh45, 11);
    auto edges = check_delaunay_type(m, catalog("ex5_2"));
    const double h = std::sqrt(2.0) / 10;
    const double b = 50 * std::sqrt(2.0);
    for (const auto& e : edges) CHECK(e.theta == doctest::Approx(2 * (h * b / 3 + h * h / 12)).epsilon(1e-12));
}

TEST_CASE("levels follow the verdicts") {
    auto lap = catalog("laplace");
    CHECK(analyze_conditions(generate_structured(StructuredKind::Mesh45, 3), lap).level() == ConditionLevel::strict);
    // Right angles sit exactly on the bound from J = 4 on.
    auto r5 = analyze_conditions(generate_structured(StructuredKind::Mesh45, 5), lap);
    CHECK(r5.verdicts.nonobtuse_weak);
    CHECK_FALSE(r5.verdicts.nonobtuse_strict);
    CHECK(r5.level() == ConditionLevel::weak);
    CHECK(analyze_conditions(testing::hex_lattice_mesh(4), lap).level() == ConditionLevel::strict);

    // Strict angles but a disconnected interior are only weak.
    auto two = analyze_conditions(testing::disjoint_squares(5), catalog("ex5_1"));
    CHECK(two.verdicts.nonobtuse_strict);
    CHECK_FALSE(two.verdicts.interiorly_connected);
    CHECK(two.verdicts.interior_components == 2);
    CHECK(two.level() == ConditionLevel::weak);
    CHECK(to_string(ConditionLevel::weak) == "weak");
}

TEST_CASE("3D meshes use the nonobtuse condition only") {
    SimplicialMesh tet(3, {0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 1, 2, 3}, {true, true, true, true});
    Mat D = Mat::Identity(3, 3);
    auto p = constant_problem("iso3", D, Vec::Zero(3), 0.0);
    CHECK_THROWS_AS(check_delaunay_type(tet, p), UnsupportedError);
    auto r = analyze_conditions(tet, p);
    CHECK_FALSE(r.verdicts.delaunay_available);
    CHECK(r.alpha_max == doctest::Approx(pi / 2));
    CHECK(r.verdicts.connectivity_vacuous);
}

TEST_CASE("entry bounds") {
    auto c1 = catalog("ex5_1");
    auto m45 = generate_structured(StructuredKind::Mesh45, 11);
    auto r45 = entry_bound_report(m45, c1, assemble(m45, c1));
    CHECK(r45.all_nonpositive);
    CHECK(r45.bounds_nonpositive);
    CHECK(r45.violations == 0);

    auto m135 = generate_structured(StructuredKind::Mesh135, 11);
    auto r135 = entry_bound_report(m135, c1, assemble(m135, c1));
    CHECK_FALSE(r135.all_nonpositive);
    CHECK_FALSE(r135.bounds_nonpositive);
    CHECK(r135.violations == 0);

    auto lap = catalog("laplace");
    auto rl = entry_bound_report(m45, lap, assemble(m45, lap));
    CHECK(rl.violations == 0);
    for (const auto& e : rl.entries) {
        const auto a = m45.vertex(static_cast<std::size_t>(m45.interior_vertices()[static_cast<std::size_t>(e.row)]));
        const auto b = m45.vertex(static_cast<std::size_t>(m45.interior_vertices()[static_cast<std::size_t>(e.col)]));
        const bool axis = a[0] == b[0] || a[1] == b[1];
        if (axis) {
            CHECK(e.a_jk == doctest::Approx(-1.0));
            CHECK(e.bound_2d == doctest::Approx(-1.0));
        } else {
            CHECK(std::abs(e.a_jk) <= 1e-15);
            CHECK(std::abs(e.bound_2d) <= 1e-15);
        }
        CHECK(e.bound_general <= 1e-15);
    }
}

TEST_CASE("entry bounds hold for every catalog problem") {
    for (const auto& name : catalog_names())
        for (auto kind : {StructuredKind::Mesh45, StructuredKind::Mesh135}) {
            auto c = catalog(name);
            auto m = generate_structured(kind, 17);
            CAPTURE(name);
            CHECK(entry_bound_report(m, c, assemble(m, c)).violations == 0);
        }
}

TEST_CASE("M-uniformity measures") {
    auto ident = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
    auto hex = m_uniformity(testing::hex_lattice_mesh(3), ident);
    for (double e : hex.equidistribution) CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
    for (double a : hex.alignment) CHECK(a == doctest::Approx(1.0).epsilon(1e-12));

    // Sum of squared edges over 4 sqrt(3) |K| for a right isosceles triangle: 2 / sqrt(3).
    auto sq = m_uniformity(generate_structured(StructuredKind::Mesh45, 6), ident);
    CHECK(sq.sigma_h == doctest::Approx(1.0));
    for (double e : sq.equidistribution) CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
    for (double a : sq.alignment) CHECK(a == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));

    auto aniso = [](const Vec& x) {
        Mat M(2, 2);
        M << 1.0 + 4.0 * x[0] * x[0], 0.3, 0.3, 2.0 + std::sin(x[1]);
        return M;
    };
    for (const auto& m : {testing::staggered_square_mesh(9), generate_structured(StructuredKind::Mesh135, 9)}) {
        auto u = m_uniformity(m, aniso);
        double sum = 0.0;
        for (double a : u.alignment) CHECK(a >= 1.0 - 1e-12);
        for (double e : u.equidistribution) sum += e;
        CHECK(sum == doctest::Approx(static_cast<double>(m.num_elements())));
    }
    auto bad = [](const Vec&) { return Mat(-Mat::Identity(2, 2)); };
    CHECK_THROWS_AS(m_uniformity(testing::hex_lattice_mesh(2), bad), InvalidParameter);
}

TEST_CASE("conditions imply the matrix certificate") {
    int checked = 0;
    for (const auto& name : catalog_names())
        for (int J : {5, 9, 11, 17, 21, 41}) {
            auto m = generate_structured(StructuredKind::Mesh45, J);
            auto c = catalog(name);
            auto rep = analyze_conditions(m, c);
            if (rep.level() != ConditionLevel::strict) continue;
            ++checked;
            CAPTURE(name);
            CAPTURE(J);
            CHECK(m_matrix_certificate(assemble(m, c).A).irreducible_m_matrix());
        }
    CHECK(checked >= 6);
}

TEST_CASE("report serialization") {
    auto m = generate_structured(StructuredKind::Mesh45, 5);
    auto rep = analyze_conditions(m, catalog("ex5_1"));
    auto j = to_json(rep);
    CHECK(j["level"] == "strict");
    CHECK(j["num_elements"] == 32);
    CHECK(j["delaunay_type"]["strict"] == true);
    CHECK(j["interior_connectivity"]["components"] == 1);
    const auto el = per_element_csv(rep);
    const auto ed = per_edge_csv(rep);
    CHECK(std::count(el.begin(), el.end(), '\n') == 33);
    CHECK(std::count(ed.begin(), ed.end(), '\n') == static_cast<long>(rep.per_edge.size()) + 1);
    CHECK(el.rfind("element,alpha_max", 0) == 0);
}

}
