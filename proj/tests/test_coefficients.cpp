#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eigenfem/coefficients.hpp"
#include "eigenfem/errors.hpp"
#include "eigenfem/quadrature.hpp"

using namespace eigenfem;

namespace {
Vec pt(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}
Mat m2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}
} // namespace

TEST_SUITE("coefficients") {

TEST_CASE("quadrature weights and exactness") {
    for (int d : {2, 3}) {
        double w = 0.0;
        for (const auto& q : degree2_rule(d)) {
            w += q.weight;
            double s = 0.0;
            for (double b : q.bary) s += b;
            CHECK(s == doctest::Approx(1.0));
        }
        CHECK(w == doctest::Approx(1.0));
    }
    // Mean of lambda_0 * lambda_1 over a simplex is 1/((d+1)(d+2)).
    for (int d : {2, 3}) {
        double m = 0.0, sq = 0.0;
        for (const auto& q : degree2_rule(d)) {
            m += q.weight * q.bary[0] * q.bary[1];
            sq += q.weight * q.bary[0] * q.bary[0];
        }
        CHECK(m == doctest::Approx(1.0 / ((d + 1) * (d + 2))).epsilon(1e-14));
        CHECK(sq == doctest::Approx(2.0 / ((d + 1) * (d + 2))).epsilon(1e-14));
    }
}

TEST_CASE("element stats for the anisotropic example") {
    auto m = generate_structured(StructuredKind::Mesh45, 5);
    auto s = element_stats(catalog("ex5_1"), m, 3);
    CHECK(s.D_K(0, 0) == doctest::Approx(10.0));
    CHECK(s.D_K(0, 1) == doctest::Approx(9.0));
    CHECK(s.lambda_min_DK == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(s.lambda_max_DK == doctest::Approx(19.0).epsilon(1e-13));
    CHECK(s.b_sup == 0.0);

    auto s2 = element_stats(catalog("ex5_2"), m, 0);
    CHECK(s2.b_sup == doctest::Approx(50.0 * std::sqrt(2.0)));
    CHECK(s2.c_sup == 1.0);

    auto s3 = element_stats(catalog("laplace"), m, 0);
    CHECK(s3.lambda_min_DK == 1.0);
    CHECK(s3.lambda_max_DK == 1.0);
}

TEST_CASE("catalog values") {
    const Mat d3 = catalog("ex5_3").diffusion(pt(0, 0));
    CHECK(d3(0, 0) == doctest::Approx(1.05));
    CHECK(d3(1, 1) == doctest::Approx(1.0));
    CHECK(d3(0, 1) == 0.0);
    CHECK(catalog("ex5_2").reaction(pt(0.3, 0.7)) == 1.0);
    CHECK(catalog("laplace").convection_divergence(pt(0.2, 0.1)) == 0.0);
    CHECK(catalog("ex5_1").convection_free);
    CHECK_FALSE(catalog("ex5_2").convection_free);
    CHECK_THROWS_AS(catalog("ex9"), CoefficientError);
    CHECK(catalog_names().size() == 7);
    CHECK(reported_reference("ex5_1") == 150.288);
    CHECK(reported_reference("laplace") == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("assumption holds on every catalog problem") {
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        auto a = assumption_check(catalog(name), 100);
        CHECK(a.ok);
    }
}

TEST_CASE("convection fields are divergence free where claimed") {
    // Central differences on the catalog fields against the analytic divergence.
    const double h = 1e-6;
    for (const auto& name : catalog_names()) {
        auto c = catalog(name);
        for (double x : {0.1, 0.45, 0.8})
            for (double y : {0.2, 0.6}) {
                const double div = (c.convection(pt(x + h, y))[0] - c.convection(pt(x - h, y))[0]) / (2 * h) +
                                   (c.convection(pt(x, y + h))[1] - c.convection(pt(x, y - h))[1]) / (2 * h);
                CHECK(div == doctest::Approx(c.convection_divergence(pt(x, y))).epsilon(1e-6).scale(1.0));
                CHECK(c.reaction(pt(x, y)) >= 0.0);
            }
    }
}

TEST_CASE("rotated diffusion keeps its spectrum") {
    for (double k : {10.0, 100.0}) {
        auto c = catalog(k == 10.0 ? "ex5_5k10" : "ex5_5k100");
        for (double x : {0.0, 0.25, 0.5, 0.9})
            for (double y : {0.1, 0.5, 1.0}) {
                auto [lo, hi] = symmetric_eigen_extremes(c.diffusion(pt(x, y)));
                const double e1 = k * (1.0 - 0.5 * std::sin(x) * std::sin(y));
                const double e2 = 1.0 + 0.5 * std::cos(x) * std::cos(y);
                CHECK(lo == doctest::Approx(std::min(e1, e2)).epsilon(1e-12));
                CHECK(hi == doctest::Approx(std::max(e1, e2)).epsilon(1e-12));
            }
    }
}

TEST_CASE("diffusion validation") {
    CHECK_NOTHROW(validate_diffusion(m2(2, 1, 1, 2), pt(0, 0)));
    CHECK_THROWS_AS(validate_diffusion(m2(1, 2, 2, 1), pt(0, 0)), CoefficientError);
    CHECK_THROWS_AS(validate_diffusion(m2(1, 0.5, 0, 1), pt(0, 0)), CoefficientError);
    CHECK_THROWS_AS(constant_problem("bad", m2(-1, 0, 0, 1), pt(0, 0), 0.0), CoefficientError);

    Mat d3 = Mat::Identity(3, 3);
    d3(0, 0) = 4.0;
    d3(1, 2) = d3(2, 1) = 0.5;
    auto [lo, hi] = symmetric_eigen_extremes(d3);
    CHECK(lo == doctest::Approx(0.5));
    CHECK(hi == doctest::Approx(4.0));
}

TEST_CASE("problem descriptors") {
    auto p = problem_from_json(nlohmann::json::parse(
        R"({"label": "aniso", "diffusion": [[2, 1], [1, 3]], "convection": [1, -2], "reaction": 0.5})"));
    CHECK(p.label == "aniso");
    CHECK(p.diffusion(pt(0.3, 0.3))(1, 1) == 3.0);
    CHECK(p.convection(pt(0, 0))[1] == -2.0);
    CHECK(p.reaction(pt(0, 0)) == 0.5);
    CHECK_FALSE(p.convection_free);
    CHECK(problem_from_json(nlohmann::json::parse(R"({"diffusion": [[1, 0], [0, 1]]})")).convection_free);
    CHECK_THROWS_AS(problem_from_json(nlohmann::json::parse(R"({"diffusion": [[1, 0]]})")), CoefficientError);
    CHECK_THROWS_AS(problem_from_json(nlohmann::json::parse(R"({"convection": [1, 0]})")), CoefficientError);
    CHECK_THROWS_AS(problem_from_json(nlohmann::json::parse(R"({"diffusion": [[1, 3], [3, 1]]})")),
                    CoefficientError);
}

TEST_CASE("dimension mismatch") {
    Mat D = Mat::Identity(3, 3);
    Vec b = Vec::Zero(3);
    auto p3 = constant_problem("iso3", D, b, 0.0);
    CHECK_THROWS_AS(element_stats(p3, generate_structured(StructuredKind::Mesh45, 3), 0), CoefficientError);
    CHECK_THROWS_AS(assumption_check(p3), UnsupportedError);
}

}
