#include "eigenfem/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "eigenfem/errors.hpp"
#include "eigenfem/parallel.hpp"
#include "eigenfem/quadrature.hpp"

namespace eigenfem {

namespace {

constexpr double kPi = std::numbers::pi;

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

// Cyclic Jacobi sweeps on a symmetric matrix; returns the diagonal.
Vec jacobi_eigenvalues(Mat A) {
    const int n = static_cast<int>(A.rows());
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off <= 1e-30 * std::max(1.0, A.squaredNorm())) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (A(p, q) == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    return A.diagonal();
}

ProblemCoefficients make_problem(std::string label, std::function<Mat(const Vec&)> D,
                                 std::function<Vec(const Vec&)> b, std::function<double(const Vec&)> c,
                                 std::function<double(const Vec&)> div_b, bool convection_free) {
    ProblemCoefficients p;
    p.label = std::move(label);
    p.dim = 2;
    p.diffusion = std::move(D);
    p.convection = std::move(b);
    p.reaction = std::move(c);
    p.convection_divergence = std::move(div_b);
    p.convection_free = convection_free;
    return p;
}

Mat ex5_5_diffusion(const Vec& x, double k) {
    const double theta = kPi * std::sin(x[0]) * std::sin(x[1]);
    const double ct = std::cos(theta), st = std::sin(theta);
    Mat R = mat2(ct, -st, st, ct);
    Mat L = mat2(k * (1.0 - 0.5 * std::sin(x[0]) * std::sin(x[1])), 0.0, 0.0,
                 1.0 + 0.5 * std::cos(x[0]) * std::cos(x[1]));
    Mat D = R * L * R.transpose();
    // Exact symmetry; the triple product can differ in the last bit.
    const double off = 0.5 * (D(0, 1) + D(1, 0));
    D(0, 1) = D(1, 0) = off;
    return D;
}

std::string point_str(const Vec& x) {
    std::string s;
    for (int r = 0; r < x.size(); ++r) s += fmt::format("{}{}", r ? ", " : "", x[r]);
    return s;
}

} // namespace

std::pair<double, double> symmetric_eigen_extremes(const Mat& S) {
    if (S.rows() == 1) return {S(0, 0), S(0, 0)};
    if (S.rows() == 2) {
        const double m = 0.5 * (S(0, 0) + S(1, 1));
        const double h = 0.5 * (S(0, 0) - S(1, 1));
        const double r = std::hypot(h, 0.5 * (S(0, 1) + S(1, 0)));
        return {m - r, m + r};
    }
    const Vec ev = jacobi_eigenvalues(S);
    return {ev.minCoeff(), ev.maxCoeff()};
}

void validate_diffusion(const Mat& D, const Vec& x) {
    const double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw CoefficientError(fmt::format("diffusion is not symmetric at ({})", point_str(x)));
    const auto [lmin, lmax] = symmetric_eigen_extremes(D);
    (void)lmax;
    if (!(lmin > 0.0))
        throw CoefficientError(fmt::format("diffusion is not positive definite at ({}): lambda_min = {}",
                                           point_str(x), lmin));
}

ElementCoefficientStats element_stats(const ProblemCoefficients& coeffs, const SimplicialMesh& mesh, std::size_t K) {
    const int dim = mesh.dim();
    if (coeffs.dim != dim)
        throw CoefficientError(fmt::format("problem '{}' is {}D but the mesh is {}D", coeffs.label, coeffs.dim, dim));
    auto el = mesh.element(K);
    std::array<Vec, 4> xv;
    for (int a = 0; a <= dim; ++a) xv[static_cast<std::size_t>(a)] = mesh.vertex(static_cast<std::size_t>(el[a]));

    ElementCoefficientStats s;
    s.D_K = Mat::Zero(dim, dim);
    for (const auto& qp : degree2_rule(dim)) {
        Vec x = Vec::Zero(dim);
        for (int a = 0; a <= dim; ++a) x += qp.bary[static_cast<std::size_t>(a)] * xv[static_cast<std::size_t>(a)];
        const Mat D = coeffs.diffusion(x);
        validate_diffusion(D, x);
        s.D_K += qp.weight * D;
        s.b_sup = std::max(s.b_sup, coeffs.convection(x).norm());
        s.c_sup = std::max(s.c_sup, std::abs(coeffs.reaction(x)));
    }
    for (int a = 0; a <= dim; ++a) {
        const auto& x = xv[static_cast<std::size_t>(a)];
        s.b_sup = std::max(s.b_sup, coeffs.convection(x).norm());
        s.c_sup = std::max(s.c_sup, std::abs(coeffs.reaction(x)));
    }
    s.D_K = 0.5 * (s.D_K + s.D_K.transpose()).eval();
    std::tie(s.lambda_min_DK, s.lambda_max_DK) = symmetric_eigen_extremes(s.D_K);
    if (!(s.lambda_min_DK > 0.0))
        throw CoefficientError(fmt::format("element {} has non positive definite D_K", K));
    return s;
}

std::vector<ElementCoefficientStats> element_stats_all(const ProblemCoefficients& coeffs, const SimplicialMesh& mesh) {
    std::vector<ElementCoefficientStats> out(mesh.num_elements());
    parallel_for(out.size(), [&](std::size_t k) { out[k] = element_stats(coeffs, mesh, k); });
    return out;
}

std::vector<std::string> catalog_names() {
    return {"ex5_1", "ex5_2", "ex5_3", "ex5_4", "ex5_5k10", "ex5_5k100", "laplace"};
}

ProblemCoefficients catalog(std::string_view name) {
    auto zero_b = [](const Vec&) { return vec2(0.0, 0.0); };
    auto zero = [](const Vec&) { return 0.0; };
    auto one = [](const Vec&) { return 1.0; };
    const Mat anisotropic = mat2(10.0, 9.0, 9.0, 10.0);

    if (name == "laplace")
        return make_problem("laplace", [](const Vec&) { return Mat(Mat::Identity(2, 2)); }, zero_b, zero, zero, true);
    if (name == "ex5_1")
        return make_problem("ex5_1", [anisotropic](const Vec&) { return anisotropic; }, zero_b, zero, zero, true);
    if (name == "ex5_2")
        return make_problem(
            "ex5_2", [anisotropic](const Vec&) { return anisotropic; },
            [](const Vec&) { return vec2(50.0, -50.0); }, one, zero, false);
    if (name == "ex5_3")
        return make_problem(
            "ex5_3",
            [](const Vec& x) {
                return mat2(1.0 + 0.05 * std::cos(kPi * x[0]), 0.0, 0.0, 1.0 + 0.05 * std::sin(kPi * x[1]));
            },
            [](const Vec& x) { return vec2(20.0 * (x[1] - 0.5), -20.0 * (x[0] - 0.5)); }, one, zero, false);
    if (name == "ex5_4")
        return make_problem(
            "ex5_4",
            [](const Vec& x) {
                const double s = kPi * x[0] * x[1];
                return mat2(100.0 * (1.0 - 0.5 * std::sin(s)), 0.0, 0.0, 1.0 + 0.5 * std::cos(s));
            },
            zero_b, zero, zero, true);
    if (name == "ex5_5k10")
        return make_problem("ex5_5k10", [](const Vec& x) { return ex5_5_diffusion(x, 10.0); }, zero_b, zero, zero, true);
    if (name == "ex5_5k100")
        return make_problem("ex5_5k100", [](const Vec& x) { return ex5_5_diffusion(x, 100.0); }, zero_b, zero, zero,
                            true);
    throw CoefficientError(fmt::format("unknown catalog problem '{}'", name));
}

ProblemCoefficients constant_problem(std::string label, const Mat& D, const Vec& b, double c) {
    const int dim = static_cast<int>(D.rows());
    if (D.cols() != dim || b.size() != dim || (dim != 2 && dim != 3))
        throw CoefficientError("constant problem: D must be d x d and b of length d, d in {2,3}");
    validate_diffusion(D, Vec::Zero(dim));
    ProblemCoefficients p;
    p.label = std::move(label);
    p.dim = dim;
    p.diffusion = [D](const Vec&) { return D; };
    p.convection = [b](const Vec&) { return b; };
    p.reaction = [c](const Vec&) { return c; };
    p.convection_divergence = [](const Vec&) { return 0.0; };
    p.convection_free = b.isZero(0.0);
    return p;
}

ProblemCoefficients problem_from_json(const nlohmann::json& j) {
    try {
        const auto rows = j.at("diffusion").get<std::vector<std::vector<double>>>();
        const int dim = static_cast<int>(rows.size());
        if (dim != 2 && dim != 3) throw CoefficientError("diffusion must be 2x2 or 3x3");
        Mat D(dim, dim);
        for (int r = 0; r < dim; ++r) {
            if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != dim)
                throw CoefficientError("diffusion must be square");
            for (int c = 0; c < dim; ++c) D(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        Vec b = Vec::Zero(dim);
        if (j.contains("convection")) {
            const auto bv = j.at("convection").get<std::vector<double>>();
            if (static_cast<int>(bv.size()) != dim) throw CoefficientError("convection length must match dimension");
            for (int r = 0; r < dim; ++r) b[r] = bv[static_cast<std::size_t>(r)];
        }
        const double c = j.value("reaction", 0.0);
        return constant_problem(j.value("label", std::string("custom")), D, b, c);
    } catch (const nlohmann::json::exception& e) {
        throw CoefficientError(fmt::format("invalid problem descriptor: {}", e.what()));
    }
}

AssumptionCheck assumption_check(const ProblemCoefficients& coeffs, int n) {
    if (coeffs.dim != 2) throw UnsupportedError("assumption_check samples the unit square (2D problems only)");
    AssumptionCheck out;
    out.min_value = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec x = vec2(static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1));
            validate_diffusion(coeffs.diffusion(x), x);
            const double v = coeffs.reaction(x) - 0.5 * coeffs.convection_divergence(x);
            if (v < out.min_value) {
                out.min_value = v;
                out.worst_point = x;
            }
        }
    }
    out.ok = out.min_value >= -1e-12;
    return out;
}

double reported_reference(std::string_view name) {
    if (name == "laplace") return 2.0 * kPi * kPi;
    if (name == "ex5_1") return 150.288;
    if (name == "ex5_2") return 1401.39;
    if (name == "ex5_3") return 21.0714;
    if (name == "ex5_4") return 687.666;
    if (name == "ex5_5k10") return 170.422;
    if (name == "ex5_5k100") return 1020.15;
    return 0.0;
}

} // namespace eigenfem
