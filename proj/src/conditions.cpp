#include "eigenfem/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>
#include <fmt/format.h>

#include "eigenfem/errors.hpp"
#include "eigenfem/parallel.hpp"
#include "eigenfem/quadrature.hpp"

namespace eigenfem {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

int local_index(std::span<const int> el, int v) {
    return static_cast<int>(std::find(el.begin(), el.end(), v) - el.begin());
}

/// Metric angle of element K facing the edge (v0, v1): the angle between the
/// faces opposite v0 and v1.
double facing_angle(const SimplicialMesh& mesh, const ElementGeometry& g, const Mat& D_K, int K, int v0, int v1) {
    auto el = mesh.element(static_cast<std::size_t>(K));
    return metric_dihedral_angle(g, D_K, local_index(el, v0), local_index(el, v1));
}

double nonobtuse_argument(const ElementGeometry& g, const ElementCoefficientStats& s) {
    const int d = g.dim;
    const double h = g.diameter;
    return h * s.b_sup / (s.lambda_min_DK * (d + 1)) + h * h * s.c_sup / (s.lambda_min_DK * (d + 1) * (d + 2));
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

} // namespace

std::string to_string(ConditionLevel level) {
    switch (level) {
    case ConditionLevel::strict: return "strict";
    case ConditionLevel::weak: return "weak";
    case ConditionLevel::fail: return "fail";
    }
    return "fail";
}

double arccot(double x) { return kPi / 2.0 - std::atan(x); }

ConditionLevel ConditionReport::level() const {
    const auto& v = verdicts;
    if ((v.nonobtuse_strict || (v.delaunay_available && v.delaunay_strict)) && v.interiorly_connected)
        return ConditionLevel::strict;
    if (v.nonobtuse_weak || (v.delaunay_available && v.delaunay_weak)) return ConditionLevel::weak;
    return ConditionLevel::fail;
}

std::vector<ElementCondition> check_nonobtuse(const SimplicialMesh& mesh, const std::vector<ElementGeometry>& geoms,
                                              const std::vector<ElementCoefficientStats>& stats) {
    std::vector<ElementCondition> out(mesh.num_elements());
    parallel_for(out.size(), [&](std::size_t K) {
        auto& r = out[K];
        r.element = static_cast<int>(K);
        r.alpha_max = max_metric_angle(geoms[K], stats[K].D_K);
        const double arg = nonobtuse_argument(geoms[K], stats[K]);
        if (arg > 1.0) {
            r.bound_defined = false;
            r.bound = kNaN;
            r.reason = "convection/reaction dominates at this h";
            return;
        }
        r.bound = std::acos(arg);
        r.pass_weak = r.alpha_max <= r.bound + kConditionTol;
        r.pass_strict = r.alpha_max < r.bound - kConditionTol;
        if (!r.pass_weak)
            r.reason = "obtuse metric angle";
        else if (!r.pass_strict)
            r.reason = "metric angle at the bound";
    });
    return out;
}

std::vector<ElementCondition> check_nonobtuse(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs) {
    return check_nonobtuse(mesh, compute_geometry_all(mesh), element_stats_all(coeffs, mesh));
}

std::vector<EdgeCondition> check_delaunay_type(const SimplicialMesh& mesh, const std::vector<ElementGeometry>& geoms,
                                               const std::vector<ElementCoefficientStats>& stats) {
    if (mesh.dim() != 2) throw UnsupportedError("the Delaunay-type condition is defined in 2D only");
    std::vector<EdgePatch> shared;
    for (auto& e : edge_patches(mesh))
        if (e.elements.size() == 2) shared.push_back(std::move(e));

    std::vector<EdgeCondition> out(shared.size());
    parallel_for(out.size(), [&](std::size_t i) {
        const auto& e = shared[i];
        auto& r = out[i];
        r.v0 = e.v0;
        r.v1 = e.v1;
        r.K = e.elements[0];
        r.K_prime = e.elements[1];
        const auto K = static_cast<std::size_t>(r.K);
        const auto Kp = static_cast<std::size_t>(r.K_prime);
        r.alpha_K = facing_angle(mesh, geoms[K], stats[K].D_K, r.K, e.v0, e.v1);
        r.alpha_K_prime = facing_angle(mesh, geoms[Kp], stats[Kp].D_K, r.K_prime, e.v0, e.v1);

        const double det = stats[K].D_K.determinant();
        const double det_p = stats[Kp].D_K.determinant();
        const double hK = geoms[K].diameter;
        const double hKp = geoms[Kp].diameter;
        // Both b and c norms are taken on K, as in the definition of Theta.
        const double b = stats[K].b_sup;
        const double c = stats[K].c_sup;
        r.theta = hK * b / 3.0 + hK * hK * c / 12.0 + hKp * b / 3.0 + hKp * hKp * c / 12.0;

        const double cot_K = 1.0 / std::tan(r.alpha_K);
        const double cot_Kp = 1.0 / std::tan(r.alpha_K_prime);
        const double t1 = std::sqrt(det_p / det) * cot_Kp;
        const double t2 = std::sqrt(det / det_p) * cot_K;
        r.lhs = 0.5 * (r.alpha_K + r.alpha_K_prime + arccot(t1 - 2.0 * r.theta / std::sqrt(det)) +
                       arccot(t2 - 2.0 * r.theta / std::sqrt(det_p)));
        r.alpha_sum = 0.5 * (r.alpha_K + r.alpha_K_prime + arccot(t1) + arccot(t2));
        r.interior = !mesh.is_boundary(static_cast<std::size_t>(e.v0)) && !mesh.is_boundary(static_cast<std::size_t>(e.v1));
        r.pass_weak = r.lhs <= kPi + kConditionTol;
        r.pass_strict = r.lhs < kPi - kConditionTol;
    });
    return out;
}

std::vector<EdgeCondition> check_delaunay_type(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs) {
    return check_delaunay_type(mesh, compute_geometry_all(mesh), element_stats_all(coeffs, mesh));
}

ConditionReport analyze_conditions(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs) {
    const auto geoms = compute_geometry_all(mesh);
    const auto stats = element_stats_all(coeffs, mesh);
    ConditionReport rep;
    rep.mesh_label = mesh.label();
    rep.coeffs_label = coeffs.label;
    rep.dim = mesh.dim();
    rep.per_element = check_nonobtuse(mesh, geoms, stats);

    auto& v = rep.verdicts;
    v.nonobtuse_weak = std::all_of(rep.per_element.begin(), rep.per_element.end(), [](const auto& r) { return r.pass_weak; });
    v.nonobtuse_strict =
        std::all_of(rep.per_element.begin(), rep.per_element.end(), [](const auto& r) { return r.pass_strict; });
    for (const auto& r : rep.per_element) rep.alpha_max = std::max(rep.alpha_max, r.alpha_max);

    if (mesh.dim() == 2) {
        rep.per_edge = check_delaunay_type(mesh, geoms, stats);
        v.delaunay_available = true;
        v.delaunay_weak = true;
        v.delaunay_strict = true;
        for (const auto& e : rep.per_edge) {
            rep.alpha_sum = std::max(rep.alpha_sum, e.alpha_sum);
            if (!e.interior) continue;
            v.delaunay_weak = v.delaunay_weak && e.pass_weak;
            v.delaunay_strict = v.delaunay_strict && e.pass_strict;
        }
    }

    const auto conn = interior_connectivity(mesh);
    v.interiorly_connected = conn.connected;
    v.connectivity_vacuous = conn.vacuous;
    v.interior_components = static_cast<int>(conn.components.size());
    return rep;
}

EntryBoundReport entry_bound_report(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs,
                                    const AssembledSystem& system) {
    const auto geoms = compute_geometry_all(mesh);
    const auto stats = element_stats_all(coeffs, mesh);
    const int d = mesh.dim();

    std::vector<EdgePatch> edges;
    for (auto& e : edge_patches(mesh))
        if (!mesh.is_boundary(static_cast<std::size_t>(e.v0)) && !mesh.is_boundary(static_cast<std::size_t>(e.v1)))
            edges.push_back(std::move(e));

    EntryBoundReport rep;
    rep.entries.resize(edges.size());
    const double scale = std::max(system.A.max_abs(), 1.0);
    parallel_for(edges.size(), [&](std::size_t i) {
        const auto& e = edges[i];
        auto& r = rep.entries[i];
        r.row = mesh.interior_index(static_cast<std::size_t>(e.v0));
        r.col = mesh.interior_index(static_cast<std::size_t>(e.v1));
        r.a_jk = system.A.at(r.row, r.col);
        r.a_kj = system.A.at(r.col, r.row);

        double general = 0.0;
        for (int K : e.elements) {
            const auto& g = geoms[static_cast<std::size_t>(K)];
            const auto& s = stats[static_cast<std::size_t>(K)];
            auto el = mesh.element(static_cast<std::size_t>(K));
            const double hj = metric_altitude(g, s.D_K, local_index(el, e.v0));
            const double hk = metric_altitude(g, s.D_K, local_index(el, e.v1));
            const double h = g.diameter;
            general += g.volume / (hj * hk) *
                       (-std::cos(max_metric_angle(g, s.D_K)) + h * s.b_sup / ((d + 1) * s.lambda_min_DK) +
                        h * h * s.c_sup / ((d + 1) * (d + 2) * s.lambda_min_DK));
        }
        r.bound_general = general;

        r.bound_2d = kNaN;
        double tightest = general;
        if (d == 2 && e.elements.size() == 2) {
            double b2 = 0.0;
            for (int K : e.elements) {
                const auto& g = geoms[static_cast<std::size_t>(K)];
                const auto& s = stats[static_cast<std::size_t>(K)];
                const double alpha = facing_angle(mesh, g, s.D_K, K, e.v0, e.v1);
                const double h = g.diameter;
                b2 += -0.5 * std::sqrt(s.D_K.determinant()) / std::tan(alpha) + h * s.b_sup / 3.0 + h * h * s.c_sup / 12.0;
            }
            r.bound_2d = b2;
            tightest = std::min(tightest, b2);
        }
        const double slack = 1e-10 * scale;
        r.violated = r.a_jk > tightest + slack || r.a_kj > tightest + slack;
    });
    for (const auto& r : rep.entries) {
        rep.violations += r.violated ? 1 : 0;
        rep.all_nonpositive = rep.all_nonpositive && r.a_jk <= 0.0 && r.a_kj <= 0.0;
        rep.bounds_nonpositive = rep.bounds_nonpositive && r.bound_general <= 0.0 &&
                                 (std::isnan(r.bound_2d) || r.bound_2d <= 0.0);
    }
    return rep;
}

MUniformity m_uniformity(const SimplicialMesh& mesh, const std::function<Mat(const Vec&)>& metric) {
    const int d = mesh.dim();
    const auto geoms = compute_geometry_all(mesh);
    const std::size_t N = mesh.num_elements();
    std::vector<double> metric_volume(N);
    MUniformity out;
    out.alignment.resize(N);
    parallel_for(N, [&](std::size_t K) {
        auto el = mesh.element(K);
        Mat M = Mat::Zero(d, d);
        for (const auto& qp : degree2_rule(d)) {
            Vec x = Vec::Zero(d);
            for (int a = 0; a <= d; ++a) x += qp.bary[static_cast<std::size_t>(a)] * mesh.vertex(static_cast<std::size_t>(el[a]));
            const Mat Mx = metric(x);
            const auto [lmin, lmax] = symmetric_eigen_extremes(0.5 * (Mx + Mx.transpose()));
            (void)lmax;
            if (!(lmin > 0.0)) throw InvalidParameter("metric tensor is not positive definite at a sample point");
            M += qp.weight * Mx;
        }
        const auto& J = geoms[K].jacobian;
        const Mat G = J.transpose() * M * J;
        metric_volume[K] = geoms[K].volume * std::sqrt(M.determinant());
        out.alignment[K] = G.trace() / (d * std::pow(G.determinant(), 1.0 / d));
    });
    for (double v : metric_volume) out.sigma_h += v;
    out.equidistribution.resize(N);
    for (std::size_t K = 0; K < N; ++K)
        out.equidistribution[K] = metric_volume[K] * static_cast<double>(N) / out.sigma_h;
    return out;
}

nlohmann::json to_json(const ConditionReport& report) {
    const auto& v = report.verdicts;
    nlohmann::json j;
    j["mesh"] = report.mesh_label;
    j["problem"] = report.coeffs_label;
    j["dim"] = report.dim;
    j["num_elements"] = report.per_element.size();
    j["alpha_max"] = report.alpha_max;
    j["alpha_max_over_pi"] = report.alpha_max / kPi;
    if (v.delaunay_available) {
        j["alpha_sum"] = report.alpha_sum;
        j["alpha_sum_over_pi"] = report.alpha_sum / kPi;
    }
    int undefined = 0, weak_fail = 0, strict_fail = 0;
    for (const auto& r : report.per_element) {
        undefined += r.bound_defined ? 0 : 1;
        weak_fail += r.pass_weak ? 0 : 1;
        strict_fail += r.pass_strict ? 0 : 1;
    }
    j["nonobtuse"] = {{"weak", v.nonobtuse_weak},
                      {"strict", v.nonobtuse_strict},
                      {"elements_failing_weak", weak_fail},
                      {"elements_failing_strict", strict_fail},
                      {"elements_with_undefined_bound", undefined}};
    if (v.delaunay_available) {
        int interior = 0, edge_weak_fail = 0, edge_strict_fail = 0;
        double worst = 0.0;
        for (const auto& e : report.per_edge) {
            if (!e.interior) continue;
            ++interior;
            edge_weak_fail += e.pass_weak ? 0 : 1;
            edge_strict_fail += e.pass_strict ? 0 : 1;
            worst = std::max(worst, e.lhs);
        }
        j["delaunay_type"] = {{"weak", v.delaunay_weak},
                              {"strict", v.delaunay_strict},
                              {"interior_edges", interior},
                              {"edges_failing_weak", edge_weak_fail},
                              {"edges_failing_strict", edge_strict_fail},
                              {"max_lhs_over_pi", worst / kPi}};
    }
    j["interior_connectivity"] = {
        {"connected", v.interiorly_connected}, {"vacuous", v.connectivity_vacuous}, {"components", v.interior_components}};
    j["level"] = to_string(report.level());
    return j;
}

std::string per_element_csv(const ConditionReport& report) {
    std::string s = "element,alpha_max,alpha_max_over_pi,bound,pass_weak,pass_strict,reason\n";
    for (const auto& r : report.per_element)
        s += fmt::format("{},{},{},{},{},{},{}\n", r.element, g17(r.alpha_max), g17(r.alpha_max / kPi),
                         r.bound_defined ? g17(r.bound) : "undefined", r.pass_weak ? 1 : 0, r.pass_strict ? 1 : 0,
                         r.reason);
    return s;
}

std::string per_edge_csv(const ConditionReport& report) {
    std::string s = "v0,v1,K,K_prime,alpha_K,alpha_K_prime,theta,lhs,lhs_over_pi,alpha_sum,interior,pass_weak,pass_strict\n";
    for (const auto& e : report.per_edge)
        s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", e.v0, e.v1, e.K, e.K_prime, g17(e.alpha_K),
                         g17(e.alpha_K_prime), g17(e.theta), g17(e.lhs), g17(e.lhs / kPi), g17(e.alpha_sum),
                         e.interior ? 1 : 0, e.pass_weak ? 1 : 0, e.pass_strict ? 1 : 0);
    return s;
}

} // namespace eigenfem
