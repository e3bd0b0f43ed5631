#include "eigenfem/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "eigenfem/errors.hpp"
#include "eigenfem/parallel.hpp"
#include "eigenfem/quadrature.hpp"

namespace eigenfem {

MassTreatment parse_mass_treatment(const std::string& name) {
    if (name == "consistent") return MassTreatment::consistent;
    if (name == "lumped") return MassTreatment::lumped;
    throw InvalidParameter("mass treatment must be 'consistent' or 'lumped', got '" + name + "'");
}

std::string to_string(MassTreatment mass) { return mass == MassTreatment::consistent ? "consistent" : "lumped"; }

namespace {

Vec quadrature_point(const SimplicialMesh& mesh, std::span<const int> el, const QuadraturePoint& qp) {
    Vec x = Vec::Zero(mesh.dim());
    for (std::size_t a = 0; a < el.size(); ++a) x += qp.bary[a] * mesh.vertex(static_cast<std::size_t>(el[a]));
    return x;
}

} // namespace

LocalMatrices element_matrices(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs,
                               const ElementGeometry& geom, const ElementCoefficientStats& stats, std::size_t K) {
    const int n = mesh.vertices_per_element();
    const int d = mesh.dim();
    const double vol = geom.volume;
    auto el = mesh.element(K);
    LocalMatrices out;

    std::array<Vec, 4> Dg;
    for (int b = 0; b < n; ++b) Dg[static_cast<std::size_t>(b)] = stats.D_K * geom.grad_basis[static_cast<std::size_t>(b)];
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double v = vol * geom.grad_basis[static_cast<std::size_t>(a)].dot(Dg[static_cast<std::size_t>(b)]);
            out.diffusion[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
            out.stiffness[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
            out.mass[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                vol * (a == b ? 2.0 : 1.0) / ((d + 1) * (d + 2));
        }

    for (const auto& qp : degree2_rule(d)) {
        const Vec x = quadrature_point(mesh, el, qp);
        const Vec bx = coeffs.convection(x);
        const double cx = coeffs.reaction(x);
        const double w = qp.weight * vol;
        for (int a = 0; a < n; ++a) {
            const double phi_a = qp.bary[static_cast<std::size_t>(a)];
            for (int b = 0; b < n; ++b) {
                const double phi_b = qp.bary[static_cast<std::size_t>(b)];
                out.stiffness[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                    w * phi_a * (bx.dot(geom.grad_basis[static_cast<std::size_t>(b)]) + cx * phi_b);
            }
        }
    }
    return out;
}

SparseMatrix interior_pattern(const SimplicialMesh& mesh) {
    const auto incident = mesh.vertex_elements();
    const auto interior = mesh.interior_vertices();
    const int nv = static_cast<int>(interior.size());
    std::vector<int> offsets(static_cast<std::size_t>(nv) + 1, 0);
    std::vector<int> cols;
    std::vector<int> row;
    for (int i = 0; i < nv; ++i) {
        row.clear();
        for (int K : incident[static_cast<std::size_t>(interior[static_cast<std::size_t>(i)])])
            for (int w : mesh.element(static_cast<std::size_t>(K))) {
                const int j = mesh.interior_index(static_cast<std::size_t>(w));
                if (j != SimplicialMesh::kBoundary) row.push_back(j);
            }
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        cols.insert(cols.end(), row.begin(), row.end());
        offsets[static_cast<std::size_t>(i) + 1] = static_cast<int>(cols.size());
    }
    std::vector<double> vals(cols.size(), 0.0);
    return SparseMatrix(nv, nv, std::move(offsets), std::move(cols), std::move(vals));
}

AssembledSystem assemble(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs) {
    const auto geoms = compute_geometry_all(mesh);
    const auto stats = element_stats_all(coeffs, mesh);
    std::vector<LocalMatrices> local(mesh.num_elements());
    parallel_for(local.size(), [&](std::size_t K) { local[K] = element_matrices(mesh, coeffs, geoms[K], stats[K], K); });

    AssembledSystem sys;
    sys.mesh_label = mesh.label();
    sys.coeffs_label = coeffs.label;
    sys.A = interior_pattern(mesh);
    sys.A_diffusion = sys.A;
    sys.B = sys.A;
    const int nv = sys.A.rows();
    sys.B_lumped.assign(static_cast<std::size_t>(nv), 0.0);

    const auto incident = mesh.vertex_elements();
    const auto interior = mesh.interior_vertices();
    const auto offsets = sys.A.row_offsets();
    const auto cols = sys.A.col_indices();
    auto a_vals = sys.A.values_mut();
    auto ad_vals = sys.A_diffusion.values_mut();
    auto b_vals = sys.B.values_mut();
    const int per = mesh.vertices_per_element();

    parallel_for(static_cast<std::size_t>(nv), [&](std::size_t i) {
        const int v = interior[i];
        const auto row_begin = cols.begin() + offsets[i];
        const auto row_end = cols.begin() + offsets[i + 1];
        for (int K : incident[static_cast<std::size_t>(v)]) {
            auto el = mesh.element(static_cast<std::size_t>(K));
            const auto a = static_cast<std::size_t>(std::find(el.begin(), el.end(), v) - el.begin());
            const auto& loc = local[static_cast<std::size_t>(K)];
            for (int b = 0; b < per; ++b) {
                const int j = mesh.interior_index(static_cast<std::size_t>(el[b]));
                if (j == SimplicialMesh::kBoundary) continue;
                const auto p = static_cast<std::size_t>(std::lower_bound(row_begin, row_end, j) - cols.begin());
                a_vals[p] += loc.stiffness[a][static_cast<std::size_t>(b)];
                ad_vals[p] += loc.diffusion[a][static_cast<std::size_t>(b)];
                b_vals[p] += loc.mass[a][static_cast<std::size_t>(b)];
            }
        }
        double row_sum = 0.0;
        for (auto p = offsets[i]; p < offsets[i + 1]; ++p) row_sum += b_vals[static_cast<std::size_t>(p)];
        sys.B_lumped[i] = row_sum;
    });
    return sys;
}

double rayleigh(const AssembledSystem& system, const ProblemCoefficients& coeffs, const SimplicialMesh& mesh,
                std::span<const double> v, MassTreatment mass) {
    const auto n = static_cast<std::size_t>(system.size());
    if (v.size() != n) throw InvalidInput("rayleigh: vector length does not match the system");
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
        throw InvalidInput("rayleigh: zero vector");

    const auto Av = system.A_diffusion.multiply(v);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += v[i] * Av[i];

    const int d = mesh.dim();
    const int per = mesh.vertices_per_element();
    for (std::size_t K = 0; K < mesh.num_elements(); ++K) {
        auto el = mesh.element(K);
        std::array<double, 4> vk{};
        bool any = false;
        for (int a = 0; a < per; ++a) {
            const int j = mesh.interior_index(static_cast<std::size_t>(el[a]));
            if (j != SimplicialMesh::kBoundary) {
                vk[static_cast<std::size_t>(a)] = v[static_cast<std::size_t>(j)];
                any = any || vk[static_cast<std::size_t>(a)] != 0.0;
            }
        }
        if (!any) continue;
        const double vol = std::abs(mesh.signed_volume(K));
        for (const auto& qp : degree2_rule(d)) {
            const Vec x = quadrature_point(mesh, el, qp);
            double vh = 0.0;
            for (int a = 0; a < per; ++a) vh += qp.bary[static_cast<std::size_t>(a)] * vk[static_cast<std::size_t>(a)];
            num += qp.weight * vol * (coeffs.reaction(x) - 0.5 * coeffs.convection_divergence(x)) * vh * vh;
        }
    }

    double den = 0.0;
    if (mass == MassTreatment::lumped) {
        for (std::size_t i = 0; i < n; ++i) den += system.B_lumped[i] * v[i] * v[i];
    } else {
        const auto Bv = system.B.multiply(v);
        for (std::size_t i = 0; i < n; ++i) den += v[i] * Bv[i];
    }
    return num / den;
}

} // namespace eigenfem
