#include "eigenfem/reference.hpp"

#include "eigenfem/errors.hpp"

namespace eigenfem::reference {

std::vector<ElementGeometry> geometry_serial(const SimplicialMesh& mesh) {
    std::vector<ElementGeometry> out;
    out.reserve(mesh.num_elements());
    for (std::size_t K = 0; K < mesh.num_elements(); ++K) out.push_back(compute_geometry(mesh, K));
    return out;
}

AssembledSystem assemble_serial(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs) {
    AssembledSystem sys;
    sys.mesh_label = mesh.label();
    sys.coeffs_label = coeffs.label;
    sys.A = interior_pattern(mesh);
    sys.A_diffusion = sys.A;
    sys.B = sys.A;
    sys.B_lumped.assign(static_cast<std::size_t>(sys.A.rows()), 0.0);
    auto a_vals = sys.A.values_mut();
    auto ad_vals = sys.A_diffusion.values_mut();
    auto b_vals = sys.B.values_mut();
    const int per = mesh.vertices_per_element();

    for (std::size_t K = 0; K < mesh.num_elements(); ++K) {
        const auto geom = compute_geometry(mesh, K);
        const auto stats = element_stats(coeffs, mesh, K);
        const auto loc = element_matrices(mesh, coeffs, geom, stats, K);
        auto el = mesh.element(K);
        for (int a = 0; a < per; ++a) {
            const int i = mesh.interior_index(static_cast<std::size_t>(el[a]));
            if (i == SimplicialMesh::kBoundary) continue;
            for (int b = 0; b < per; ++b) {
                const int j = mesh.interior_index(static_cast<std::size_t>(el[b]));
                if (j == SimplicialMesh::kBoundary) continue;
                const auto p = static_cast<std::size_t>(sys.A.find(i, j));
                a_vals[p] += loc.stiffness[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                ad_vals[p] += loc.diffusion[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                b_vals[p] += loc.mass[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            }
        }
    }
    const auto off = sys.B.row_offsets();
    for (int i = 0; i < sys.B.rows(); ++i)
        for (int p = off[static_cast<std::size_t>(i)]; p < off[static_cast<std::size_t>(i) + 1]; ++p)
            sys.B_lumped[static_cast<std::size_t>(i)] += b_vals[static_cast<std::size_t>(p)];
    return sys;
}

void multiply_serial(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
    if (x.size() != static_cast<std::size_t>(A.cols()) || y.size() != static_cast<std::size_t>(A.rows()))
        throw InvalidInput("multiply_serial: dimension mismatch");
    const auto off = A.row_offsets();
    const auto col = A.col_indices();
    const auto val = A.values();
    for (int i = 0; i < A.rows(); ++i) {
        double s = 0.0;
        for (int p = off[static_cast<std::size_t>(i)]; p < off[static_cast<std::size_t>(i) + 1]; ++p)
            s += val[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(col[static_cast<std::size_t>(p)])];
        y[static_cast<std::size_t>(i)] = s;
    }
}

} // namespace eigenfem::reference
