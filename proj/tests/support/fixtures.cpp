#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

#include "eigenfem/mesh_io.hpp"

namespace eigenfem::testing {

namespace {

TriangleText write_triangle(const std::vector<std::pair<double, double>>& pts, const std::vector<int>& boundary,
                            const std::vector<std::array<int, 3>>& tris) {
    TriangleText t;
    t.node = fmt::format("{} 2 0 1\n", pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        t.node += fmt::format("{} {:.17g} {:.17g} {}\n", i + 1, pts[i].first, pts[i].second, boundary[i]);
    t.ele = fmt::format("{} 3 0\n", tris.size());
    for (std::size_t k = 0; k < tris.size(); ++k)
        t.ele += fmt::format("{} {} {} {}\n", k + 1, tris[k][0] + 1, tris[k][1] + 1, tris[k][2] + 1);
    return t;
}

} // namespace

TriangleText hex_lattice_text(int n) {
    const double s = 0.45 / n;
    std::map<std::pair<int, int>, int> id;
    std::vector<std::pair<double, double>> pts;
    std::vector<int> boundary;
    for (int r = -n; r <= n; ++r)
        for (int q = -n; q <= n; ++q) {
            const int ring = std::max({std::abs(q), std::abs(r), std::abs(q + r)});
            if (ring > n) continue;
            id[{q, r}] = static_cast<int>(pts.size());
            pts.emplace_back(0.5 + s * (q + 0.5 * r), 0.5 + s * r * std::sqrt(3.0) / 2.0);
            boundary.push_back(ring == n ? 1 : 0);
        }
    std::vector<std::array<int, 3>> tris;
    auto has = [&](int q, int r) { return id.count({q, r}) > 0; };
    for (int r = -n; r <= n; ++r)
        for (int q = -n; q <= n; ++q) {
            if (has(q, r) && has(q + 1, r) && has(q, r + 1)) tris.push_back({id[{q, r}], id[{q + 1, r}], id[{q, r + 1}]});
            if (has(q + 1, r) && has(q + 1, r + 1) && has(q, r + 1))
                tris.push_back({id[{q + 1, r}], id[{q + 1, r + 1}], id[{q, r + 1}]});
        }
    return write_triangle(pts, boundary, tris);
}

SimplicialMesh hex_lattice_mesh(int layers) {
    const auto t = hex_lattice_text(layers);
    return import_mesh(t.node, t.ele, fmt::format("hex_{}", layers));
}

TriangleText staggered_square_text(int J) {
    const int n = J - 1;
    const double h = 1.0 / n;
    std::vector<std::pair<double, double>> pts;
    std::vector<int> boundary;
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(J));
    for (int j = 0; j <= n; ++j) {
        const double y = j == n ? 1.0 : j * h;
        std::vector<double> xs;
        if (j % 2 == 0) {
            for (int i = 0; i < n; ++i) xs.push_back(i * h);
        } else {
            xs.push_back(0.0);
            for (int i = 0; i < n; ++i) xs.push_back((i + 0.5) * h);
        }
        xs.push_back(1.0);
        for (double x : xs) {
            rows[static_cast<std::size_t>(j)].push_back(static_cast<int>(pts.size()));
            pts.emplace_back(x, y);
            const bool on_side = x == 0.0 || x == 1.0 || j == 0 || j == n;
            boundary.push_back(on_side ? 1 : 0);
        }
    }
    // Zip consecutive rows together, always advancing the row whose next point lies further left.
    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < n; ++j) {
        const auto& a = rows[static_cast<std::size_t>(j)];
        const auto& b = rows[static_cast<std::size_t>(j) + 1];
        std::size_t i = 0, k = 0;
        while (i + 1 < a.size() || k + 1 < b.size()) {
            const double xa = i + 1 < a.size() ? pts[static_cast<std::size_t>(a[i + 1])].first : 2.0;
            const double xb = k + 1 < b.size() ? pts[static_cast<std::size_t>(b[k + 1])].first : 2.0;
            if (xb < xa) {
                tris.push_back({a[i], b[k], b[k + 1]});
                ++k;
            } else {
                tris.push_back({a[i], a[i + 1], b[k]});
                ++i;
            }
        }
    }
    return write_triangle(pts, boundary, tris);
}

SimplicialMesh staggered_square_mesh(int J) {
    const auto t = staggered_square_text(J);
    return import_mesh(t.node, t.ele, fmt::format("staggered_J{}", J));
}

SimplicialMesh disjoint_squares(int J) {
    const auto m = generate_structured(StructuredKind::Mesh45, J);
    std::vector<double> coords;
    std::vector<int> elements;
    std::vector<bool> boundary;
    const int nv = static_cast<int>(m.num_vertices());
    for (int copy = 0; copy < 2; ++copy) {
        for (int i = 0; i < nv; ++i) {
            const auto x = m.vertex(static_cast<std::size_t>(i));
            coords.push_back(x[0] + 2.0 * copy);
            coords.push_back(x[1]);
            boundary.push_back(m.is_boundary(static_cast<std::size_t>(i)));
        }
        for (int v : m.element_data()) elements.push_back(v + copy * nv);
    }
    return SimplicialMesh(2, coords, elements, boundary, "two_squares");
}

std::vector<std::complex<double>> dense_spectrum(const SparseMatrix& A, const Eigen::MatrixXd& B) {
    const Eigen::MatrixXd M = B.partialPivLu().solve(A.to_dense());
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        return a.imag() > b.imag();
    });
    return out;
}

Eigen::MatrixXd random_hessenberg(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= std::min(j + 1, n - 1); ++i) H(i, j) = dist(rng);
    return H;
}

double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0.0;
    for (const auto& x : a) {
        auto best = std::min_element(b.begin(), b.end(),
                                     [&](const auto& p, const auto& q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*best - x) / std::max(1.0, std::abs(x)));
        b.erase(best);
    }
    return worst;
}

} // namespace eigenfem::testing
