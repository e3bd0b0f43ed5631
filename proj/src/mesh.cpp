#include "eigenfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

#include <Eigen/LU>
#include <fmt/format.h>

#include "eigenfem/errors.hpp"

namespace eigenfem {

namespace {

double element_det(int dim, std::span<const double> coords, std::span<const int> verts,
                   double* max_edge = nullptr) {
    Mat E(dim, dim);
    const double* x0 = coords.data() + static_cast<std::size_t>(verts[0]) * dim;
    for (int c = 0; c < dim; ++c) {
        const double* xc = coords.data() + static_cast<std::size_t>(verts[c + 1]) * dim;
        for (int r = 0; r < dim; ++r) E(r, c) = xc[r] - x0[r];
    }
    if (max_edge) {
        double h = 0.0;
        for (std::size_t a = 0; a < verts.size(); ++a) {
            for (std::size_t b = a + 1; b < verts.size(); ++b) {
                double s = 0.0;
                for (int r = 0; r < dim; ++r) {
                    const double d = coords[static_cast<std::size_t>(verts[a]) * dim + r] -
                                     coords[static_cast<std::size_t>(verts[b]) * dim + r];
                    s += d * d;
                }
                h = std::max(h, std::sqrt(s));
            }
        }
        *max_edge = h;
    }
    return E.determinant();
}

} // namespace

SimplicialMesh::SimplicialMesh(int dim, std::vector<double> coords, std::vector<int> elements,
                               std::vector<bool> boundary, std::string label)
    : dim_(dim), coords_(std::move(coords)), elements_(std::move(elements)),
      boundary_(std::move(boundary)), label_(std::move(label)) {
    if (dim_ != 2 && dim_ != 3) throw IngestionError(fmt::format("unsupported mesh dimension {}", dim_));
    const auto nv = boundary_.size();
    if (coords_.size() != nv * static_cast<std::size_t>(dim_))
        throw IngestionError("coordinate array does not match vertex count");
    const auto per = static_cast<std::size_t>(dim_ + 1);
    if (elements_.size() % per != 0) throw IngestionError("element array is not a multiple of d+1");

    for (std::size_t k = 0; k < num_elements(); ++k) {
        auto verts = std::span<int>(elements_.data() + k * per, per);
        for (std::size_t a = 0; a < per; ++a) {
            if (verts[a] < 0 || static_cast<std::size_t>(verts[a]) >= nv)
                throw IngestionError(fmt::format("element {} references vertex {} out of range", k, verts[a]));
            for (std::size_t b = 0; b < a; ++b)
                if (verts[a] == verts[b])
                    throw IngestionError(fmt::format("element {} repeats vertex {}", k, verts[a]));
        }
        double h = 0.0;
        const double det = element_det(dim_, coords_, verts, &h);
        if (!(std::abs(det) > 1e-14 * std::pow(h, dim_)))
            throw IngestionError(fmt::format("element {} has zero volume", k));
        if (det < 0.0) std::swap(verts[per - 2], verts[per - 1]);
    }

    interior_index_.assign(nv, kBoundary);
    for (std::size_t i = 0; i < nv; ++i) {
        if (!boundary_[i]) {
            interior_index_[i] = static_cast<int>(interior_vertices_.size());
            interior_vertices_.push_back(static_cast<int>(i));
        }
    }
}

Vec SimplicialMesh::vertex(std::size_t i) const {
    Vec x(dim_);
    for (int r = 0; r < dim_; ++r) x[r] = coords_[i * static_cast<std::size_t>(dim_) + r];
    return x;
}

double SimplicialMesh::signed_volume(std::size_t k) const {
    double fact = dim_ == 2 ? 2.0 : 6.0;
    return element_det(dim_, coords_, element(k)) / fact;
}

std::vector<std::vector<int>> SimplicialMesh::vertex_elements() const {
    std::vector<std::vector<int>> out(num_vertices());
    for (std::size_t k = 0; k < num_elements(); ++k)
        for (int v : element(k)) out[static_cast<std::size_t>(v)].push_back(static_cast<int>(k));
    return out;
}

std::vector<EdgePatch> edge_patches(const SimplicialMesh& mesh) {
    std::vector<std::tuple<int, int, int>> entries;
    const int per = mesh.vertices_per_element();
    entries.reserve(mesh.num_elements() * static_cast<std::size_t>(per * (per - 1) / 2));
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        auto el = mesh.element(k);
        for (int a = 0; a < per; ++a)
            for (int b = a + 1; b < per; ++b)
                entries.emplace_back(std::min(el[a], el[b]), std::max(el[a], el[b]), static_cast<int>(k));
    }
    std::sort(entries.begin(), entries.end());

    std::vector<EdgePatch> edges;
    for (const auto& [a, b, k] : entries) {
        if (edges.empty() || edges.back().v0 != a || edges.back().v1 != b) edges.push_back({a, b, {}});
        edges.back().elements.push_back(k);
    }
    return edges;
}

StructuredKind parse_structured_kind(const std::string& name) {
    if (name == "mesh45" || name == "Mesh45") return StructuredKind::Mesh45;
    if (name == "mesh135" || name == "Mesh135") return StructuredKind::Mesh135;
    throw InvalidParameter(fmt::format("unknown structured mesh kind '{}'", name));
}

std::string to_string(StructuredKind kind) {
    return kind == StructuredKind::Mesh45 ? "mesh45" : "mesh135";
}

SimplicialMesh generate_structured(StructuredKind kind, int J) {
    if (J < 2) throw InvalidParameter(fmt::format("J must be at least 2, got {}", J));
    const auto n = static_cast<std::size_t>(J);
    const double h = 1.0 / static_cast<double>(J - 1);
    std::vector<double> coords(2 * n * n);
    std::vector<bool> boundary(n * n);
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < J; ++i) {
            const auto v = static_cast<std::size_t>(i + j * J);
            // Exact endpoints so the last row/column sits on x = 1 / y = 1.
            coords[2 * v] = i == J - 1 ? 1.0 : i * h;
            coords[2 * v + 1] = j == J - 1 ? 1.0 : j * h;
            boundary[v] = i == 0 || j == 0 || i == J - 1 || j == J - 1;
        }
    }
    std::vector<int> elements;
    elements.reserve(6 * (n - 1) * (n - 1));
    for (int j = 0; j + 1 < J; ++j) {
        for (int i = 0; i + 1 < J; ++i) {
            const int v00 = i + j * J, v10 = v00 + 1, v01 = v00 + J, v11 = v01 + 1;
            if (kind == StructuredKind::Mesh45) {
                elements.insert(elements.end(), {v00, v10, v11, v00, v11, v01});
            } else {
                elements.insert(elements.end(), {v00, v10, v01, v10, v11, v01});
            }
        }
    }
    return SimplicialMesh(2, std::move(coords), std::move(elements), std::move(boundary),
                          fmt::format("{}_J{}", to_string(kind), J));
}

ConnectivityResult interior_connectivity(const SimplicialMesh& mesh) {
    ConnectivityResult result;
    const auto nint = mesh.num_interior();
    if (nint == 0) {
        result.vacuous = true;
        return result;
    }
    std::vector<std::vector<int>> adj(nint);
    for (const auto& e : edge_patches(mesh)) {
        const int a = mesh.interior_index(static_cast<std::size_t>(e.v0));
        const int b = mesh.interior_index(static_cast<std::size_t>(e.v1));
        if (a == SimplicialMesh::kBoundary || b == SimplicialMesh::kBoundary) continue;
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<int> comp(nint, -1);
    auto interior = mesh.interior_vertices();
    for (std::size_t s = 0; s < nint; ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(result.components.size());
        std::vector<int> members;
        std::queue<int> q;
        q.push(static_cast<int>(s));
        comp[s] = id;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            members.push_back(interior[static_cast<std::size_t>(u)]);
            for (int w : adj[static_cast<std::size_t>(u)]) {
                if (comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = id;
                    q.push(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        result.components.push_back(std::move(members));
    }
    result.connected = result.components.size() == 1;
    return result;
}

std::vector<std::pair<int, int>> find_duplicate_vertices(const SimplicialMesh& mesh, double tol) {
    const auto nv = mesh.num_vertices();
    const int dim = mesh.dim();
    auto coords = mesh.coords();
    std::vector<int> order(nv);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return coords[static_cast<std::size_t>(a) * dim] < coords[static_cast<std::size_t>(b) * dim];
    });
    std::vector<std::pair<int, int>> dups;
    for (std::size_t p = 0; p < nv; ++p) {
        const auto a = static_cast<std::size_t>(order[p]);
        for (std::size_t q = p + 1; q < nv; ++q) {
            const auto b = static_cast<std::size_t>(order[q]);
            if (coords[b * dim] - coords[a * dim] > tol) break;
            double s = 0.0;
            for (int r = 0; r < dim; ++r) {
                const double d = coords[a * dim + r] - coords[b * dim + r];
                s += d * d;
            }
            if (std::sqrt(s) <= tol) dups.emplace_back(std::min(order[p], order[q]), std::max(order[p], order[q]));
        }
    }
    std::sort(dups.begin(), dups.end());
    return dups;
}

} // namespace eigenfem
