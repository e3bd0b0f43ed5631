#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "eigenfem/types.hpp"

namespace eigenfem {

/// Conforming simplicial mesh in 2D or 3D.
///
/// Elements are stored with positive signed volume; the constructor swaps the
/// last two vertices of any negatively oriented element. Interior vertices get
/// dense ordinals 0..N_v-1 in increasing vertex-id order; these ordinals index
/// the rows and columns of the assembled interior system.
class SimplicialMesh {
public:
    static constexpr int kBoundary = -1;

    SimplicialMesh() = default;

    /// Throws IngestionError on out-of-range or repeated vertex indices and on
    /// degenerate (zero-volume) elements.
    SimplicialMesh(int dim, std::vector<double> coords, std::vector<int> elements,
                   std::vector<bool> boundary, std::string label = {});

    int dim() const { return dim_; }
    std::size_t num_vertices() const { return boundary_.size(); }
    std::size_t num_elements() const { return elements_.size() / static_cast<std::size_t>(dim_ + 1); }
    std::size_t num_interior() const { return interior_vertices_.size(); }
    int vertices_per_element() const { return dim_ + 1; }

    Vec vertex(std::size_t i) const;
    std::span<const double> coords() const { return coords_; }

    std::span<const int> element(std::size_t k) const {
        const auto n = static_cast<std::size_t>(dim_ + 1);
        return {elements_.data() + k * n, n};
    }
    std::span<const int> element_data() const { return elements_; }

    bool is_boundary(std::size_t i) const { return boundary_[i]; }
    const std::vector<bool>& boundary_flags() const { return boundary_; }

    /// Interior ordinal of vertex i, or kBoundary.
    int interior_index(std::size_t i) const { return interior_index_[i]; }
    /// Vertex id of each interior ordinal.
    std::span<const int> interior_vertices() const { return interior_vertices_; }

    const std::string& label() const { return label_; }

    /// Signed volume of element k as stored (positive after construction).
    double signed_volume(std::size_t k) const;

    /// Element ids incident to each vertex, ascending.
    std::vector<std::vector<int>> vertex_elements() const;

private:
    int dim_ = 2;
    std::vector<double> coords_;
    std::vector<int> elements_;
    std::vector<bool> boundary_;
    std::vector<int> interior_index_;
    std::vector<int> interior_vertices_;
    std::string label_;
};

/// A mesh edge and the elements that contain it.
struct EdgePatch {
    int v0 = 0;  ///< smaller vertex id
    int v1 = 0;  ///< larger vertex id
    std::vector<int> elements;  ///< ascending
};

/// All edges of the mesh sorted by (v0, v1).
std::vector<EdgePatch> edge_patches(const SimplicialMesh& mesh);

enum class StructuredKind { Mesh45, Mesh135 };

StructuredKind parse_structured_kind(const std::string& name);
std::string to_string(StructuredKind kind);

/// Unit square with J points per axis; each cell is split along the northeast
/// (Mesh45) or northwest (Mesh135) diagonal. Vertex (i, j) has id i + j*J.
SimplicialMesh generate_structured(StructuredKind kind, int J);

struct ConnectivityResult {
    bool connected = true;
    bool vacuous = false;  ///< no interior vertices at all
    std::vector<std::vector<int>> components;  ///< vertex ids, each sorted
};

/// Connected components of the graph of interior vertices joined by edges
/// whose endpoints are both interior.
ConnectivityResult interior_connectivity(const SimplicialMesh& mesh);

/// Pairs of distinct vertices closer than tol (Euclidean); empty if none.
std::vector<std::pair<int, int>> find_duplicate_vertices(const SimplicialMesh& mesh, double tol);

} // namespace eigenfem
