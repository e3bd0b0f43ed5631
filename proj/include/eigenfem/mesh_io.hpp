#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "eigenfem/mesh.hpp"

namespace eigenfem {

/// Parses Triangle-style .node/.ele text (no attributes). The .node file must
/// carry one boundary marker per vertex (nonzero = boundary); boundary
/// inference is refused. Index base (0 or 1) follows the first .node entry.
/// Throws IngestionError on malformed input, duplicate vertices (within
/// 1e-12), repeated element indices or zero-volume elements.
SimplicialMesh import_mesh(std::string_view node_text, std::string_view ele_text, std::string label = {});

SimplicialMesh read_mesh_files(const std::filesystem::path& node_path, const std::filesystem::path& ele_path);

/// 1-based Triangle text with full-precision coordinates.
std::string export_node(const SimplicialMesh& mesh);
std::string export_ele(const SimplicialMesh& mesh);

/// {dim, vertices, elements, boundary}
nlohmann::json mesh_to_json(const SimplicialMesh& mesh);

/// Legacy ASCII VTK unstructured grid with one POINT_DATA scalar field given
/// on all vertices.
std::string to_vtk(const SimplicialMesh& mesh, std::span<const double> point_values,
                   std::string_view field_name, std::string_view title);

/// Expands an interior-ordinal vector to all vertices (zero on the boundary).
std::vector<double> expand_to_vertices(const SimplicialMesh& mesh, std::span<const double> interior_values);

} // namespace eigenfem
