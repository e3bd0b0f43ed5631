#include "eigenfem/mesh_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "eigenfem/errors.hpp"

namespace eigenfem {

namespace {

// Non-empty lines with '#' comments stripped.
std::vector<std::string> data_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(pos, end - pos));
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(std::move(line));
        pos = end + 1;
    }
    return lines;
}

template <typename T>
std::vector<T> parse_fields(const std::string& line, const char* what) {
    std::istringstream in(line);
    std::vector<T> out;
    T v;
    while (in >> v) out.push_back(v);
    if (!in.eof()) throw IngestionError(fmt::format("malformed {} line: '{}'", what, line));
    return out;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IngestionError(fmt::format("cannot open '{}'", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

SimplicialMesh import_mesh(std::string_view node_text, std::string_view ele_text, std::string label) {
    const auto node_lines = data_lines(node_text);
    if (node_lines.empty()) throw IngestionError(".node: missing header");
    const auto header = parse_fields<long>(node_lines[0], ".node header");
    if (header.size() < 4) throw IngestionError(".node header needs: <#vertices> <dim> <#attributes> <#markers>");
    const long nv = header[0];
    const int dim = static_cast<int>(header[1]);
    if (dim != 2 && dim != 3) throw IngestionError(fmt::format(".node: unsupported dimension {}", dim));
    if (header[2] != 0) throw IngestionError(".node: vertex attributes are not supported");
    if (header[3] != 1) throw IngestionError(".node: boundary markers are required");
    if (nv <= 0 || static_cast<std::size_t>(nv) + 1 != node_lines.size())
        throw IngestionError(fmt::format(".node: header declares {} vertices, found {}", nv, node_lines.size() - 1));

    std::vector<double> coords(static_cast<std::size_t>(nv * dim));
    std::vector<bool> boundary(static_cast<std::size_t>(nv));
    long base = 0;
    for (long i = 0; i < nv; ++i) {
        const auto f = parse_fields<double>(node_lines[static_cast<std::size_t>(i + 1)], ".node");
        if (f.size() != static_cast<std::size_t>(dim + 2))
            throw IngestionError(fmt::format(".node: vertex line {} needs index, {} coordinates and a boundary marker", i + 1, dim));
        const long idx = static_cast<long>(f[0]);
        if (i == 0) {
            base = idx;
            if (base != 0 && base != 1) throw IngestionError(".node: numbering must start at 0 or 1");
        }
        if (idx != base + i) throw IngestionError(fmt::format(".node: vertices must be numbered consecutively (line {})", i + 1));
        for (int r = 0; r < dim; ++r) coords[static_cast<std::size_t>(i * dim + r)] = f[static_cast<std::size_t>(1 + r)];
        boundary[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(dim + 1)] != 0.0;
    }

    const auto ele_lines = data_lines(ele_text);
    if (ele_lines.empty()) throw IngestionError(".ele: missing header");
    const auto eh = parse_fields<long>(ele_lines[0], ".ele header");
    if (eh.size() < 2) throw IngestionError(".ele header needs: <#elements> <nodes per element> [<#attributes>]");
    const long ne = eh[0];
    if (eh[1] != dim + 1) throw IngestionError(fmt::format(".ele: expected {} nodes per element", dim + 1));
    if (eh.size() > 2 && eh[2] != 0) throw IngestionError(".ele: element attributes are not supported");
    if (ne <= 0 || static_cast<std::size_t>(ne) + 1 != ele_lines.size())
        throw IngestionError(fmt::format(".ele: header declares {} elements, found {}", ne, ele_lines.size() - 1));

    std::vector<int> elements;
    elements.reserve(static_cast<std::size_t>(ne * (dim + 1)));
    for (long k = 0; k < ne; ++k) {
        const auto f = parse_fields<long>(ele_lines[static_cast<std::size_t>(k + 1)], ".ele");
        if (f.size() != static_cast<std::size_t>(dim + 2))
            throw IngestionError(fmt::format(".ele: element line {} has {} fields", k + 1, f.size()));
        for (int a = 1; a <= dim + 1; ++a) elements.push_back(static_cast<int>(f[static_cast<std::size_t>(a)] - base));
    }

    SimplicialMesh mesh(dim, std::move(coords), std::move(elements), std::move(boundary), std::move(label));
    if (auto dups = find_duplicate_vertices(mesh, 1e-12); !dups.empty())
        throw IngestionError(fmt::format("duplicate vertices {} and {}", dups[0].first + base, dups[0].second + base));
    return mesh;
}

SimplicialMesh read_mesh_files(const std::filesystem::path& node_path, const std::filesystem::path& ele_path) {
    return import_mesh(read_file(node_path), read_file(ele_path), node_path.stem().string());
}

std::string export_node(const SimplicialMesh& mesh) {
    const int dim = mesh.dim();
    std::string out = fmt::format("{} {} 0 1\n", mesh.num_vertices(), dim);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        out += fmt::format("{}", i + 1);
        for (int r = 0; r < dim; ++r) out += fmt::format(" {:.17g}", mesh.coords()[i * dim + r]);
        out += fmt::format(" {}\n", mesh.is_boundary(i) ? 1 : 0);
    }
    return out;
}

std::string export_ele(const SimplicialMesh& mesh) {
    std::string out = fmt::format("{} {} 0\n", mesh.num_elements(), mesh.vertices_per_element());
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        out += fmt::format("{}", k + 1);
        for (int v : mesh.element(k)) out += fmt::format(" {}", v + 1);
        out += '\n';
    }
    return out;
}

nlohmann::json mesh_to_json(const SimplicialMesh& mesh) {
    nlohmann::json vertices = nlohmann::json::array();
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        auto x = mesh.vertex(i);
        vertices.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    }
    nlohmann::json elements = nlohmann::json::array();
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        auto el = mesh.element(k);
        elements.push_back(std::vector<int>(el.begin(), el.end()));
    }
    return {{"dim", mesh.dim()},
            {"vertices", std::move(vertices)},
            {"elements", std::move(elements)},
            {"boundary", std::vector<bool>(mesh.boundary_flags())}};
}

std::string to_vtk(const SimplicialMesh& mesh, std::span<const double> point_values,
                   std::string_view field_name, std::string_view title) {
    if (point_values.size() != mesh.num_vertices())
        throw InvalidInput("VTK point data must have one value per vertex");
    std::string out = "# vtk DataFile Version 3.0\n";
    std::string t(title.substr(0, 255));
    for (auto& ch : t)
        if (ch == '\n') ch = ' ';
    out += t + "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out += fmt::format("POINTS {} double\n", mesh.num_vertices());
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        auto x = mesh.vertex(i);
        out += fmt::format("{:.17g} {:.17g} {:.17g}\n", x[0], x[1], mesh.dim() == 3 ? x[2] : 0.0);
    }
    const int per = mesh.vertices_per_element();
    out += fmt::format("CELLS {} {}\n", mesh.num_elements(), mesh.num_elements() * static_cast<std::size_t>(per + 1));
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) {
        out += fmt::format("{}", per);
        for (int v : mesh.element(k)) out += fmt::format(" {}", v);
        out += '\n';
    }
    out += fmt::format("CELL_TYPES {}\n", mesh.num_elements());
    const int cell_type = mesh.dim() == 2 ? 5 : 10;
    for (std::size_t k = 0; k < mesh.num_elements(); ++k) out += fmt::format("{}\n", cell_type);
    out += fmt::format("POINT_DATA {}\nSCALARS {} double 1\nLOOKUP_TABLE default\n", mesh.num_vertices(), field_name);
    for (double v : point_values) out += fmt::format("{:.17g}\n", v);
    return out;
}

std::vector<double> expand_to_vertices(const SimplicialMesh& mesh, std::span<const double> interior_values) {
    if (interior_values.size() != mesh.num_interior())
        throw InvalidInput("interior vector length does not match the number of interior vertices");
    std::vector<double> out(mesh.num_vertices(), 0.0);
    auto interior = mesh.interior_vertices();
    for (std::size_t j = 0; j < interior.size(); ++j) out[static_cast<std::size_t>(interior[j])] = interior_values[j];
    return out;
}

} // namespace eigenfem
