#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "eigenfem/errors.hpp"
#include "eigenfem/mesh_io.hpp"
#include "support/fixtures.hpp"

using namespace eigenfem;

TEST_SUITE("mesh_io") {

TEST_CASE("single boundary triangle") {
    auto m = import_mesh("3 2 0 1\n1 0 0 1\n2 1 0 1\n3 0 1 1\n", "1 3 0\n1 1 2 3\n");
    CHECK(m.num_elements() == 1);
    CHECK(m.num_interior() == 0);
}

TEST_CASE("zero-based numbering, comments and clockwise elements") {
    auto m = import_mesh("# square\n4 2 0 1\n0 0 0 1\n1 1 0 1\n2 1 1 1\n3 0 1 1\n",
                         "2 3 0\n0 0 2 1  # clockwise\n1 0 3 2\n");
    CHECK(m.num_elements() == 2);
    for (std::size_t K = 0; K < 2; ++K) CHECK(m.signed_volume(K) == doctest::Approx(0.5));
}

TEST_CASE("round trip preserves coordinates and connectivity") {
    for (auto kind : {StructuredKind::Mesh45, StructuredKind::Mesh135})
        for (int J : {3, 7, 12}) {
            auto m = generate_structured(kind, J);
            auto r = import_mesh(export_node(m), export_ele(m));
            REQUIRE(r.num_vertices() == m.num_vertices());
            CHECK(std::equal(r.coords().begin(), r.coords().end(), m.coords().begin()));
            CHECK(std::equal(r.element_data().begin(), r.element_data().end(), m.element_data().begin()));
            CHECK(r.boundary_flags() == m.boundary_flags());
        }
    auto s = testing::staggered_square_mesh(9);
    auto rs = import_mesh(export_node(s), export_ele(s));
    CHECK(std::equal(rs.coords().begin(), rs.coords().end(), s.coords().begin()));
}

TEST_CASE("malformed input is rejected") {
    const std::string node = "3 2 0 1\n1 0 0 1\n2 1 0 1\n3 0 1 1\n";
    CHECK_THROWS_AS(import_mesh(node, "1 3 0\n1 1 1 3\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh(node, "1 3 0\n1 1 2 4\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh(node, "2 3 0\n1 1 2 3\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh(node, "1 4 0\n1 1 2 3 3\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh(node, "1 3 0\n1 1 2 x\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh("3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n", "1 3 0\n1 1 2 3\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh("3 2 0 1\n1 0 0 1\n3 1 0 1\n2 0 1 1\n", "1 3 0\n1 1 2 3\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh("3 2 0 1\n1 0 0 1\n2 0 0 1\n3 0 1 1\n", "1 3 0\n1 1 2 3\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh("3 2 0 1\n1 0 0 1\n2 1 1 1\n3 2 2 1\n", "1 3 0\n1 1 2 3\n"), IngestionError);
    CHECK_THROWS_AS(import_mesh("", ""), IngestionError);
}

TEST_CASE("boundary markers drive the interior set") {
    auto m = import_mesh("5 2 0 1\n1 0 0 1\n2 1 0 1\n3 1 1 1\n4 0 1 1\n5 0.5 0.5 0\n",
                         "4 3 0\n1 1 2 5\n2 2 3 5\n3 3 4 5\n4 4 1 5\n");
    CHECK(m.num_interior() == 1);
    CHECK(m.interior_vertices()[0] == 4);
}

TEST_CASE("files on disk") {
    const auto dir = std::filesystem::temp_directory_path() / "eigenfem_mesh_io_test";
    std::filesystem::create_directories(dir);
    auto m = generate_structured(StructuredKind::Mesh45, 4);
    std::ofstream(dir / "m.node") << export_node(m);
    std::ofstream(dir / "m.ele") << export_ele(m);
    auto r = read_mesh_files(dir / "m.node", dir / "m.ele");
    CHECK(r.num_interior() == 4);
    CHECK_FALSE(r.label().empty());
    CHECK_THROWS_AS(read_mesh_files(dir / "missing.node", dir / "m.ele"), IngestionError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("vtk and json output") {
    auto m = generate_structured(StructuredKind::Mesh45, 3);
    auto full = expand_to_vertices(m, std::vector<double>{1.0});
    CHECK(full.size() == 9);
    CHECK(full[4] == 1.0);
    CHECK(full[0] == 0.0);
    CHECK_THROWS_AS(expand_to_vertices(m, std::vector<double>{1.0, 2.0}), InvalidInput);

    auto vtk = to_vtk(m, full, "u", "test");
    CHECK(vtk.rfind("# vtk DataFile Version", 0) == 0);
    CHECK(vtk.find("POINTS 9") != std::string::npos);
    CHECK(vtk.find("CELLS 8 32") != std::string::npos);
    CHECK(vtk.find("POINT_DATA 9") != std::string::npos);
    CHECK(vtk.find("SCALARS u double") != std::string::npos);

    auto j = mesh_to_json(m);
    CHECK(j["dim"] == 2);
    CHECK(j["elements"].size() == 8);
    CHECK(j["vertices"].size() == 9);
}

}
