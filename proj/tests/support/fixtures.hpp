#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigenfem/mesh.hpp"
#include "eigenfem/sparse.hpp"

namespace eigenfem::testing {

struct TriangleText {
    std::string node;
    std::string ele;
};

/// Hexagonal patch of the equilateral triangular lattice centred at (0.5, 0.5)
/// with circumradius 0.45 and the given number of layers. All angles are pi/3.
TriangleText hex_lattice_text(int layers);
SimplicialMesh hex_lattice_mesh(int layers);

/// Unit square with J rows of points; odd rows are shifted by half a cell and
/// closed by points on x = 0 and x = 1. Away from the left and right sides
/// every triangle is isosceles with base h and height h.
TriangleText staggered_square_text(int J);
SimplicialMesh staggered_square_mesh(int J);

/// Two unit squares side by side, meshed independently (Mesh45, J points).
SimplicialMesh disjoint_squares(int J);

/// Full generalized spectrum of A x = lambda B x from a dense eigensolver,
/// sorted by modulus.
std::vector<std::complex<double>> dense_spectrum(const SparseMatrix& A, const Eigen::MatrixXd& B);

/// Random upper Hessenberg matrix with entries in [-1, 1].
Eigen::MatrixXd random_hessenberg(int n, unsigned seed);

/// Relative distance between eigenvalue multisets (greedy matching).
double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b);

} // namespace eigenfem::testing
