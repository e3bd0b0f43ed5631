#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eigenfem/sparse.hpp"

namespace eigenfem {

struct ZViolation {
    int row = 0, col = 0;
    double value = 0.0;
};

struct ZMatrixCheck {
    bool pass = true;
    std::vector<ZViolation> violations;  ///< in row-major order
};

/// Off-diagonals <= 1e-14 scale and diagonals >= -1e-14 scale, scale = max |a_jk|.
ZMatrixCheck z_matrix_check(const SparseMatrix& A);

struct IrreducibilityResult {
    bool irreducible = true;
    int components = 0;  ///< strongly connected components of the pattern graph
};

/// Strong connectivity of the graph with an edge j -> k for each |a_jk| > 1e-14 scale.
/// A 1x1 matrix counts as irreducible.
IrreducibilityResult irreducibility(const SparseMatrix& A);

/// Strongly connected components (Tarjan), each listed once; component ids in
/// the order they are completed.
std::vector<int> strongly_connected_components(const SparseMatrix& A, double threshold, int& count);

struct MatrixCertificate {
    bool is_z_matrix = false;
    ZViolation first_violation;  ///< meaningful when !is_z_matrix
    int z_violations = 0;
    bool is_irreducible = false;
    int components = 0;
    bool spd_symmetric_part = false;
    double min_pivot = 0.0;  ///< smallest L D L^T pivot of (A + A^T)/2
    bool is_m_matrix = false;
    std::string method;
    std::string detail;

    bool irreducible_m_matrix() const { return is_m_matrix && is_irreducible; }
};

/// Z-matrix test plus positive definiteness of (A + A^T)/2 by sparse
/// factorization with diagonal pivots; irreducibility is reported alongside.
MatrixCertificate m_matrix_certificate(const SparseMatrix& A);

struct PerronResult {
    bool inverse_positive = false;   ///< A^{-1} > 1e-14 scale elementwise
    double min_inverse_entry = 0.0;
    double perron_value = 0.0;       ///< dominant eigenvalue of A^{-1} B
    bool perron_vector_positive = false;
    std::vector<double> perron_vector;  ///< max entry +1
    int iterations = 0;
    bool converged = false;
};

/// Dense brute-force oracle: inverts A, checks positivity, and runs power
/// iteration on A^{-1} B. Throws InvalidParameter above n_limit and
/// SingularMatrixError for singular A.
PerronResult perron_oracle(const SparseMatrix& A, const SparseMatrix& B, int n_limit = 400);

nlohmann::json to_json(const MatrixCertificate& cert);

} // namespace eigenfem
