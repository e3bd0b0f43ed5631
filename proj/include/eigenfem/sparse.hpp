#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace eigenfem {

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Row-compressed real sparse matrix. Column indices are strictly increasing
/// within each row; explicit zeros are allowed (they come from cancellation
/// during assembly and carry pattern information).
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Throws InvalidInput if the arrays violate the CSR invariants.
    SparseMatrix(int n_rows, int n_cols, std::vector<int> row_offsets, std::vector<int> col_indices,
                 std::vector<double> values);

    /// Duplicates are summed.
    static SparseMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets);
    static SparseMatrix identity(int n);
    static SparseMatrix diagonal(std::span<const double> d);
    static SparseMatrix from_dense(const Eigen::MatrixXd& M);

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::span<const int> row_offsets() const { return row_offsets_; }
    std::span<const int> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values_mut() { return values_; }

    /// Stored value at (i, j) or 0.
    double at(int i, int j) const;
    /// Position of (i, j) in values(), or -1.
    std::ptrdiff_t find(int i, int j) const;

    /// y = A x, rows distributed over OpenMP threads.
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    SparseMatrix transpose() const;
    double max_abs() const;
    Eigen::MatrixXd to_dense() const;

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

/// (A + A^T) / 2 on the union pattern.
SparseMatrix symmetric_part(const SparseMatrix& A);

/// MatrixMarket coordinate real general, 1-based, full precision.
std::string to_matrix_market(const SparseMatrix& A);
SparseMatrix from_matrix_market(std::string_view text);

} // namespace eigenfem
