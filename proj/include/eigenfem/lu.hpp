#pragma once

#include <span>
#include <vector>

#include "eigenfem/sparse.hpp"

namespace eigenfem {

enum class Pivoting {
    /// Partial pivoting with a preference for the diagonal (threshold 0.1).
    partial,
    /// Diagonal pivots only; for symmetric input the pivots are the D of L D L^T.
    diagonal,
};

/// Sparse factors P A Q = L U with unit lower L. Immutable after construction
/// and safe to share between threads for solves.
class LUFactors {
public:
    int size() const { return n_; }

    void solve(std::span<const double> b, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> b) const;

    /// Row permutation: original row i becomes row pinv[i] of P A.
    std::span<const int> row_permutation() const { return pinv_; }
    /// Column ordering: column k of A Q is column q[k] of A.
    std::span<const int> column_permutation() const { return q_; }
    std::span<const double> pivots() const { return pivots_; }

    SparseMatrix lower() const;
    SparseMatrix upper() const;
    std::size_t nnz() const { return Lx_.size() + Ux_.size(); }

private:
    friend LUFactors lu_factor(const SparseMatrix& A, Pivoting pivoting);

    int n_ = 0;
    std::vector<int> pinv_, q_;
    std::vector<int> Lp_, Li_, Up_, Ui_;
    std::vector<double> Lx_, Ux_, pivots_;
};

/// Left-looking sparse LU on a minimum-degree pre-ordering of A + A^T.
/// Throws SingularMatrixError when no pivot exceeds 1e-12 times the largest
/// entry of its original row.
LUFactors lu_factor(const SparseMatrix& A, Pivoting pivoting = Pivoting::partial);

/// Minimum-degree elimination order of the symmetrized pattern; ties broken
/// by lowest index.
std::vector<int> minimum_degree_ordering(const SparseMatrix& A);

} // namespace eigenfem
