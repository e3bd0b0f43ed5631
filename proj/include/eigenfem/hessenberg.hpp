#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace eigenfem {

inline constexpr int kMaxHessenbergSize = 200;

struct SchurResult {
    /// In Schur order; conjugate pairs are adjacent with positive imaginary part first.
    std::vector<std::complex<double>> eigenvalues;
    Eigen::MatrixXd schur;  ///< real quasi-triangular S
    Eigen::MatrixXd q;      ///< orthogonal Q with H = Q S Q^T
    /// Column i is an eigenvector of H for eigenvalues[i] (empty unless requested).
    Eigen::MatrixXcd eigenvectors;
};

/// Francis double-shift QR for an upper Hessenberg matrix (m <= 200).
/// Throws InvalidInput if H is not square or not Hessenberg, InvalidParameter
/// if it is too large, and NumericalFailure after 30 m iterations without
/// convergence.
SchurResult hessenberg_eigen(const Eigen::MatrixXd& H, bool want_vectors = true);

} // namespace eigenfem
