#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "eigenfem/assembly.hpp"
#include "eigenfem/matrix_analysis.hpp"
#include "eigenfem/mesh.hpp"

namespace eigenfem {

inline constexpr int kMaxKrylov = 200;

struct SolveOptions {
    int k = 1;
    MassTreatment mass = MassTreatment::consistent;
    double tol = 1e-10;
    int max_krylov = 0;   ///< 0 selects max(60, 4k)
    int max_restarts = 5;
    std::uint64_t seed = 12345;
};

struct EigenSolution {
    /// Sorted by modulus; conjugate pairs adjacent, positive imaginary part first.
    std::vector<std::complex<double>> eigenvalues;
    std::vector<double> residuals;   ///< ||A v - lambda M v|| / ||v||
    std::vector<bool> converged;
    Eigen::MatrixXcd eigenvectors;   ///< unit columns, matching eigenvalues
    /// Real principal eigenvector with max-magnitude entry +1, when lambda_1 is real.
    std::optional<std::vector<double>> principal_vector;
    int k_requested = 0;
    int k_converged = 0;
    bool complete = false;  ///< every requested pair converged
    int krylov_dim = 0;
    int restarts = 0;
    MassTreatment mass = MassTreatment::consistent;
    double tol = 1e-10;
};

/// Shift-invert Arnoldi on v -> A^{-1} M v with full reorthogonalization.
/// Ritz values mu give lambda = 1/mu. Non-convergence after the restarts
/// returns a partial result with complete = false. Throws SingularMatrixError
/// when A cannot be factored.
EigenSolution solve_smallest(const AssembledSystem& system, const SolveOptions& options = {});

struct PropertyReport {
    bool principal_real = false;
    bool gap_defined = false;
    double gap = 0.0;  ///< |lambda_2| - |lambda_1|
    bool principal_simple = false;
    bool sign_preserving = false;
    bool undershoot_defined = false;
    double undershoot = 0.0;  ///< min(0, min entry of the normalized principal vector)
    double rayleigh_value = 0.0;
    bool rayleigh_identity_ok = false;
    bool re_positive_all = false;
    bool modulus_bound_all = false;
    bool re_at_least_lambda1 = false;  ///< observed only
    bool variational_checked = false;  ///< b = 0 only
    bool variational_min_ok = false;
    double variational_min = 0.0;      ///< smallest F(v) over the random trials
    bool certificate_irreducible_m = false;
    std::vector<std::string> notes;

    /// Principal eigenpair is real, simple and one-signed.
    bool perron_properties() const { return principal_real && principal_simple && sign_preserving; }
};

/// Checks the discrete principal-eigenpair properties on a computed solution.
PropertyReport property_suite(const EigenSolution& solution, const AssembledSystem& system, const SimplicialMesh& mesh,
                              const ProblemCoefficients& coeffs, const MatrixCertificate& certificate,
                              std::uint64_t seed = 2024, int trials = 200);

struct ConvergenceRow {
    int J = 0;                 ///< 0 for imported meshes
    double size_param = 0.0;   ///< J, or sqrt(N) for imported meshes
    int num_interior = 0;
    std::complex<double> lambda1;
    double error = 0.0;
    double local_order = 0.0;  ///< NaN on the first row
    bool undershoot_defined = false;
    double undershoot = 0.0;
    bool certificate_ok = false;
    bool complete = false;
};

struct ConvergenceStudy {
    std::string problem;
    std::string mesh;
    double reference = 0.0;
    MassTreatment mass = MassTreatment::consistent;
    std::vector<ConvergenceRow> rows;
    double observed_order = 0.0;  ///< minus the least-squares slope of log error vs log size
};

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Solves on each J (concurrently) and tabulates |lambda_1 - reference|.
/// Requires at least three increasing J values.
ConvergenceStudy convergence_study(const ProblemCoefficients& coeffs, StructuredKind kind, const std::vector<int>& J_list,
                                   double reference, const SolveOptions& options = {});

/// Same on a sequence of meshes ordered from coarse to fine; size is sqrt(N).
ConvergenceStudy convergence_study(const ProblemCoefficients& coeffs, const std::vector<SimplicialMesh>& meshes,
                                   double reference, const SolveOptions& options = {});

nlohmann::json to_json(const PropertyReport& report);
std::string eigenvalues_csv(const EigenSolution& solution);
std::string convergence_csv(const ConvergenceStudy& study);
nlohmann::json to_json(const ConvergenceStudy& study);

} // namespace eigenfem
