#include "eigenfem/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "eigenfem/coefficients.hpp"
#include "eigenfem/errors.hpp"
#include "eigenfem/hessenberg.hpp"
#include "eigenfem/lu.hpp"
#include "eigenfem/parallel.hpp"

namespace eigenfem {

namespace {

using cd = std::complex<double>;

class ShiftInvert {
public:
    ShiftInvert(const AssembledSystem& sys, MassTreatment mass) : sys_(sys), mass_(mass), lu_(lu_factor(sys.A)) {}

    void apply_mass(std::span<const double> x, std::span<double> y) const {
        if (mass_ == MassTreatment::consistent) {
            sys_.B.multiply(x, y);
            return;
        }
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = sys_.B_lumped[i] * x[i];
    }

    /// y = A^{-1} M x
    void apply(std::span<const double> x, std::span<double> y) const {
        std::vector<double> t(x.size());
        apply_mass(x, t);
        lu_.solve(t, y);
    }

    double mass_max() const {
        if (mass_ == MassTreatment::consistent) return sys_.B.max_abs();
        return sys_.B_lumped.empty() ? 0.0 : *std::max_element(sys_.B_lumped.begin(), sys_.B_lumped.end());
    }

private:
    const AssembledSystem& sys_;
    MassTreatment mass_;
    LUFactors lu_;
};

std::span<const double> col_span(const Eigen::MatrixXd& V, Eigen::Index j) {
    return {V.col(j).data(), static_cast<std::size_t>(V.rows())};
}

/// Orthogonalizes w against the first k columns of V twice (classical Gram-Schmidt).
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& V, Eigen::Index k, Eigen::VectorXd& w) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(k);
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = V.leftCols(k).transpose() * w;
        w.noalias() -= V.leftCols(k) * c;
        h += c;
    }
    return h;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = dist(rng);
    return r;
}

struct ArnoldiBasis {
    Eigen::MatrixXd V;  ///< n x m
    Eigen::MatrixXd H;  ///< m x m upper Hessenberg
};

ArnoldiBasis arnoldi(const ShiftInvert& op, const Eigen::VectorXd& start, int m, std::mt19937_64& rng) {
    const Eigen::Index n = start.size();
    ArnoldiBasis b;
    b.V.resize(n, m);
    b.H = Eigen::MatrixXd::Zero(m, m);
    b.V.col(0) = start / start.norm();
    Eigen::VectorXd w(n);
    for (int j = 0; j < m; ++j) {
        op.apply(col_span(b.V, j), {w.data(), static_cast<std::size_t>(n)});
        const double w0 = w.norm();
        const Eigen::VectorXd h = orthogonalize(b.V, j + 1, w);
        b.H.col(j).head(j + 1) = h;
        if (j + 1 == m) break;
        const double beta = w.norm();
        if (beta > 1e-12 * w0) {
            b.H(j + 1, j) = beta;
            b.V.col(j + 1) = w / beta;
            continue;
        }
        // Invariant subspace found: continue from a fresh direction.
        Eigen::VectorXd r = random_vector(n, rng);
        orthogonalize(b.V, j + 1, r);
        b.V.col(j + 1) = r / r.norm();
    }
    return b;
}

struct RitzPair {
    cd lambda;
    Eigen::VectorXcd x;
};

std::vector<RitzPair> ritz_pairs(const ArnoldiBasis& basis) {
    const auto schur = hessenberg_eigen(basis.H, true);
    double mu_max = 0.0;
    for (const auto& mu : schur.eigenvalues) mu_max = std::max(mu_max, std::abs(mu));
    std::vector<RitzPair> out;
    for (std::size_t i = 0; i < schur.eigenvalues.size(); ++i) {
        const cd mu = schur.eigenvalues[i];
        if (!(std::abs(mu) > 1e-14 * mu_max)) continue;
        Eigen::VectorXcd x = basis.V.cast<cd>() * schur.eigenvectors.col(static_cast<Eigen::Index>(i));
        x /= x.norm();
        out.push_back({1.0 / mu, std::move(x)});
    }
    std::stable_sort(out.begin(), out.end(), [](const RitzPair& a, const RitzPair& b) {
        const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
        if (ma != mb) return ma < mb;
        return a.lambda.imag() > b.lambda.imag();
    });
    return out;
}

double true_residual(const AssembledSystem& sys, const ShiftInvert& op, const RitzPair& p) {
    const auto n = static_cast<std::size_t>(sys.size());
    std::vector<double> xr(n), xi(n), ar(n), ai(n), mr(n), mi(n);
    for (std::size_t i = 0; i < n; ++i) {
        xr[i] = p.x(static_cast<Eigen::Index>(i)).real();
        xi[i] = p.x(static_cast<Eigen::Index>(i)).imag();
    }
    sys.A.multiply(xr, ar);
    sys.A.multiply(xi, ai);
    op.apply_mass(xr, mr);
    op.apply_mass(xi, mi);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cd r = cd(ar[i], ai[i]) - p.lambda * cd(mr[i], mi[i]);
        r2 += std::norm(r);
    }
    return std::sqrt(r2) / p.x.norm();
}

std::vector<double> normalized_principal(const Eigen::VectorXcd& x) {
    Eigen::Index at = 0;
    x.cwiseAbs().maxCoeff(&at);
    const cd phase = std::conj(x(at)) / std::abs(x(at));
    std::vector<double> v(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) v[static_cast<std::size_t>(i)] = (x(i) * phase).real();
    const double top = v[static_cast<std::size_t>(at)];
    for (auto& e : v) e /= top;
    return v;
}

} // namespace

EigenSolution solve_smallest(const AssembledSystem& system, const SolveOptions& options) {
    const int n = system.size();
    if (n == 0) throw InvalidInput("solve_smallest: the system has no interior unknowns");
    if (options.k < 1) throw InvalidParameter("solve_smallest: k must be at least 1");
    if (!(options.tol > 0.0)) throw InvalidParameter("solve_smallest: tolerance must be positive");

    const int k = std::min(options.k, n);
    const int cap = std::min(n, kMaxKrylov);
    int m = options.max_krylov > 0 ? options.max_krylov : std::max(60, 4 * k);
    m = std::clamp(m, std::min(k + 1, cap), cap);

    const ShiftInvert op(system, options.mass);
    const double a_max = system.A.max_abs();
    const double m_max = op.mass_max();
    std::mt19937_64 rng(options.seed);

    Eigen::VectorXd start = Eigen::VectorXd::Ones(n) + 0.1 * random_vector(n, rng);

    EigenSolution sol;
    sol.k_requested = options.k;
    sol.mass = options.mass;
    sol.tol = options.tol;
    for (int attempt = 0;; ++attempt) {
        const auto basis = arnoldi(op, start, m, rng);
        const auto ritz = ritz_pairs(basis);
        int take = std::min<int>(k, static_cast<int>(ritz.size()));
        if (take > 0 && take < static_cast<int>(ritz.size()) && ritz[static_cast<std::size_t>(take - 1)].lambda.imag() > 0.0)
            ++take;

        sol.eigenvalues.clear();
        sol.residuals.clear();
        sol.converged.clear();
        sol.eigenvectors.resize(n, take);
        sol.k_converged = 0;
        for (int i = 0; i < take; ++i) {
            const auto& p = ritz[static_cast<std::size_t>(i)];
            const double res = true_residual(system, op, p);
            const bool ok = res <= options.tol * (a_max + std::abs(p.lambda) * m_max);
            sol.eigenvalues.push_back(p.lambda);
            sol.residuals.push_back(res);
            sol.converged.push_back(ok);
            sol.eigenvectors.col(i) = p.x;
            sol.k_converged += ok ? 1 : 0;
        }
        sol.krylov_dim = m;
        sol.restarts = attempt;
        sol.complete = take >= k && sol.k_converged == take;
        if (sol.complete || attempt >= options.max_restarts) break;

        // Explicit restart from the wanted Ritz vectors in a larger space.
        Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < take; ++i) next += sol.eigenvectors.col(i).real() + sol.eigenvectors.col(i).imag();
        if (next.norm() > 1e-8) start = next;
        m = std::min(2 * m, cap);
    }

    if (!sol.eigenvalues.empty()) {
        const cd l1 = sol.eigenvalues.front();
        if (std::abs(l1.imag()) <= 1e-8 * std::abs(l1)) sol.principal_vector = normalized_principal(sol.eigenvectors.col(0));
    }
    return sol;
}

PropertyReport property_suite(const EigenSolution& sol, const AssembledSystem& system, const SimplicialMesh& mesh,
                              const ProblemCoefficients& coeffs, const MatrixCertificate& certificate,
                              std::uint64_t seed, int trials) {
    PropertyReport r;
    r.certificate_irreducible_m = certificate.irreducible_m_matrix();
    if (sol.eigenvalues.empty()) {
        r.notes.push_back("no eigenvalues computed");
        return r;
    }
    const cd l1 = sol.eigenvalues.front();
    const double mod1 = std::abs(l1);
    r.principal_real = std::abs(l1.imag()) <= 1e-8 * mod1;

    if (sol.eigenvalues.size() >= 2) {
        r.gap_defined = true;
        r.gap = std::abs(sol.eigenvalues[1]) - mod1;
        r.principal_simple = r.principal_real && r.gap > 1e-8 * mod1;
    } else {
        r.notes.push_back("fewer than two eigenvalues: simplicity gap undefined");
    }
    if (!sol.complete) r.notes.push_back("not every requested eigenpair converged");

    r.re_positive_all = true;
    r.modulus_bound_all = true;
    r.re_at_least_lambda1 = true;
    for (const auto& l : sol.eigenvalues) {
        r.re_positive_all = r.re_positive_all && l.real() > 0.0;
        r.modulus_bound_all = r.modulus_bound_all && std::abs(l) >= mod1 * (1.0 - 1e-12);
        r.re_at_least_lambda1 = r.re_at_least_lambda1 && l.real() >= l1.real() - 1e-8 * std::abs(l1.real());
    }

    if (sol.principal_vector) {
        const auto& u = *sol.principal_vector;
        const double lo = *std::min_element(u.begin(), u.end());
        r.undershoot_defined = true;
        r.undershoot = std::min(0.0, lo);
        r.sign_preserving = lo > -1e-10;
        r.rayleigh_value = rayleigh(system, coeffs, mesh, u, sol.mass);
        r.rayleigh_identity_ok = std::abs(r.rayleigh_value - l1.real()) <= 1e-6 * std::abs(l1.real());
    } else {
        r.notes.push_back("principal eigenvalue is not real: no principal vector");
    }

    if (coeffs.convection_free) {
        r.variational_checked = true;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> v(static_cast<std::size_t>(system.size()));
        double lo = std::numeric_limits<double>::infinity();
        for (int t = 0; t < trials; ++t) {
            for (auto& e : v) e = dist(rng);
            lo = std::min(lo, rayleigh(system, coeffs, mesh, v, sol.mass));
        }
        r.variational_min = lo;
        r.variational_min_ok = lo >= l1.real() - 1e-8;
    }
    return r;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("log_log_slope: need two or more matching points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

ConvergenceRow study_row(const SimplicialMesh& mesh, const ProblemCoefficients& coeffs, double reference,
                         const SolveOptions& options) {
    ConvergenceRow row;
    row.num_interior = static_cast<int>(mesh.num_interior());
    const auto sys = assemble(mesh, coeffs);
    row.certificate_ok = m_matrix_certificate(sys.A).irreducible_m_matrix();
    const auto sol = solve_smallest(sys, options);
    row.complete = sol.complete;
    row.lambda1 = sol.eigenvalues.front();
    row.error = std::abs(row.lambda1 - reference);
    if (sol.principal_vector) {
        row.undershoot_defined = true;
        row.undershoot = std::min(0.0, *std::min_element(sol.principal_vector->begin(), sol.principal_vector->end()));
    }
    return row;
}

void finish_study(ConvergenceStudy& st) {
    std::vector<double> xs, es;
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
        auto& r = st.rows[i];
        r.local_order = std::numeric_limits<double>::quiet_NaN();
        if (i > 0)
            r.local_order = -std::log(r.error / st.rows[i - 1].error) / std::log(r.size_param / st.rows[i - 1].size_param);
        xs.push_back(r.size_param);
        es.push_back(r.error);
    }
    st.observed_order = -log_log_slope(xs, es);
}

/// Runs f(i) for each entry concurrently; the kernels inside stay serial.
template <typename F>
void run_entries(std::size_t n, F&& f) {
#ifdef _OPENMP
    const int saved = omp_get_max_active_levels();
    omp_set_max_active_levels(1);
#endif
    try {
        parallel_for(n, f);
    } catch (...) {
#ifdef _OPENMP
        omp_set_max_active_levels(saved);
#endif
        throw;
    }
#ifdef _OPENMP
    omp_set_max_active_levels(saved);
#endif
}

} // namespace

ConvergenceStudy convergence_study(const ProblemCoefficients& coeffs, StructuredKind kind, const std::vector<int>& J_list,
                                   double reference, const SolveOptions& options) {
    if (J_list.size() < 3) throw InvalidParameter("convergence study needs at least three J values");
    for (std::size_t i = 1; i < J_list.size(); ++i)
        if (J_list[i] <= J_list[i - 1]) throw InvalidParameter("J values must be strictly increasing");

    ConvergenceStudy st;
    st.problem = coeffs.label;
    st.mesh = to_string(kind);
    st.reference = reference;
    st.mass = options.mass;
    st.rows.resize(J_list.size());
    run_entries(J_list.size(), [&](std::size_t i) {
        const auto mesh = generate_structured(kind, J_list[i]);
        st.rows[i] = study_row(mesh, coeffs, reference, options);
        st.rows[i].J = J_list[i];
        st.rows[i].size_param = J_list[i];
    });
    finish_study(st);
    return st;
}

ConvergenceStudy convergence_study(const ProblemCoefficients& coeffs, const std::vector<SimplicialMesh>& meshes,
                                   double reference, const SolveOptions& options) {
    if (meshes.size() < 3) throw InvalidParameter("convergence study needs at least three meshes");
    ConvergenceStudy st;
    st.problem = coeffs.label;
    st.mesh = "import";
    st.reference = reference;
    st.mass = options.mass;
    st.rows.resize(meshes.size());
    run_entries(meshes.size(), [&](std::size_t i) {
        st.rows[i] = study_row(meshes[i], coeffs, reference, options);
        st.rows[i].size_param = std::sqrt(static_cast<double>(meshes[i].num_elements()));
    });
    for (std::size_t i = 1; i < st.rows.size(); ++i)
        if (st.rows[i].size_param <= st.rows[i - 1].size_param)
            throw InvalidParameter("meshes must be ordered from coarse to fine");
    finish_study(st);
    return st;
}

namespace {

std::string g17(double x) { return fmt::format("{:.17g}", x); }

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

} // namespace

nlohmann::json to_json(const PropertyReport& r) {
    nlohmann::json j;
    j["principal_real"] = r.principal_real;
    j["principal_simple"] = r.principal_simple;
    j["gap"] = r.gap_defined ? nlohmann::json(r.gap) : nlohmann::json();
    j["sign_preserving"] = r.sign_preserving;
    j["undershoot"] = r.undershoot_defined ? nlohmann::json(r.undershoot) : nlohmann::json();
    j["rayleigh_value"] = r.undershoot_defined ? nlohmann::json(r.rayleigh_value) : nlohmann::json();
    j["rayleigh_identity_ok"] = r.rayleigh_identity_ok;
    j["re_positive_all"] = r.re_positive_all;
    j["modulus_bound_all"] = r.modulus_bound_all;
    j["re_at_least_lambda1_observed"] = r.re_at_least_lambda1;
    if (r.variational_checked) {
        j["variational_min_ok"] = r.variational_min_ok;
        j["variational_min"] = r.variational_min;
    } else {
        j["variational_min_ok"] = nullptr;
    }
    j["certificate_irreducible_m_matrix"] = r.certificate_irreducible_m;
    j["notes"] = r.notes;
    return j;
}

std::string eigenvalues_csv(const EigenSolution& sol) {
    std::string s = "index,re,im,modulus,residual,converged\n";
    for (std::size_t i = 0; i < sol.eigenvalues.size(); ++i) {
        const auto& l = sol.eigenvalues[i];
        s += fmt::format("{},{},{},{},{},{}\n", i + 1, g17(l.real()), g17(l.imag()), g17(std::abs(l)),
                         g17(sol.residuals[i]), sol.converged[i] ? 1 : 0);
    }
    return s;
}

std::string convergence_csv(const ConvergenceStudy& st) {
    std::string s = "J,size,n_interior,lambda1_re,lambda1_im,error,local_order,undershoot,certificate\n";
    for (const auto& r : st.rows)
        s += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.J, g17(r.size_param), r.num_interior, g17(r.lambda1.real()),
                         g17(r.lambda1.imag()), g17(r.error), std::isfinite(r.local_order) ? g17(r.local_order) : "",
                         r.undershoot_defined ? g17(r.undershoot) : "", r.certificate_ok ? 1 : 0);
    return s;
}

nlohmann::json to_json(const ConvergenceStudy& st) {
    nlohmann::json j;
    j["problem"] = st.problem;
    j["mesh"] = st.mesh;
    j["reference"] = st.reference;
    j["mass"] = to_string(st.mass);
    j["observed_order"] = st.observed_order;
    for (const auto& r : st.rows)
        j["rows"].push_back({{"J", r.J},
                             {"size", r.size_param},
                             {"n_interior", r.num_interior},
                             {"lambda1", {r.lambda1.real(), r.lambda1.imag()}},
                             {"error", r.error},
                             {"local_order", finite_or_null(r.local_order)},
                             {"undershoot", r.undershoot_defined ? nlohmann::json(r.undershoot) : nlohmann::json()},
                             {"certificate_irreducible_m_matrix", r.certificate_ok},
                             {"complete", r.complete}});
    return j;
}

} // namespace eigenfem
