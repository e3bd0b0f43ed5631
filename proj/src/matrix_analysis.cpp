#include "eigenfem/matrix_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "eigenfem/errors.hpp"
#include "eigenfem/lu.hpp"

namespace eigenfem {

namespace {

constexpr double kZeroTol = 1e-14;

void require_square(const SparseMatrix& A, const char* what) {
    if (A.rows() != A.cols()) throw InvalidInput(fmt::format("{}: matrix must be square", what));
}

} // namespace

ZMatrixCheck z_matrix_check(const SparseMatrix& A) {
    require_square(A, "z_matrix_check");
    const double tol = kZeroTol * A.max_abs();
    ZMatrixCheck out;
    const auto off = A.row_offsets();
    const auto col = A.col_indices();
    const auto val = A.values();
    for (int i = 0; i < A.rows(); ++i)
        for (int p = off[static_cast<std::size_t>(i)]; p < off[static_cast<std::size_t>(i) + 1]; ++p) {
            const int j = col[static_cast<std::size_t>(p)];
            const double a = val[static_cast<std::size_t>(p)];
            if ((i != j && a > tol) || (i == j && a < -tol)) out.violations.push_back({i, j, a});
        }
    out.pass = out.violations.empty();
    return out;
}

std::vector<int> strongly_connected_components(const SparseMatrix& A, double threshold, int& count) {
    const int n = A.rows();
    const auto off = A.row_offsets();
    const auto col = A.col_indices();
    const auto val = A.values();
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
        comp(static_cast<std::size_t>(n), -1);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    // Explicit call stack of (vertex, next edge position).
    std::vector<std::pair<int, int>> calls;
    int next_index = 0;
    count = 0;

    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] >= 0) continue;
        calls.emplace_back(root, off[static_cast<std::size_t>(root)]);
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = 1;
        while (!calls.empty()) {
            auto& [v, p] = calls.back();
            const auto vs = static_cast<std::size_t>(v);
            bool descended = false;
            while (p < off[vs + 1]) {
                const int w = col[static_cast<std::size_t>(p)];
                const double a = val[static_cast<std::size_t>(p)];
                ++p;
                if (w == v || !(std::abs(a) > threshold)) continue;
                const auto ws = static_cast<std::size_t>(w);
                if (index[ws] < 0) {
                    index[ws] = low[ws] = next_index++;
                    stack.push_back(w);
                    on_stack[ws] = 1;
                    calls.emplace_back(w, off[ws]);
                    descended = true;
                    break;
                }
                if (on_stack[ws]) low[vs] = std::min(low[vs], index[ws]);
            }
            if (descended) continue;
            if (low[vs] == index[vs]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = 0;
                    comp[static_cast<std::size_t>(w)] = count;
                } while (w != v);
                ++count;
            }
            const int finished = v;
            calls.pop_back();
            if (!calls.empty()) {
                const auto parent = static_cast<std::size_t>(calls.back().first);
                low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
            }
        }
    }
    return comp;
}

IrreducibilityResult irreducibility(const SparseMatrix& A) {
    require_square(A, "irreducibility");
    IrreducibilityResult out;
    strongly_connected_components(A, kZeroTol * A.max_abs(), out.components);
    out.irreducible = A.rows() <= 1 || out.components == 1;
    return out;
}

MatrixCertificate m_matrix_certificate(const SparseMatrix& A) {
    require_square(A, "m_matrix_certificate");
    MatrixCertificate cert;
    cert.method = "z-matrix + positive definite symmetric part (sparse LDL^T pivots)";
    const auto z = z_matrix_check(A);
    cert.is_z_matrix = z.pass;
    cert.z_violations = static_cast<int>(z.violations.size());
    if (!z.pass) cert.first_violation = z.violations.front();

    const auto irr = irreducibility(A);
    cert.is_irreducible = irr.irreducible;
    cert.components = irr.components;

    if (A.rows() == 0) {
        cert.spd_symmetric_part = true;
        cert.detail = "empty system";
    } else {
        try {
            const auto F = lu_factor(symmetric_part(A), Pivoting::diagonal);
            const auto piv = F.pivots();
            cert.min_pivot = *std::min_element(piv.begin(), piv.end());
            cert.spd_symmetric_part = cert.min_pivot > 0.0;
            if (!cert.spd_symmetric_part) cert.detail = "indefinite or singular: nonpositive pivot";
        } catch (const SingularMatrixError& e) {
            cert.spd_symmetric_part = false;
            cert.detail = std::string("indefinite or singular: ") + e.what();
        }
    }
    cert.is_m_matrix = cert.is_z_matrix && cert.spd_symmetric_part;
    return cert;
}

PerronResult perron_oracle(const SparseMatrix& A, const SparseMatrix& B, int n_limit) {
    require_square(A, "perron_oracle");
    const int n = A.rows();
    if (n > n_limit) throw InvalidParameter(fmt::format("perron_oracle: size {} exceeds the limit {}", n, n_limit));
    if (B.rows() != n || B.cols() != n) throw InvalidInput("perron_oracle: A and B sizes differ");
    PerronResult out;
    if (n == 0) return out;

    const Eigen::MatrixXd Ad = A.to_dense();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Ad);
    const double scale = Ad.cwiseAbs().maxCoeff();
    const double det_scale = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(det_scale > 1e-12 * scale)) throw SingularMatrixError("perron_oracle: A is singular");
    const Eigen::MatrixXd Ainv = lu.inverse();
    const double inv_scale = Ainv.cwiseAbs().maxCoeff();
    out.min_inverse_entry = Ainv.minCoeff();
    out.inverse_positive = out.min_inverse_entry > kZeroTol * inv_scale;

    const Eigen::MatrixXd T = Ainv * B.to_dense();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    double mu = 0.0;
    for (out.iterations = 1; out.iterations <= 5000; ++out.iterations) {
        Eigen::VectorXd y = T * x;
        const double ymax = y.cwiseAbs().maxCoeff();
        if (!(ymax > 0.0)) break;
        Eigen::Index at = 0;
        y.cwiseAbs().maxCoeff(&at);
        const double next = y(at) / x(at);
        y /= y(at);
        const double change = (y - x).cwiseAbs().maxCoeff();
        x = y;
        mu = next;
        if (change < 1e-13) {
            out.converged = true;
            break;
        }
    }
    out.perron_value = mu;
    out.perron_vector.assign(x.data(), x.data() + n);
    const double vmax = x.cwiseAbs().maxCoeff();
    out.perron_vector_positive = (x.array() > 1e-12 * vmax).all();
    return out;
}

nlohmann::json to_json(const MatrixCertificate& cert) {
    nlohmann::json j;
    j["is_z_matrix"] = cert.is_z_matrix;
    j["z_violations"] = cert.z_violations;
    if (!cert.is_z_matrix)
        j["first_violation"] = {{"row", cert.first_violation.row},
                                {"col", cert.first_violation.col},
                                {"value", cert.first_violation.value}};
    j["is_irreducible"] = cert.is_irreducible;
    j["strongly_connected_components"] = cert.components;
    j["spd_symmetric_part"] = cert.spd_symmetric_part;
    j["min_pivot"] = cert.min_pivot;
    j["is_m_matrix"] = cert.is_m_matrix;
    j["irreducible_m_matrix"] = cert.irreducible_m_matrix();
    j["method"] = cert.method;
    if (!cert.detail.empty()) j["detail"] = cert.detail;
    return j;
}

} // namespace eigenfem
