#include "eigenfem/lu.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "eigenfem/errors.hpp"

namespace eigenfem {

std::vector<int> minimum_degree_ordering(const SparseMatrix& A) {
    const int n = A.rows();
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int p = A.row_offsets()[static_cast<std::size_t>(i)]; p < A.row_offsets()[static_cast<std::size_t>(i) + 1]; ++p) {
            const int j = A.col_indices()[static_cast<std::size_t>(p)];
            if (i == j) continue;
            adj[static_cast<std::size_t>(i)].push_back(j);
            adj[static_cast<std::size_t>(j)].push_back(i);
        }
    }
    std::set<std::pair<int, int>> queue;
    for (int i = 0; i < n; ++i) {
        auto& a = adj[static_cast<std::size_t>(i)];
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        queue.emplace(static_cast<int>(a.size()), i);
    }

    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<int> merged;
    while (!queue.empty()) {
        const int v = queue.begin()->second;
        queue.erase(queue.begin());
        order.push_back(v);
        auto nbrs = std::move(adj[static_cast<std::size_t>(v)]);
        for (int u : nbrs) {
            auto& au = adj[static_cast<std::size_t>(u)];
            queue.erase({static_cast<int>(au.size()), u});
            merged.clear();
            std::set_union(au.begin(), au.end(), nbrs.begin(), nbrs.end(), std::back_inserter(merged));
            merged.erase(std::remove_if(merged.begin(), merged.end(), [&](int w) { return w == u || w == v; }),
                         merged.end());
            au.swap(merged);
            queue.emplace(static_cast<int>(au.size()), u);
        }
    }
    return order;
}

LUFactors lu_factor(const SparseMatrix& A, Pivoting pivoting) {
    if (A.rows() != A.cols()) throw InvalidInput("lu_factor: matrix must be square");
    const int n = A.rows();
    LUFactors F;
    F.n_ = n;
    F.q_ = minimum_degree_ordering(A);

    // Column access through the transpose (CSR of A^T == CSC of A).
    const SparseMatrix At = A.transpose();
    std::vector<double> row_max(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int p = A.row_offsets()[static_cast<std::size_t>(i)]; p < A.row_offsets()[static_cast<std::size_t>(i) + 1]; ++p)
            row_max[static_cast<std::size_t>(i)] =
                std::max(row_max[static_cast<std::size_t>(i)], std::abs(A.values()[static_cast<std::size_t>(p)]));

    auto& pinv = F.pinv_;
    pinv.assign(static_cast<std::size_t>(n), -1);
    F.Lp_.assign(static_cast<std::size_t>(n) + 1, 0);
    F.Up_.assign(static_cast<std::size_t>(n) + 1, 0);
    F.pivots_.assign(static_cast<std::size_t>(n), 0.0);
    const std::size_t guess = 4 * A.nnz() + static_cast<std::size_t>(n);
    F.Li_.reserve(guess);
    F.Lx_.reserve(guess);
    F.Ui_.reserve(guess);
    F.Ux_.reserve(guess);

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<int> xi(static_cast<std::size_t>(n));
    std::vector<int> stack(static_cast<std::size_t>(n)), pstack(static_cast<std::size_t>(n));
    std::vector<int> mark(static_cast<std::size_t>(n), -1);

    for (int k = 0; k < n; ++k) {
        F.Lp_[static_cast<std::size_t>(k)] = static_cast<int>(F.Li_.size());
        F.Up_[static_cast<std::size_t>(k)] = static_cast<int>(F.Ui_.size());
        const int col = F.q_[static_cast<std::size_t>(k)];
        const auto cb = At.row_offsets()[static_cast<std::size_t>(col)];
        const auto ce = At.row_offsets()[static_cast<std::size_t>(col) + 1];

        // Reach of column col in the graph of L: topological order in xi[top..n).
        int top = n;
        for (int p = cb; p < ce; ++p) {
            const int start = At.col_indices()[static_cast<std::size_t>(p)];
            if (mark[static_cast<std::size_t>(start)] == k) continue;
            int head = 0;
            stack[0] = start;
            while (head >= 0) {
                const int j = stack[static_cast<std::size_t>(head)];
                const int jnew = pinv[static_cast<std::size_t>(j)];
                if (mark[static_cast<std::size_t>(j)] != k) {
                    mark[static_cast<std::size_t>(j)] = k;
                    pstack[static_cast<std::size_t>(head)] = jnew < 0 ? 0 : F.Lp_[static_cast<std::size_t>(jnew)] + 1;
                }
                bool done = true;
                const int p2 = jnew < 0 ? 0 : F.Lp_[static_cast<std::size_t>(jnew) + 1];
                for (int q = pstack[static_cast<std::size_t>(head)]; q < p2; ++q) {
                    const int i = F.Li_[static_cast<std::size_t>(q)];
                    if (mark[static_cast<std::size_t>(i)] == k) continue;
                    pstack[static_cast<std::size_t>(head)] = q + 1;
                    stack[static_cast<std::size_t>(++head)] = i;
                    done = false;
                    break;
                }
                if (done) {
                    --head;
                    xi[static_cast<std::size_t>(--top)] = j;
                }
            }
        }

        // Sparse triangular solve x = L \ A(:, col).
        for (int p = top; p < n; ++p) x[static_cast<std::size_t>(xi[static_cast<std::size_t>(p)])] = 0.0;
        for (int p = cb; p < ce; ++p)
            x[static_cast<std::size_t>(At.col_indices()[static_cast<std::size_t>(p)])] = At.values()[static_cast<std::size_t>(p)];
        for (int px = top; px < n; ++px) {
            const int j = xi[static_cast<std::size_t>(px)];
            const int J = pinv[static_cast<std::size_t>(j)];
            if (J < 0) continue;
            const double xj = x[static_cast<std::size_t>(j)];
            for (int p = F.Lp_[static_cast<std::size_t>(J)] + 1; p < F.Lp_[static_cast<std::size_t>(J) + 1]; ++p)
                x[static_cast<std::size_t>(F.Li_[static_cast<std::size_t>(p)])] -= F.Lx_[static_cast<std::size_t>(p)] * xj;
        }

        int ipiv = -1;
        double best = -1.0;
        for (int p = top; p < n; ++p) {
            const int i = xi[static_cast<std::size_t>(p)];
            if (pinv[static_cast<std::size_t>(i)] < 0) {
                const double t = std::abs(x[static_cast<std::size_t>(i)]);
                if (t > best) {
                    best = t;
                    ipiv = i;
                }
            } else {
                F.Ui_.push_back(pinv[static_cast<std::size_t>(i)]);
                F.Ux_.push_back(x[static_cast<std::size_t>(i)]);
            }
        }
        const bool diag_available = pinv[static_cast<std::size_t>(col)] < 0 && mark[static_cast<std::size_t>(col)] == k;
        if (pivoting == Pivoting::diagonal) {
            if (!diag_available)
                throw SingularMatrixError(fmt::format("structurally zero diagonal pivot at step {}", k));
            ipiv = col;
        } else if (diag_available && std::abs(x[static_cast<std::size_t>(col)]) >= 0.1 * best) {
            ipiv = col;
        }
        if (ipiv < 0) throw SingularMatrixError(fmt::format("no pivot available at step {} (column {})", k, col));
        const double pivot = x[static_cast<std::size_t>(ipiv)];
        const double rmax = row_max[static_cast<std::size_t>(ipiv)];
        if (!(std::abs(pivot) > 1e-12 * rmax) || rmax == 0.0)
            throw SingularMatrixError(fmt::format("pivot {:.3e} at step {} is below the singularity threshold", pivot, k));

        F.pivots_[static_cast<std::size_t>(k)] = pivot;
        F.Ui_.push_back(k);
        F.Ux_.push_back(pivot);
        pinv[static_cast<std::size_t>(ipiv)] = k;
        F.Li_.push_back(ipiv);
        F.Lx_.push_back(1.0);
        for (int p = top; p < n; ++p) {
            const int i = xi[static_cast<std::size_t>(p)];
            if (pinv[static_cast<std::size_t>(i)] < 0) {
                F.Li_.push_back(i);
                F.Lx_.push_back(x[static_cast<std::size_t>(i)] / pivot);
            }
            x[static_cast<std::size_t>(i)] = 0.0;
        }
    }
    F.Lp_[static_cast<std::size_t>(n)] = static_cast<int>(F.Li_.size());
    F.Up_[static_cast<std::size_t>(n)] = static_cast<int>(F.Ui_.size());
    for (auto& i : F.Li_) i = pinv[static_cast<std::size_t>(i)];
    return F;
}

void LUFactors::solve(std::span<const double> b, std::span<double> out) const {
    if (b.size() != static_cast<std::size_t>(n_) || out.size() != static_cast<std::size_t>(n_))
        throw InvalidInput("LU solve: dimension mismatch");
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(pinv_[static_cast<std::size_t>(i)])] = b[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_; ++j) {
        const double xj = x[static_cast<std::size_t>(j)];
        for (int p = Lp_[static_cast<std::size_t>(j)] + 1; p < Lp_[static_cast<std::size_t>(j) + 1]; ++p)
            x[static_cast<std::size_t>(Li_[static_cast<std::size_t>(p)])] -= Lx_[static_cast<std::size_t>(p)] * xj;
    }
    for (int j = n_ - 1; j >= 0; --j) {
        const int last = Up_[static_cast<std::size_t>(j) + 1] - 1;
        x[static_cast<std::size_t>(j)] /= Ux_[static_cast<std::size_t>(last)];
        const double xj = x[static_cast<std::size_t>(j)];
        for (int p = Up_[static_cast<std::size_t>(j)]; p < last; ++p)
            x[static_cast<std::size_t>(Ui_[static_cast<std::size_t>(p)])] -= Ux_[static_cast<std::size_t>(p)] * xj;
    }
    for (int k = 0; k < n_; ++k) out[static_cast<std::size_t>(q_[static_cast<std::size_t>(k)])] = x[static_cast<std::size_t>(k)];
}

std::vector<double> LUFactors::solve(std::span<const double> b) const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    solve(b, x);
    return x;
}

namespace {

SparseMatrix csc_to_csr(int n, const std::vector<int>& p, const std::vector<int>& idx, const std::vector<double>& val) {
    std::vector<Triplet> t;
    t.reserve(val.size());
    for (int j = 0; j < n; ++j)
        for (int q = p[static_cast<std::size_t>(j)]; q < p[static_cast<std::size_t>(j) + 1]; ++q)
            t.push_back({idx[static_cast<std::size_t>(q)], j, val[static_cast<std::size_t>(q)]});
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

} // namespace

SparseMatrix LUFactors::lower() const { return csc_to_csr(n_, Lp_, Li_, Lx_); }
SparseMatrix LUFactors::upper() const { return csc_to_csr(n_, Up_, Ui_, Ux_); }

} // namespace eigenfem
