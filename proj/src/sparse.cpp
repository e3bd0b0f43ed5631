#include "eigenfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "eigenfem/errors.hpp"

namespace eigenfem {

SparseMatrix::SparseMatrix(int n_rows, int n_cols, std::vector<int> row_offsets, std::vector<int> col_indices,
                           std::vector<double> values)
    : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)), values_(std::move(values)) {
    if (n_rows_ < 0 || n_cols_ < 0) throw InvalidInput("negative matrix dimension");
    if (row_offsets_.size() != static_cast<std::size_t>(n_rows_) + 1 || row_offsets_.front() != 0)
        throw InvalidInput("row offsets must have n_rows + 1 entries starting at 0");
    if (col_indices_.size() != values_.size() || static_cast<std::size_t>(row_offsets_.back()) != values_.size())
        throw InvalidInput("row offsets, column indices and values disagree");
    for (int i = 0; i < n_rows_; ++i) {
        if (row_offsets_[static_cast<std::size_t>(i + 1)] < row_offsets_[static_cast<std::size_t>(i)])
            throw InvalidInput("row offsets must be monotone");
        for (int p = row_offsets_[static_cast<std::size_t>(i)]; p < row_offsets_[static_cast<std::size_t>(i + 1)]; ++p) {
            const int c = col_indices_[static_cast<std::size_t>(p)];
            if (c < 0 || c >= n_cols_) throw InvalidInput("column index out of range");
            if (p > row_offsets_[static_cast<std::size_t>(i)] && c <= col_indices_[static_cast<std::size_t>(p - 1)])
                throw InvalidInput("column indices must be strictly increasing within a row");
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
            throw InvalidInput(fmt::format("triplet ({}, {}) out of range", t.row, t.col));
    std::stable_sort(triplets.begin(), triplets.end(),
                     [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    std::vector<int> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    int last_row = -1, last_col = -1;
    for (const auto& t : triplets) {
        if (t.row == last_row && t.col == last_col) {
            vals.back() += t.value;
            continue;
        }
        cols.push_back(t.col);
        vals.push_back(t.value);
        ++offsets[static_cast<std::size_t>(t.row) + 1];
        last_row = t.row;
        last_col = t.col;
    }
    for (int i = 0; i < n_rows; ++i) offsets[static_cast<std::size_t>(i) + 1] += offsets[static_cast<std::size_t>(i)];
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
    const int n = static_cast<int>(d.size());
    std::vector<int> offsets(static_cast<std::size_t>(n) + 1), cols(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        offsets[static_cast<std::size_t>(i) + 1] = i + 1;
        cols[static_cast<std::size_t>(i)] = i;
    }
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(d.begin(), d.end()));
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& M) {
    std::vector<Triplet> t;
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (M(i, j) != 0.0) t.push_back({i, j, M(i, j)});
    return from_triplets(static_cast<int>(M.rows()), static_cast<int>(M.cols()), std::move(t));
}

std::ptrdiff_t SparseMatrix::find(int i, int j) const {
    const auto b = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(i)];
    const auto e = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(i) + 1];
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) return -1;
    return it - col_indices_.begin();
}

double SparseMatrix::at(int i, int j) const {
    const auto p = find(i, j);
    return p < 0 ? 0.0 : values_[static_cast<std::size_t>(p)];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(n_cols_) || y.size() != static_cast<std::size_t>(n_rows_))
        throw InvalidInput("multiply: dimension mismatch");
    const int* off = row_offsets_.data();
    const int* ci = col_indices_.data();
    const double* v = values_.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_rows_; ++i) {
        double s = 0.0;
        for (int p = off[i]; p < off[i + 1]; ++p) s += v[p] * x[static_cast<std::size_t>(ci[p])];
        y[static_cast<std::size_t>(i)] = s;
    }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_rows_));
    multiply(x, y);
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<int> offsets(static_cast<std::size_t>(n_cols_) + 1, 0);
    for (int c : col_indices_) ++offsets[static_cast<std::size_t>(c) + 1];
    for (int j = 0; j < n_cols_; ++j) offsets[static_cast<std::size_t>(j) + 1] += offsets[static_cast<std::size_t>(j)];
    std::vector<int> next(offsets.begin(), offsets.end() - 1);
    std::vector<int> cols(values_.size());
    std::vector<double> vals(values_.size());
    for (int i = 0; i < n_rows_; ++i) {
        for (int p = row_offsets_[static_cast<std::size_t>(i)]; p < row_offsets_[static_cast<std::size_t>(i) + 1]; ++p) {
            const int q = next[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(p)])]++;
            cols[static_cast<std::size_t>(q)] = i;
            vals[static_cast<std::size_t>(q)] = values_[static_cast<std::size_t>(p)];
        }
    }
    return SparseMatrix(n_cols_, n_rows_, std::move(offsets), std::move(cols), std::move(vals));
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_rows_, n_cols_);
    for (int i = 0; i < n_rows_; ++i)
        for (int p = row_offsets_[static_cast<std::size_t>(i)]; p < row_offsets_[static_cast<std::size_t>(i) + 1]; ++p)
            M(i, col_indices_[static_cast<std::size_t>(p)]) += values_[static_cast<std::size_t>(p)];
    return M;
}

SparseMatrix symmetric_part(const SparseMatrix& A) {
    if (A.rows() != A.cols()) throw InvalidInput("symmetric part needs a square matrix");
    const SparseMatrix At = A.transpose();
    std::vector<Triplet> t;
    t.reserve(2 * A.nnz());
    for (const SparseMatrix* M : {&A, &At}) {
        for (int i = 0; i < M->rows(); ++i)
            for (int p = M->row_offsets()[static_cast<std::size_t>(i)]; p < M->row_offsets()[static_cast<std::size_t>(i) + 1]; ++p)
                t.push_back({i, M->col_indices()[static_cast<std::size_t>(p)], 0.5 * M->values()[static_cast<std::size_t>(p)]});
    }
    return SparseMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

std::string to_matrix_market(const SparseMatrix& A) {
    std::string out = "%%MatrixMarket matrix coordinate real general\n";
    out += fmt::format("{} {} {}\n", A.rows(), A.cols(), A.nnz());
    for (int i = 0; i < A.rows(); ++i)
        for (int p = A.row_offsets()[static_cast<std::size_t>(i)]; p < A.row_offsets()[static_cast<std::size_t>(i) + 1]; ++p)
            out += fmt::format("{} {} {:.17g}\n", i + 1, A.col_indices()[static_cast<std::size_t>(p)] + 1,
                               A.values()[static_cast<std::size_t>(p)]);
    return out;
}

SparseMatrix from_matrix_market(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw InvalidInput("MatrixMarket: missing banner");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || (field != "real" && field != "integer"))
        throw InvalidInput("MatrixMarket: only 'matrix coordinate real' is supported");
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general") throw InvalidInput("MatrixMarket: unsupported symmetry " + symmetry);
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '%') break;
    long rows = 0, cols = 0, nnz = 0;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz)) throw InvalidInput("MatrixMarket: bad size line");
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(nnz) * (symmetric ? 2 : 1));
    for (long e = 0; e < nnz; ++e) {
        long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw InvalidInput("MatrixMarket: truncated entry list");
        t.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
        if (symmetric && i != j) t.push_back({static_cast<int>(j - 1), static_cast<int>(i - 1), v});
    }
    return SparseMatrix::from_triplets(static_cast<int>(rows), static_cast<int>(cols), std::move(t));
}

} // namespace eigenfem
