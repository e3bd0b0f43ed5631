// Real Schur decomposition and eigenvectors of an upper Hessenberg matrix.
// Follows the EISPACK hqr2 routine as translated in JAMA.

#include "eigenfem/hessenberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "eigenfem/errors.hpp"

namespace eigenfem {

namespace {

std::complex<double> cdiv(double xr, double xi, double yr, double yi) {
    double r, d;
    if (std::abs(yr) > std::abs(yi)) {
        r = yi / yr;
        d = yr + r * yi;
        return {(xr + r * xi) / d, (xi - r * xr) / d};
    }
    r = yr / yi;
    d = yi + r * yr;
    return {(r * xr + xi) / d, (r * xi - xr) / d};
}

} // namespace

SchurResult hessenberg_eigen(const Eigen::MatrixXd& H0, bool want_vectors) {
    if (H0.rows() != H0.cols()) throw InvalidInput("hessenberg_eigen: matrix must be square");
    const int nn = static_cast<int>(H0.rows());
    if (nn > kMaxHessenbergSize)
        throw InvalidParameter(fmt::format("hessenberg_eigen: size {} exceeds {}", nn, kMaxHessenbergSize));
    for (int j = 0; j < nn; ++j)
        for (int i = j + 2; i < nn; ++i)
            if (H0(i, j) != 0.0) throw InvalidInput("hessenberg_eigen: matrix is not upper Hessenberg");

    Eigen::MatrixXd H = H0;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(nn, nn);
    std::vector<double> d(static_cast<std::size_t>(nn), 0.0), e(static_cast<std::size_t>(nn), 0.0);
    auto D = [&](int i) -> double& { return d[static_cast<std::size_t>(i)]; };
    auto E = [&](int i) -> double& { return e[static_cast<std::size_t>(i)]; };

    const double eps = std::numeric_limits<double>::epsilon();
    const int low = 0;
    const int high = nn - 1;
    int n = nn - 1;
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, t, w, x, y;

    double norm = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(H(i, j));

    int iter = 0;
    long total_iter = 0;
    const long max_iter = 30L * std::max(nn, 1);
    while (n >= low) {
        int l = n;
        while (l > low) {
            s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(H(l, l - 1)) <= eps * s) break;
            --l;
        }

        if (l == n) {
            H(n, n) += exshift;
            D(n) = H(n, n);
            E(n) = 0.0;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            w = H(n, n - 1) * H(n - 1, n);
            p = (H(n - 1, n - 1) - H(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            H(n, n) += exshift;
            H(n - 1, n - 1) += exshift;
            x = H(n, n);
            if (q >= 0) {
                z = p >= 0 ? p + z : p - z;
                D(n - 1) = x + z;
                D(n) = D(n - 1);
                if (z != 0.0) D(n) = x - w / z;
                E(n - 1) = 0.0;
                E(n) = 0.0;
                x = H(n, n - 1);
                s = std::abs(x) + std::abs(z);
                p = x / s;
                q = z / s;
                r = std::sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for (int j = n - 1; j < nn; ++j) {
                    z = H(n - 1, j);
                    H(n - 1, j) = q * z + p * H(n, j);
                    H(n, j) = q * H(n, j) - p * z;
                }
                for (int i = 0; i <= n; ++i) {
                    z = H(i, n - 1);
                    H(i, n - 1) = q * z + p * H(i, n);
                    H(i, n) = q * H(i, n) - p * z;
                }
                for (int i = low; i <= high; ++i) {
                    z = V(i, n - 1);
                    V(i, n - 1) = q * z + p * V(i, n);
                    V(i, n) = q * V(i, n) - p * z;
                }
                H(n, n - 1) = 0.0;
            } else {
                D(n - 1) = x + p;
                D(n) = x + p;
                E(n - 1) = z;
                E(n) = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            if (++total_iter > max_iter)
                throw NumericalFailure(fmt::format("Hessenberg QR did not converge in {} iterations", max_iter));
            x = H(n, n);
            y = 0.0;
            w = 0.0;
            if (l < n) {
                y = H(n - 1, n - 1);
                w = H(n, n - 1) * H(n - 1, n);
            }
            // Exceptional shifts break cycles.
            if (iter == 10) {
                exshift += x;
                for (int i = low; i <= n; ++i) H(i, i) -= x;
                s = std::abs(H(n, n - 1)) + std::abs(H(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = low; i <= n; ++i) H(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            ++iter;

            int m = n - 2;
            while (m >= l) {
                z = H(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / H(m + 1, m) + H(m, m + 1);
                q = H(m + 1, m + 1) - z - r - s;
                r = H(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    eps * (std::abs(p) * (std::abs(H(m - 1, m - 1)) + std::abs(z) + std::abs(H(m + 1, m + 1)))))
                    break;
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                H(i, i - 2) = 0.0;
                if (i > m + 2) H(i, i - 3) = 0.0;
            }

            // Double QR step on rows l..n and columns m..n.
            for (int k = m; k <= n - 1; ++k) {
                const bool notlast = k != n - 1;
                if (k != m) {
                    p = H(k, k - 1);
                    q = H(k + 1, k - 1);
                    r = notlast ? H(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s == 0) continue;
                if (k != m)
                    H(k, k - 1) = -s * x;
                else if (l != m)
                    H(k, k - 1) = -H(k, k - 1);
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j < nn; ++j) {
                    p = H(k, j) + q * H(k + 1, j);
                    if (notlast) {
                        p += r * H(k + 2, j);
                        H(k + 2, j) -= p * z;
                    }
                    H(k, j) -= p * x;
                    H(k + 1, j) -= p * y;
                }
                for (int i = 0; i <= std::min(n, k + 3); ++i) {
                    p = x * H(i, k) + y * H(i, k + 1);
                    if (notlast) {
                        p += z * H(i, k + 2);
                        H(i, k + 2) -= p * r;
                    }
                    H(i, k) -= p;
                    H(i, k + 1) -= p * q;
                }
                for (int i = low; i <= high; ++i) {
                    p = x * V(i, k) + y * V(i, k + 1);
                    if (notlast) {
                        p += z * V(i, k + 2);
                        V(i, k + 2) -= p * r;
                    }
                    V(i, k) -= p;
                    V(i, k + 1) -= p * q;
                }
            }
        }
    }

    SchurResult out;
    out.eigenvalues.reserve(static_cast<std::size_t>(nn));
    for (int i = 0; i < nn; ++i) out.eigenvalues.emplace_back(D(i), E(i));
    // Clean negligible subdiagonals outside the 2x2 blocks of complex pairs.
    for (int i = 0; i < nn; ++i) {
        if (i > 0) H(i, i - 1) = 0.0;
        if (E(i) > 0.0) ++i;  // keep the subdiagonal inside this 2x2 block
    }
    for (int j = 0; j < nn; ++j)
        for (int i = j + 2; i < nn; ++i) H(i, j) = 0.0;
    out.schur = H;
    out.q = V;
    if (!want_vectors || nn == 0 || norm == 0.0) {
        if (want_vectors) out.eigenvectors = Eigen::MatrixXcd::Identity(nn, nn);
        return out;
    }

    // Back-substitute in the quasi-triangular form for the eigenvectors of S.
    for (n = nn - 1; n >= 0; --n) {
        p = D(n);
        q = E(n);
        if (q == 0) {
            int l = n;
            H(n, n) = 1.0;
            for (int i = n - 1; i >= 0; --i) {
                w = H(i, i) - p;
                r = 0.0;
                for (int j = l; j <= n; ++j) r += H(i, j) * H(j, n);
                if (E(i) < 0.0) {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if (E(i) == 0.0) {
                        H(i, n) = w != 0.0 ? -r / w : -r / (eps * norm);
                    } else {
                        x = H(i, i + 1);
                        y = H(i + 1, i);
                        q = (D(i) - p) * (D(i) - p) + E(i) * E(i);
                        t = (x * s - z * r) / q;
                        H(i, n) = t;
                        H(i + 1, n) = std::abs(x) > std::abs(z) ? (-r - w * t) / x : (-s - y * t) / z;
                    }
                    t = std::abs(H(i, n));
                    if ((eps * t) * t > 1)
                        for (int j = i; j <= n; ++j) H(j, n) /= t;
                }
            }
        } else if (q < 0) {
            int l = n - 1;
            if (std::abs(H(n, n - 1)) > std::abs(H(n - 1, n))) {
                H(n - 1, n - 1) = q / H(n, n - 1);
                H(n - 1, n) = -(H(n, n) - p) / H(n, n - 1);
            } else {
                const auto c = cdiv(0.0, -H(n - 1, n), H(n - 1, n - 1) - p, q);
                H(n - 1, n - 1) = c.real();
                H(n - 1, n) = c.imag();
            }
            H(n, n - 1) = 0.0;
            H(n, n) = 1.0;
            for (int i = n - 2; i >= 0; --i) {
                double ra = 0.0, sa = 0.0;
                for (int j = l; j <= n; ++j) {
                    ra += H(i, j) * H(j, n - 1);
                    sa += H(i, j) * H(j, n);
                }
                w = H(i, i) - p;
                if (E(i) < 0.0) {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if (E(i) == 0) {
                        const auto c = cdiv(-ra, -sa, w, q);
                        H(i, n - 1) = c.real();
                        H(i, n) = c.imag();
                    } else {
                        x = H(i, i + 1);
                        y = H(i + 1, i);
                        double vr = (D(i) - p) * (D(i) - p) + E(i) * E(i) - q * q;
                        const double vi = (D(i) - p) * 2.0 * q;
                        if (vr == 0.0 && vi == 0.0)
                            vr = eps * norm * (std::abs(w) + std::abs(q) + std::abs(x) + std::abs(y) + std::abs(z));
                        const auto c = cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        H(i, n - 1) = c.real();
                        H(i, n) = c.imag();
                        if (std::abs(x) > std::abs(z) + std::abs(q)) {
                            H(i + 1, n - 1) = (-ra - w * H(i, n - 1) + q * H(i, n)) / x;
                            H(i + 1, n) = (-sa - w * H(i, n) - q * H(i, n - 1)) / x;
                        } else {
                            const auto c2 = cdiv(-r - y * H(i, n - 1), -s - y * H(i, n), z, q);
                            H(i + 1, n - 1) = c2.real();
                            H(i + 1, n) = c2.imag();
                        }
                    }
                    t = std::max(std::abs(H(i, n - 1)), std::abs(H(i, n)));
                    if ((eps * t) * t > 1)
                        for (int j = i; j <= n; ++j) {
                            H(j, n - 1) /= t;
                            H(j, n) /= t;
                        }
                }
            }
        }
    }

    // Back-transform: columns of V * (upper part of H).
    for (int j = nn - 1; j >= low; --j)
        for (int i = low; i <= high; ++i) {
            z = 0.0;
            for (int k = low; k <= std::min(j, high); ++k) z += V(i, k) * H(k, j);
            V(i, j) = z;
        }

    out.eigenvectors.resize(nn, nn);
    for (int j = 0; j < nn; ++j) {
        if (E(j) == 0.0) {
            out.eigenvectors.col(j) = V.col(j).cast<std::complex<double>>();
        } else if (E(j) > 0.0) {
            // Columns j, j+1 hold the real and imaginary parts for D(j) + i E(j).
            for (int i = 0; i < nn; ++i) {
                out.eigenvectors(i, j) = {V(i, j), V(i, j + 1)};
                out.eigenvectors(i, j + 1) = {V(i, j), -V(i, j + 1)};
            }
        }
    }
    for (int j = 0; j < nn; ++j) {
        const double nrm = out.eigenvectors.col(j).norm();
        if (nrm > 0) out.eigenvectors.col(j) /= nrm;
    }
    return out;
}

} // namespace eigenfem
