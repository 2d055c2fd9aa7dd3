#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace twabc {

/// Banded matrix in LAPACK-style band storage. Rows kl..kl+ku of the storage
/// hold the matrix diagonals; the extra kl rows on top leave room for fill-in
/// during pivoted factorization.
template <class T>
struct Banded {
    int n = 0;
    int kl = 0;
    int ku = 0;
    std::vector<T> a;  // ldab x n, column-major, ldab = 2*kl + ku + 1

    Banded() = default;
    Banded(int n_, int kl_, int ku_) : n(n_), kl(kl_), ku(ku_)
    {
        a.assign(static_cast<std::size_t>(ldab()) * n, T{});
    }

    int ldab() const { return 2 * kl + ku + 1; }
    bool in_band(int i, int j) const { return i - j <= kl && j - i <= ku; }

    T& at(int i, int j)
    {
        return a[static_cast<std::size_t>(j) * ldab() + (kl + ku + i - j)];
    }
    const T& at(int i, int j) const
    {
        return a[static_cast<std::size_t>(j) * ldab() + (kl + ku + i - j)];
    }

    void add(int i, int j, const T& v) { at(i, j) += v; }

    /// y = A x
    std::vector<T> matvec(const std::vector<T>& x) const
    {
        std::vector<T> y(static_cast<std::size_t>(n), T{});
        for (int j = 0; j < n; ++j) {
            const int ilo = std::max(0, j - ku);
            const int ihi = std::min(n - 1, j + kl);
            const T xj = x[static_cast<std::size_t>(j)];
            for (int i = ilo; i <= ihi; ++i) {
                y[static_cast<std::size_t>(i)] += at(i, j) * xj;
            }
        }
        return y;
    }
};

struct SingularMatrixError : std::runtime_error {
    int column;
    explicit SingularMatrixError(int col)
        : std::runtime_error("banded LU: zero pivot at column " + std::to_string(col)), column(col)
    {
    }
};

/// LU factorization of a banded matrix with partial pivoting (unblocked
/// LAPACK gbtrf scheme). The factor owns its storage so the original matrix
/// stays usable for residual computation.
template <class T>
class BandedLU {
public:
    explicit BandedLU(const Banded<T>& A) : m_(A), ipiv_(static_cast<std::size_t>(A.n))
    {
        factor();
    }

    /// Solve A x = b.
    std::vector<T> solve(const std::vector<T>& b) const
    {
        std::vector<T> x = b;
        const int n = m_.n;
        const int kl = m_.kl;
        const int ku = m_.ku;
        // forward: apply pivots and L
        for (int j = 0; j < n - 1; ++j) {
            const int p = ipiv_[static_cast<std::size_t>(j)];
            if (p != j) std::swap(x[static_cast<std::size_t>(j)], x[static_cast<std::size_t>(p)]);
            const int ihi = std::min(n - 1, j + kl);
            const T xj = x[static_cast<std::size_t>(j)];
            for (int i = j + 1; i <= ihi; ++i) {
                x[static_cast<std::size_t>(i)] -= m_.at(i, j) * xj;
            }
        }
        // back substitution with U (bandwidth kl+ku after fill-in)
        const int kv = kl + ku;
        for (int j = n - 1; j >= 0; --j) {
            x[static_cast<std::size_t>(j)] /= m_.at(j, j);
            const T xj = x[static_cast<std::size_t>(j)];
            const int ilo = std::max(0, j - kv);
            for (int i = ilo; i < j; ++i) {
                x[static_cast<std::size_t>(i)] -= u_at(i, j) * xj;
            }
        }
        return x;
    }

    /// Solve with iterative refinement against the original matrix. Refines
    /// until the residual is below rel_target * ||b|| or stops improving.
    std::vector<T> solve_refined(const Banded<T>& A, const std::vector<T>& b,
                                 double rel_target = 1e-12, int max_passes = 3) const
    {
        std::vector<T> x = solve(b);
        double bnorm = 0.0;
        for (const auto& v : b) bnorm += std::norm(v);
        bnorm = std::sqrt(bnorm);
        double prev = std::numeric_limits<double>::infinity();
        for (int pass = 0; pass < max_passes; ++pass) {
            std::vector<T> r = A.matvec(x);
            double rnorm = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                r[i] = b[i] - r[i];
                rnorm += std::norm(r[i]);
            }
            rnorm = std::sqrt(rnorm);
            if (rnorm <= rel_target * bnorm || rnorm >= prev) break;
            prev = rnorm;
            const std::vector<T> dx = solve(r);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
        }
        return x;
    }

private:
    Banded<T> m_;  // holds L (strictly below diagonal, by column) and U
    std::vector<int> ipiv_;

    // U entries live in rows above the diagonal, including fill-in; index
    // through the raw band array to reach them.
    const T& u_at(int i, int j) const { return m_.at(i, j); }

    void factor()
    {
        const int n = m_.n;
        const int kl = m_.kl;
        const int ku = m_.ku;
        const int kv = kl + ku;
        for (int j = 0; j < n; ++j) {
            const int ihi = std::min(n - 1, j + kl);
            // pivot search in column j
            int p = j;
            double amax = std::abs(m_.at(j, j));
            for (int i = j + 1; i <= ihi; ++i) {
                const double v = std::abs(m_.at(i, j));
                if (v > amax) {
                    amax = v;
                    p = i;
                }
            }
            ipiv_[static_cast<std::size_t>(j)] = p;
            if (amax == 0.0) throw SingularMatrixError(j);
            const int jhi = std::min(n - 1, j + kv);
            if (p != j) {
                // both rows stay inside the extended band for k in [j, jhi]
                for (int k = j; k <= jhi; ++k) {
                    std::swap(m_.at(j, k), m_.at(p, k));
                }
            }
            const T piv = m_.at(j, j);
            for (int i = j + 1; i <= ihi; ++i) {
                const T l = m_.at(i, j) / piv;
                m_.at(i, j) = l;
                for (int k = j + 1; k <= jhi; ++k) {
                    m_.at(i, k) -= l * m_.at(j, k);
                }
            }
        }
    }
};

}  // namespace twabc
