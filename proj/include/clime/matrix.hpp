#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "clime/errors.hpp"

namespace clime {

/// Dense real matrix, row-major storage. The single numeric carrier used
/// everywhere in this library. Immutable-by-convention after construction;
/// safe to share across threads.
class Matrix {
  public:
    Matrix() = default;

    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {
        assert(rows >= 0 && cols >= 0);
    }

    Matrix(int rows, int cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != static_cast<size_t>(rows) * cols)
            throw DimensionMismatch("entry count does not match rows*cols");
    }

    static Matrix identity(int p) {
        Matrix m(p, p);
        for (int i = 0; i < p; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        int r = static_cast<int>(rows.size());
        int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        Matrix m(r, c);
        int i = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c)
                throw DimensionMismatch("ragged initializer");
            int j = 0;
            for (double v : row) m(i, j++) = v;
            ++i;
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<size_t>(i) * cols_ + j];
    }

    const double* row_ptr(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }
    double* row_ptr(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool square() const { return rows_ == cols_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double max_abs_asymmetry() const {
        assert(square());
        double m = 0.0;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    bool is_symmetric(double tol = 1e-10) const {
        return square() && max_abs_asymmetry() <= tol;
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("matrix add: shape mismatch");
    Matrix c = a;
    for (size_t k = 0; k < c.data().size(); ++k) c.data()[k] += b.data()[k];
    return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("matrix sub: shape mismatch");
    Matrix c = a;
    for (size_t k = 0; k < c.data().size(); ++k) c.data()[k] -= b.data()[k];
    return c;
}

inline Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.data()) v *= s;
    return c;
}

/// Standard matrix product, cache-friendly i-k-j loop order.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    const int n = a.rows(), m = a.cols(), q = b.cols();
    for (int i = 0; i < n; ++i) {
        double* ci = c.row_ptr(i);
        for (int k = 0; k < m; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row_ptr(k);
            for (int j = 0; j < q; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

/// y = A x for a contiguous vector x of length A.cols().
inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != static_cast<int>(x.size()))
        throw DimensionMismatch("matvec: length mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const double* ai = a.row_ptr(i);
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

struct CholeskyFactor {
    int dim = 0;
    Matrix lower; // L with L*L^T reconstructing the input
};

/// Cholesky factorization of a symmetric positive definite matrix.
/// Rejects asymmetric input (tolerance 1e-10 absolute) instead of
/// symmetrizing. Fails when a pivot drops below 1e-12 times the largest
/// diagonal entry.
inline CholeskyFactor cholesky(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("cholesky: matrix not square");
    if (a.max_abs_asymmetry() > 1e-10)
        throw NotSymmetric("cholesky: input not symmetric within 1e-10");
    const int p = a.rows();
    double max_diag = 0.0;
    for (int i = 0; i < p; ++i) max_diag = std::max(max_diag, a(i, i));
    const double pivot_tol = 1e-12 * max_diag;

    Matrix L(p, p);
    for (int j = 0; j < p; ++j) {
        double d = a(j, j);
        const double* lj = L.row_ptr(j);
        for (int k = 0; k < j; ++k) d -= lj[k] * lj[k];
        if (d <= pivot_tol)
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) +
                                      " at index " + std::to_string(j));
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
        for (int i = j + 1; i < p; ++i) {
            double s = a(i, j);
            const double* li = L.row_ptr(i);
            for (int k = 0; k < j; ++k) s -= li[k] * lj[k];
            L(i, j) = s / ljj;
        }
    }
    return CholeskyFactor{p, std::move(L)};
}

inline bool is_positive_definite(const Matrix& a) {
    try {
        cholesky(a);
        return true;
    } catch (const NotPositiveDefinite&) {
        return false;
    }
}

/// Solve L y = b, L^T x = y column by column given a Cholesky factor.
inline Matrix cholesky_solve(const CholeskyFactor& f, const Matrix& b) {
    const int p = f.dim;
    if (b.rows() != p) throw DimensionMismatch("cholesky_solve: rhs rows mismatch");
    const Matrix& L = f.lower;
    Matrix x = b;
    for (int c = 0; c < b.cols(); ++c) {
        // forward: L y = b
        for (int i = 0; i < p; ++i) {
            double s = x(i, c);
            const double* li = L.row_ptr(i);
            for (int k = 0; k < i; ++k) s -= li[k] * x(k, c);
            x(i, c) = s / li[i];
        }
        // backward: L^T x = y
        for (int i = p - 1; i >= 0; --i) {
            double s = x(i, c);
            for (int k = i + 1; k < p; ++k) s -= L(k, i) * x(k, c);
            x(i, c) = s / L(i, i);
        }
    }
    return x;
}

inline std::vector<double> cholesky_solve_vec(const CholeskyFactor& f, const std::vector<double>& b) {
    const int p = f.dim;
    if (static_cast<int>(b.size()) != p)
        throw DimensionMismatch("cholesky_solve_vec: rhs length mismatch");
    const Matrix& L = f.lower;
    std::vector<double> x = b;
    for (int i = 0; i < p; ++i) {
        double s = x[i];
        const double* li = L.row_ptr(i);
        for (int k = 0; k < i; ++k) s -= li[k] * x[k];
        x[i] = s / li[i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < p; ++k) s -= L(k, i) * x[k];
        x[i] = s / L(i, i);
    }
    return x;
}

inline Matrix solve_spd(const Matrix& a, const Matrix& b) {
    return cholesky_solve(cholesky(a), b);
}

/// Inverse of a symmetric positive definite matrix.
inline Matrix spd_inverse(const Matrix& a) {
    return solve_spd(a, Matrix::identity(a.rows()));
}

/// log det of a symmetric positive definite matrix via Cholesky.
inline double log_det(const Matrix& a) {
    CholeskyFactor f = cholesky(a);
    double s = 0.0;
    for (int i = 0; i < f.dim; ++i) s += std::log(f.lower(i, i));
    return 2.0 * s;
}

// ---- matrix norms ----

/// max over columns of the column absolute sum.
inline double matrix_l1_norm(const Matrix& a) {
    double best = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

inline double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

inline double elementwise_inf_norm(const Matrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

inline double elementwise_l1_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += std::abs(v);
    return s;
}

struct SpectralNormResult {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

namespace detail {
// splitmix64; used for the deterministic fallback start vector only.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

/// Largest singular value by power iteration on A^T A. Deterministic
/// all-ones start; one seeded random restart if the first pass stagnates.
inline SpectralNormResult spectral_norm_detail(const Matrix& a, double rel_tol = 1e-10,
                                               int max_iter = 10000) {
    if (!a.square()) throw DimensionMismatch("spectral_norm: matrix not square");
    const int n = a.rows();
    if (n == 0) return {0.0, true, 0};

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double sigma = 0.0, prev = -1.0;
    SpectralNormResult res;
    bool restarted = false;
    uint64_t seed = 0x5eed5eedULL;

    for (int it = 1; it <= max_iter; ++it) {
        std::vector<double> w = matvec(a, v);
        double wn = 0.0;
        for (double x : w) wn += x * x;
        sigma = std::sqrt(wn);
        if (sigma == 0.0) return {0.0, true, it}; // A v = 0 with the current start
        // v <- A^T w / |.|
        std::vector<double> z(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const double* ai = a.row_ptr(i);
            const double wi = w[i];
            for (int j = 0; j < n; ++j) z[j] += ai[j] * wi;
        }
        double zn = 0.0;
        for (double x : z) zn += x * x;
        zn = std::sqrt(zn);
        if (zn == 0.0) return {0.0, true, it};
        for (int j = 0; j < n; ++j) v[j] = z[j] / zn;

        if (prev >= 0.0 && std::abs(sigma - prev) <= rel_tol * std::max(sigma, 1e-300)) {
            res = {sigma, true, it};
            return res;
        }
        // stagnating first pass: retry once from a seeded random direction
        if (!restarted && it == max_iter / 2) {
            restarted = true;
            for (int j = 0; j < n; ++j) {
                seed = detail::mix64(seed + j);
                v[j] = (static_cast<double>(seed >> 11) * 0x1.0p-53) - 0.5;
            }
            double nn = 0.0;
            for (double x : v) nn += x * x;
            nn = std::sqrt(nn);
            for (double& x : v) x /= nn;
            prev = -1.0;
            continue;
        }
        prev = sigma;
    }
    return {sigma, false, max_iter};
}

/// Largest singular value; best estimate even without convergence
/// (use spectral_norm_detail to observe the flag).
inline double spectral_norm(const Matrix& a) { return spectral_norm_detail(a).value; }

/// Smallest and largest eigenvalue of a symmetric matrix by Cholesky
/// bisection: lambda_min(C) is the largest shift s with C - s I positive
/// definite. Certifiable to the requested absolute tolerance; not a full
/// eigendecomposition.
inline double min_eigenvalue_sym(const Matrix& c, double tol = 1e-13) {
    if (!c.square()) throw DimensionMismatch("min_eigenvalue_sym: not square");
    const int p = c.rows();
    // Gershgorin bound
    double bound = 0.0;
    for (int i = 0; i < p; ++i) {
        double r = 0.0;
        for (int j = 0; j < p; ++j) r += std::abs(c(i, j));
        bound = std::max(bound, r);
    }
    double lo = -bound - 1.0, hi = bound + 1.0;
    const double abs_tol = tol * (1.0 + bound);
    auto pd_after_shift = [&](double s) {
        Matrix m = c;
        for (int i = 0; i < p; ++i) m(i, i) -= s;
        return is_positive_definite(m);
    };
    // invariant: C - lo*I is PD, C - hi*I is not
    if (!pd_after_shift(lo)) return lo; // cannot happen for finite input
    while (hi - lo > abs_tol) {
        double mid = 0.5 * (lo + hi);
        if (pd_after_shift(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double max_eigenvalue_sym(const Matrix& c, double tol = 1e-13) {
    Matrix neg = -1.0 * c;
    return -min_eigenvalue_sym(neg, tol);
}

/// trace(A * B) without forming the product.
inline double trace_product(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw DimensionMismatch("trace_product: shape mismatch");
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, i);
    return s;
}

} // namespace clime
