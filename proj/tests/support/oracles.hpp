#pragma once

// Independent reference implementations used only by tests. Everything here
// is definitional (straight loops) or a textbook algorithm kept off the
// library's main path, so that library results can be checked against an
// implementation that shares no code with them.

#include <cmath>
#include <vector>

#include "clime/matrix.hpp"
#include "clime/rng.hpp"

namespace oracle {

inline clime::Matrix matmul_triple_loop(const clime::Matrix& a, const clime::Matrix& b) {
    clime::Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline double matrix_l1_double_loop(const clime::Matrix& a) {
    double best = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        if (s > best) best = s;
    }
    return best;
}

inline double frobenius_double_loop(const clime::Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

inline double inf_double_loop(const clime::Matrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

inline double l1_double_loop(const clime::Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    return s;
}

/// Cyclic Jacobi eigenvalue iteration for symmetric matrices.
inline std::vector<double> jacobi_eigenvalues(clime::Matrix a, int sweeps = 100,
                                              double tol = 1e-14) {
    const int n = a.rows();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) < tol) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a(i, i);
    return eig;
}

inline double max_abs_eigenvalue(const clime::Matrix& a) {
    double m = 0.0;
    for (double e : jacobi_eigenvalues(a)) m = std::max(m, std::abs(e));
    return m;
}

inline double min_eigenvalue(const clime::Matrix& a) {
    auto eig = jacobi_eigenvalues(a);
    double m = eig[0];
    for (double e : eig) m = std::min(m, e);
    return m;
}

inline double max_eigenvalue(const clime::Matrix& a) {
    auto eig = jacobi_eigenvalues(a);
    double m = eig[0];
    for (double e : eig) m = std::max(m, e);
    return m;
}

inline clime::Matrix random_matrix(int r, int c, clime::Rng& rng, double lo = -1.0,
                                   double hi = 1.0) {
    clime::Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

inline clime::Matrix random_symmetric(int p, clime::Rng& rng, double lo = -1.0, double hi = 1.0) {
    clime::Matrix m(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            const double v = rng.uniform(lo, hi);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

/// A A^T / p + ridge I: symmetric positive definite with high probability.
inline clime::Matrix random_spd(int p, clime::Rng& rng, double ridge = 0.1) {
    clime::Matrix a = random_matrix(p, p, rng);
    clime::Matrix s(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            double v = 0.0;
            for (int k = 0; k < p; ++k) v += a(i, k) * a(j, k);
            v /= p;
            s(i, j) = v;
            s(j, i) = v;
        }
    for (int i = 0; i < p; ++i) s(i, i) += ridge;
    return s;
}

} // namespace oracle
