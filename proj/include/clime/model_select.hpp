#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "clime/matrix.hpp"

namespace clime {

/// Signed sparsity pattern over {-1, 0, +1}.
struct SupportPattern {
    int p = 0;
    std::vector<int8_t> signs; // row-major p x p

    SupportPattern() = default;
    explicit SupportPattern(int dim) : p(dim), signs(static_cast<size_t>(dim) * dim, 0) {}

    int8_t operator()(int i, int j) const { return signs[static_cast<size_t>(i) * p + j]; }
    int8_t& operator()(int i, int j) { return signs[static_cast<size_t>(i) * p + j]; }

    bool operator==(const SupportPattern& other) const {
        return p == other.p && signs == other.signs;
    }
};

struct RecoveryMetrics {
    long tp = 0, tn = 0, fp = 0, fn = 0;
    std::optional<double> tp_rate; // TP / true nonzeros, absent when none
    std::optional<double> tn_rate; // TN / true zeros, absent when none
    std::optional<double> tpr;     // == tp_rate
    std::optional<double> fpr;     // FP / true zeros, absent when none
};

/// Hard threshold: entries below tau in magnitude are set to exactly zero,
/// all entries (diagonal included) are subject to the rule.
inline Matrix threshold(const Matrix& omega_hat, double tau) {
    if (tau < 0.0) throw Error("threshold: tau must be >= 0");
    Matrix out = omega_hat;
    for (double& v : out.data())
        if (std::abs(v) < tau) v = 0.0;
    return out;
}

/// Sign of each entry; magnitudes <= zero_tol count as zero (strict
/// inequality required for nonzero).
inline SupportPattern sign_pattern(const Matrix& a, double zero_tol = 1e-3) {
    if (!a.square()) throw DimensionMismatch("sign_pattern: matrix not square");
    if (zero_tol < 0.0) throw Error("sign_pattern: zero_tol must be >= 0");
    const int p = a.rows();
    SupportPattern s(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double v = a(i, j);
            if (std::abs(v) > zero_tol) s(i, j) = v > 0.0 ? 1 : -1;
        }
    return s;
}

/// Entry counts over the pattern pair; rates are absent when their
/// denominator class is empty (e.g. TN% for a fully dense truth).
inline RecoveryMetrics recovery_metrics(const SupportPattern& estimated,
                                        const SupportPattern& truth,
                                        bool include_diagonal = true) {
    if (estimated.p != truth.p)
        throw DimensionMismatch("recovery_metrics: pattern dimensions differ");
    RecoveryMetrics m;
    const int p = truth.p;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (!include_diagonal && i == j) continue;
            const bool est_nz = estimated(i, j) != 0;
            const bool true_nz = truth(i, j) != 0;
            if (true_nz)
                est_nz ? ++m.tp : ++m.fn;
            else
                est_nz ? ++m.fp : ++m.tn;
        }
    const long true_nonzeros = m.tp + m.fn;
    const long true_zeros = m.tn + m.fp;
    if (true_nonzeros > 0) {
        m.tp_rate = static_cast<double>(m.tp) / true_nonzeros;
        m.tpr = m.tp_rate;
    }
    if (true_zeros > 0) {
        m.tn_rate = static_cast<double>(m.tn) / true_zeros;
        m.fpr = static_cast<double>(m.fp) / true_zeros;
    }
    return m;
}

/// Smallest nonzero magnitude over the support.
inline double theta_min(const Matrix& omega0) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : omega0.data())
        if (v != 0.0) best = std::min(best, std::abs(v));
    if (!std::isfinite(best)) throw AllZero("theta_min: matrix is identically zero");
    return best;
}

/// tau = 4 * M * lambda, the threshold level implied by an l1-operator-norm
/// bound M on the truth.
inline double default_tau(double m_bound, double lambda) {
    if (!(m_bound > 0.0)) throw Error("default_tau: m_bound must be positive");
    if (lambda < 0.0) throw Error("default_tau: lambda must be >= 0");
    return 4.0 * m_bound * lambda;
}

} // namespace clime
