#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "clime/covariance.hpp"
#include "clime/lp.hpp"
#include "clime/matrix.hpp"
#include "clime/parallel.hpp"

namespace clime {

struct ColumnDiagnostics {
    int column = 0;
    LpStatus status = LpStatus::NumericalFailure;
    int iterations = 0;
    double duality_gap = 0.0;
    double objective = 0.0;
    std::string message;
};

/// Symmetric precision estimate together with the parameters and per-column
/// solver diagnostics that produced it.
struct PrecisionEstimate {
    Matrix omega;
    double lambda = 0.0;
    double rho = 0.0;
    std::vector<ColumnDiagnostics> column_diagnostics;
    bool symmetric = false;

    bool all_columns_optimal() const {
        for (const auto& d : column_diagnostics)
            if (d.status != LpStatus::Optimal) return false;
        return true;
    }
};

struct EstimateOptions {
    SolverOptions solver;
    int threads = 1; // 0 = resolve from CLIME_THREADS / hardware
};

/// Solve the p column programs against `sigma` and collect the solutions as
/// columns of the (generally asymmetric) matrix. Columns are independent;
/// the merge order is fixed by column index, so the result does not depend
/// on scheduling.
inline Matrix estimate_columns(const Matrix& sigma, double lambda, const EstimateOptions& opts = {},
                               std::vector<ColumnDiagnostics>* diagnostics = nullptr) {
    if (!sigma.square()) throw DimensionMismatch("estimate_columns: sigma not square");
    if (sigma.max_abs_asymmetry() > 1e-10)
        throw NotSymmetric("estimate_columns: sigma not symmetric within 1e-10");
    if (lambda < 0.0) throw Error("estimate_columns: lambda must be >= 0");
    const int p = sigma.rows();

    Matrix omega1(p, p);
    std::vector<ColumnDiagnostics> diags(p);

    parallel_for(p, opts.threads, [&](int i) {
        LpSolution s = solve_column(ColumnLp{sigma, i, lambda}, opts.solver);
        diags[i] = ColumnDiagnostics{i,        s.status,        s.iterations,
                                     s.duality_gap, s.objective, s.message};
        for (int j = 0; j < p; ++j) omega1(j, i) = s.beta[j];
    });

    if (diagnostics != nullptr) *diagnostics = std::move(diags);
    return omega1;
}

/// For each (i,j) pair keep whichever of the two entries has the smaller
/// magnitude, assigning it to both positions; exact ties keep entry (i,j)
/// with i < j.
inline Matrix symmetrize(const Matrix& omega1) {
    if (!omega1.square()) throw DimensionMismatch("symmetrize: matrix not square");
    const int p = omega1.rows();
    Matrix out = omega1;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            const double a = omega1(i, j), b = omega1(j, i);
            const double v = std::abs(a) <= std::abs(b) ? a : b;
            out(i, j) = v;
            out(j, i) = v;
        }
    return out;
}

/// The full estimator: perturb sigma by rho, solve the p column programs,
/// symmetrize. rho = 0 gives the unperturbed program.
inline PrecisionEstimate clime_estimate(const Matrix& sigma_n, double lambda, double rho,
                                        const EstimateOptions& opts = {}) {
    if (rho < 0.0) throw Error("clime_estimate: rho must be >= 0");
    PrecisionEstimate est;
    est.lambda = lambda;
    est.rho = rho;
    const Matrix sig = rho > 0.0 ? perturb(sigma_n, rho) : sigma_n;
    Matrix omega1 = estimate_columns(sig, lambda, opts, &est.column_diagnostics);
    est.omega = symmetrize(omega1);
    est.symmetric = true;
    return est;
}

/// 0 when sigma is numerically positive definite, else sqrt(log p / n).
inline double auto_rho(const Matrix& sigma, int n) {
    if (is_positive_definite(sigma)) return 0.0;
    return default_rho(n, sigma.rows());
}

/// Elementwise l1 norm of an estimate (the program objective).
inline double elementwise_l1_of_estimate(const Matrix& omega) {
    return elementwise_l1_norm(omega);
}

} // namespace clime
