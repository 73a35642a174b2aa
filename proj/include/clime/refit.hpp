#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "clime/estimator.hpp"
#include "clime/matrix.hpp"
#include "clime/model_select.hpp"

namespace clime {

/// Support-constrained log-determinant correction: minimize
/// <Omega, Sigma> - log det(Omega) over symmetric positive definite
/// matrices that vanish off the given support.
struct RefitProblem {
    Matrix sigma_n;
    SupportPattern support; // symmetric, diagonal fully included
};

struct RefitOptions {
    double grad_tol = 1e-6;     // first-order residual on the support
    double rel_obj_tol = 1e-10; // relative objective change
    int max_iterations = 500;
    int newton_limit = 3000; // free-entry count above which plain gradient steps are used
};

struct RefitInfo {
    int iterations = 0;
    double grad_residual = 0.0;
    double objective = 0.0;
    bool objective_monotone = true;
    bool coordinate_fallback_used = false;
};

namespace refit_detail {

struct FreeEntry {
    int i, j; // i <= j
};

inline double support_objective(const Matrix& omega, const Matrix& sigma) {
    double dot = 0.0;
    for (size_t k = 0; k < omega.data().size(); ++k) dot += omega.data()[k] * sigma.data()[k];
    return dot - log_det(omega);
}

// gradient of the objective along the symmetric basis element of entry a
inline double entry_gradient(const FreeEntry& a, const Matrix& sigma, const Matrix& w) {
    const double g = sigma(a.i, a.j) - w(a.i, a.j);
    return a.i == a.j ? g : 2.0 * g;
}

// trace(W E_a W E_b) for symmetric basis elements
inline double entry_hessian(const FreeEntry& a, const FreeEntry& b, const Matrix& w) {
    if (a.i == a.j && b.i == b.j) return w(a.i, b.i) * w(a.i, b.i);
    if (a.i == a.j) return 2.0 * w(a.i, b.i) * w(a.i, b.j);
    if (b.i == b.j) return 2.0 * w(a.i, b.i) * w(a.j, b.i);
    return 2.0 * (w(a.i, b.i) * w(a.j, b.j) + w(a.i, b.j) * w(a.j, b.i));
}

} // namespace refit_detail

inline Matrix refit(const RefitProblem& problem, const RefitOptions& opts = {},
                    RefitInfo* info_out = nullptr) {
    const Matrix& sigma = problem.sigma_n;
    const SupportPattern& support = problem.support;
    if (!sigma.square()) throw DimensionMismatch("refit: sigma not square");
    if (sigma.max_abs_asymmetry() > 1e-10)
        throw NotSymmetric("refit: sigma not symmetric within 1e-10");
    const int p = sigma.rows();
    if (support.p != p) throw DimensionMismatch("refit: support dimension mismatch");
    for (int i = 0; i < p; ++i) {
        if (support(i, i) == 0) throw Error("refit: support must include the full diagonal");
        for (int j = i + 1; j < p; ++j)
            if ((support(i, j) == 0) != (support(j, i) == 0))
                throw Error("refit: support must be symmetric");
        if (!(sigma(i, i) > 0.0))
            throw NotPositiveDefinite("refit: sigma diagonal must be positive");
    }

    std::vector<refit_detail::FreeEntry> free_entries;
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j)
            if (support(i, j) != 0) free_entries.push_back({i, j});
    const int nf = static_cast<int>(free_entries.size());
    const bool use_newton = nf <= opts.newton_limit;

    Matrix omega(p, p);
    for (int i = 0; i < p; ++i) omega(i, i) = 1.0 / sigma(i, i);

    RefitInfo info;
    double obj = refit_detail::support_objective(omega, sigma);
    info.objective = obj;

    auto apply_direction = [&](const std::vector<double>& d, double t, Matrix& out) {
        out = omega;
        for (int a = 0; a < nf; ++a) {
            const auto& e = free_entries[a];
            out(e.i, e.j) += t * d[a];
            if (e.i != e.j) out(e.j, e.i) += t * d[a];
        }
    };

    std::vector<double> grad(nf), dir(nf);
    Matrix trial(p, p);
    double last_rel_change = std::numeric_limits<double>::infinity();
    int polish_left = 2;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const Matrix w = spd_inverse(omega);
        double resid = 0.0;
        for (int a = 0; a < nf; ++a) {
            const auto& e = free_entries[a];
            grad[a] = refit_detail::entry_gradient(e, sigma, w);
            resid = std::max(resid, std::abs(sigma(e.i, e.j) - w(e.i, e.j)));
        }
        info.grad_residual = resid;
        if (resid <= opts.grad_tol && last_rel_change <= opts.rel_obj_tol) {
            // in the quadratic-convergence range an extra step or two lands
            // the iterate essentially on the stationary point
            if (!use_newton || polish_left == 0 || resid <= 1e-12) break;
            --polish_left;
        }

        if (use_newton) {
            Matrix h(nf, nf);
            for (int a = 0; a < nf; ++a)
                for (int b = a; b < nf; ++b) {
                    const double v =
                        refit_detail::entry_hessian(free_entries[a], free_entries[b], w);
                    h(a, b) = v;
                    h(b, a) = v;
                }
            std::vector<double> neg_g(nf);
            for (int a = 0; a < nf; ++a) neg_g[a] = -grad[a];
            dir = cholesky_solve_vec(cholesky(h), neg_g);
        } else {
            for (int a = 0; a < nf; ++a) dir[a] = -grad[a];
        }

        double slope = 0.0;
        for (int a = 0; a < nf; ++a) slope += grad[a] * dir[a];

        double t = 1.0;
        bool stepped = false;
        for (int ls = 0; ls < 60; ++ls) {
            apply_direction(dir, t, trial);
            try {
                const double trial_obj = refit_detail::support_objective(trial, sigma);
                if (trial_obj <= obj + 1e-4 * t * slope) {
                    last_rel_change = std::abs(obj - trial_obj) / std::max(1.0, std::abs(obj));
                    if (trial_obj > obj) info.objective_monotone = false;
                    omega = trial;
                    obj = trial_obj;
                    stepped = true;
                    break;
                }
            } catch (const NotPositiveDefinite&) {
                // step left the cone; shrink
            }
            t *= 0.5;
        }

        if (!stepped) {
            // coordinate-wise fallback: one sweep of single-entry steps
            info.coordinate_fallback_used = true;
            const double sweep_start_obj = obj;
            bool improved = false;
            for (int a = 0; a < nf; ++a) {
                const Matrix wa = spd_inverse(omega);
                const auto& e = free_entries[a];
                const double g = refit_detail::entry_gradient(e, sigma, wa);
                const double h = refit_detail::entry_hessian(e, e, wa);
                double step = -g / h;
                for (int ls = 0; ls < 40 && step != 0.0; ++ls) {
                    Matrix cand = omega;
                    cand(e.i, e.j) += step;
                    if (e.i != e.j) cand(e.j, e.i) += step;
                    try {
                        const double cand_obj = refit_detail::support_objective(cand, sigma);
                        if (cand_obj < obj) {
                            omega = cand;
                            obj = cand_obj;
                            improved = true;
                            break;
                        }
                    } catch (const NotPositiveDefinite&) {
                    }
                    step *= 0.5;
                }
            }
            if (!improved)
                throw RefitFailure(
                    "refit: line search cannot maintain positive definiteness or descent");
            last_rel_change =
                std::abs(sweep_start_obj - obj) / std::max(1.0, std::abs(sweep_start_obj));
        }
    }

    if (it >= opts.max_iterations)
        throw RefitFailure("refit: iteration limit reached with residual " +
                           std::to_string(info.grad_residual));

    info.iterations = it;
    info.objective = obj;
    if (info_out != nullptr) *info_out = info;
    return omega;
}

/// Threshold the estimator at tau, take the resulting support (diagonal
/// forcibly included), and refit against the unperturbed sigma.
inline Matrix refitted_clime(const Matrix& sigma_n, double lambda, double rho, double tau,
                             const EstimateOptions& est_opts = {},
                             const RefitOptions& refit_opts = {},
                             PrecisionEstimate* raw_out = nullptr, RefitInfo* info_out = nullptr) {
    PrecisionEstimate est = clime_estimate(sigma_n, lambda, rho, est_opts);
    Matrix tilde = threshold(est.omega, tau);
    SupportPattern support = sign_pattern(tilde, 0.0);
    for (int i = 0; i < support.p; ++i)
        if (support(i, i) == 0) support(i, i) = 1;
    if (raw_out != nullptr) *raw_out = std::move(est);
    return refit(RefitProblem{sigma_n, std::move(support)}, refit_opts, info_out);
}

} // namespace clime
