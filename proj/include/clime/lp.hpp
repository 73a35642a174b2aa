#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "clime/matrix.hpp"

namespace clime {

/// One instance of the per-column linear program:
///   min |beta|_1  subject to  |sigma * beta - e_i|_inf <= lambda.
struct ColumnLp {
    const Matrix& sigma; // p x p, symmetric
    int target_index;    // i, 0-based
    double lambda;       // >= 0
};

enum class LpStatus { Optimal, MaxIterations, NumericalFailure };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::MaxIterations: return "max_iterations";
        default: return "numerical_failure";
    }
}

struct LpSolution {
    std::vector<double> beta;
    double objective = std::numeric_limits<double>::quiet_NaN(); // sum u_j = |beta|_1 at optimum
    int iterations = 0;
    double duality_gap = std::numeric_limits<double>::infinity();
    LpStatus status = LpStatus::NumericalFailure;
    std::string message;
};

struct SolverOptions {
    double gap_tol = 1e-4;    // surrogate duality gap at exit
    double feas_tol = 1e-8;   // dual residual tolerance
    double mu = 10.0;         // barrier growth factor per iteration
    double line_alpha = 0.01; // backtracking sufficient-decrease fraction
    double line_beta = 0.5;   // backtracking shrink factor
    int max_iterations = 200; // Newton step cap per column
};

namespace lp_detail {

// Constraint values for x = (beta, u), all required < 0:
//   f1_j =  beta_j - u_j
//   f2_j = -beta_j - u_j
//   f3_k =  (sigma beta)_k - e_k - lambda
//   f4_k = -(sigma beta)_k + e_k - lambda
struct Workspace {
    int p;
    std::vector<double> f1, f2, f3, f4;
    void resize(int n) {
        p = n;
        f1.assign(n, 0.0);
        f2.assign(n, 0.0);
        f3.assign(n, 0.0);
        f4.assign(n, 0.0);
    }
};

inline void eval_constraints(const std::vector<double>& beta, const std::vector<double>& u,
                             const std::vector<double>& sigma_beta, int target, double lambda,
                             Workspace& w) {
    const int p = w.p;
    for (int j = 0; j < p; ++j) {
        w.f1[j] = beta[j] - u[j];
        w.f2[j] = -beta[j] - u[j];
    }
    for (int k = 0; k < p; ++k) {
        const double e = (k == target) ? 1.0 : 0.0;
        w.f3[k] = sigma_beta[k] - e - lambda;
        w.f4[k] = -sigma_beta[k] + e - lambda;
    }
}

inline bool strictly_feasible(const Workspace& w) {
    for (int j = 0; j < w.p; ++j)
        if (w.f1[j] >= 0.0 || w.f2[j] >= 0.0 || w.f3[j] >= 0.0 || w.f4[j] >= 0.0) return false;
    return true;
}

// A strictly feasible beta for |sigma beta - e_i|_inf <= lambda, found by
// ridge-regularized solves shrunk toward zero. Returns false when no
// interior point is found (e.g. e_i unreachable for singular sigma).
inline bool initial_point(const Matrix& sigma, int target, double lambda,
                          std::vector<double>& beta_out) {
    const int p = sigma.rows();
    std::vector<double> e(p, 0.0);
    e[target] = 1.0;

    double max_diag = 0.0;
    for (int i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(sigma(i, i)));
    const double scale = max_diag > 0.0 ? max_diag : 1.0;

    auto residual_inf = [&](const std::vector<double>& b) {
        std::vector<double> sb = matvec(sigma, b);
        double m = 0.0;
        for (int k = 0; k < p; ++k) m = std::max(m, std::abs(sb[k] - e[k]));
        return m;
    };

    double best_res = std::numeric_limits<double>::infinity();
    std::vector<double> best;

    auto consider = [&](const std::vector<double>& b) {
        const double r = residual_inf(b);
        if (r < best_res) {
            best_res = r;
            best = b;
        }
    };

    const double ridges[] = {0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2};
    for (double r : ridges) {
        try {
            Matrix a = sigma;
            for (int i = 0; i < p; ++i) a(i, i) += r * scale;
            consider(cholesky_solve_vec(cholesky(a), e));
        } catch (const Error&) {
            continue;
        }
        if (best_res < 0.5 * lambda) break;
    }
    // shrinking toward the origin raises the residual toward 1, which is
    // interior whenever lambda > 1
    if (!best.empty()) {
        const double shrinks[] = {0.9, 0.5, 0.1, 0.0};
        if (best_res >= lambda) {
            for (double t : shrinks) {
                std::vector<double> b = best;
                for (double& v : b) v *= t;
                if (residual_inf(b) < lambda) {
                    consider(b);
                    break;
                }
            }
        }
    } else if (lambda > 1.0) {
        consider(std::vector<double>(p, 0.0));
    }

    if (best.empty() || best_res >= lambda) return false;
    beta_out = std::move(best);
    return true;
}

} // namespace lp_detail

/// Primal-dual interior-point solve of the column LP. A strictly feasible
/// `init` for beta may be supplied; otherwise one is constructed from a
/// (ridge-regularized) linear solve. Exact lambda = 0 is relaxed internally
/// to 1e-12 so the feasible set has an interior.
inline LpSolution solve_column(const ColumnLp& lp, const SolverOptions& opts = {},
                               const std::vector<double>* init = nullptr) {
    const Matrix& sigma = lp.sigma;
    const int p = sigma.rows();
    if (!sigma.square()) throw DimensionMismatch("solve_column: sigma not square");
    if (sigma.max_abs_asymmetry() > 1e-10)
        throw NotSymmetric("solve_column: sigma not symmetric within 1e-10");
    if (lp.target_index < 0 || lp.target_index >= p)
        throw DimensionMismatch("solve_column: target index out of range");
    if (lp.lambda < 0.0) throw Error("solve_column: lambda must be >= 0");

    const double lambda = std::max(lp.lambda, 1e-12);
    const int target = lp.target_index;
    const int m = 4 * p;

    LpSolution sol;

    std::vector<double> beta;
    if (init != nullptr) {
        if (static_cast<int>(init->size()) != p)
            throw DimensionMismatch("solve_column: init length mismatch");
        beta = *init;
    } else if (!lp_detail::initial_point(sigma, target, lambda, beta)) {
        sol.status = LpStatus::NumericalFailure;
        sol.message = "no strictly feasible starting point (constraint system may be infeasible)";
        sol.beta.assign(p, 0.0);
        return sol;
    }

    std::vector<double> u(p);
    for (int j = 0; j < p; ++j) u[j] = std::abs(beta[j]) + 1.0;

    std::vector<double> sigma_beta = matvec(sigma, beta);
    lp_detail::Workspace w;
    w.resize(p);
    lp_detail::eval_constraints(beta, u, sigma_beta, target, lambda, w);
    if (!lp_detail::strictly_feasible(w)) {
        sol.status = LpStatus::NumericalFailure;
        sol.message = "supplied starting point is not strictly feasible";
        sol.beta = beta;
        return sol;
    }

    // duals, one per constraint; z = -1/f gives surrogate gap m at the start
    std::vector<double> z1(p), z2(p), z3(p), z4(p);
    for (int j = 0; j < p; ++j) {
        z1[j] = -1.0 / w.f1[j];
        z2[j] = -1.0 / w.f2[j];
        z3[j] = -1.0 / w.f3[j];
        z4[j] = -1.0 / w.f4[j];
    }

    // Sigma (z3 - z4), maintained across iterations for the dual residual
    auto sigma_times = [&](const std::vector<double>& v) { return matvec(sigma, v); };
    std::vector<double> z34(p);
    for (int k = 0; k < p; ++k) z34[k] = z3[k] - z4[k];
    std::vector<double> sigma_z34 = sigma_times(z34);

    auto surrogate_gap = [&]() {
        double eta = 0.0;
        for (int j = 0; j < p; ++j)
            eta -= w.f1[j] * z1[j] + w.f2[j] * z2[j] + w.f3[j] * z3[j] + w.f4[j] * z4[j];
        return eta;
    };

    // residual norms for a candidate point; t held fixed during line search
    auto residual_sq = [&](const std::vector<double>& sz34, const std::vector<double>& zz1,
                           const std::vector<double>& zz2, const lp_detail::Workspace& ww,
                           const std::vector<double>& zz3, const std::vector<double>& zz4,
                           double t) {
        double s = 0.0;
        for (int j = 0; j < p; ++j) {
            const double rdb = zz1[j] - zz2[j] + sz34[j];
            const double rdu = 1.0 - zz1[j] - zz2[j];
            s += rdb * rdb + rdu * rdu;
            const double rc1 = -zz1[j] * ww.f1[j] - 1.0 / t;
            const double rc2 = -zz2[j] * ww.f2[j] - 1.0 / t;
            const double rc3 = -zz3[j] * ww.f3[j] - 1.0 / t;
            const double rc4 = -zz4[j] * ww.f4[j] - 1.0 / t;
            s += rc1 * rc1 + rc2 * rc2 + rc3 * rc3 + rc4 * rc4;
        }
        return s;
    };

    auto dual_residual_inf = [&]() {
        double r = 0.0;
        for (int j = 0; j < p; ++j) {
            r = std::max(r, std::abs(z1[j] - z2[j] + sigma_z34[j]));
            r = std::max(r, std::abs(1.0 - z1[j] - z2[j]));
        }
        return r;
    };

    std::vector<double> dbeta(p), du(p), dz1(p), dz2(p), dz3(p), dz4(p);
    std::vector<double> g_beta(p), g_u(p), rhs(p), schur_diag(p), d34(p);
    Matrix S(p, p);

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        const double eta = surrogate_gap();
        const double rdual = dual_residual_inf();
        if (eta <= opts.gap_tol && rdual <= opts.feas_tol) {
            sol.status = LpStatus::Optimal;
            break;
        }

        const double t = opts.mu * m / eta;

        // Newton system, reduced to the beta block by eliminating u
        for (int j = 0; j < p; ++j) {
            const double w1 = z1[j] / (-w.f1[j]);
            const double w2 = z2[j] / (-w.f2[j]);
            const double q1 = -z1[j] - 1.0 / (t * w.f1[j]);
            const double q2 = -z2[j] - 1.0 / (t * w.f2[j]);
            const double q3 = -z3[j] - 1.0 / (t * w.f3[j]);
            const double q4 = -z4[j] - 1.0 / (t * w.f4[j]);
            d34[j] = z3[j] / (-w.f3[j]) + z4[j] / (-w.f4[j]);
            const double dd = w1 + w2;
            const double offd = w2 - w1;
            schur_diag[j] = 4.0 * w1 * w2 / dd;
            // g = r_dual + A^T F^{-1} r_cent, assembled per block
            g_beta[j] = (z1[j] - z2[j] + sigma_z34[j]) + (q1 - q2);
            g_u[j] = (1.0 - z1[j] - z2[j]) + (-q1 - q2);
            rhs[j] = offd / dd * g_u[j];
            dz1[j] = q1; // stash q for later
            dz2[j] = q2;
            dz3[j] = q3;
            dz4[j] = q4;
        }
        {
            std::vector<double> q34(p);
            for (int k = 0; k < p; ++k) q34[k] = dz3[k] - dz4[k];
            std::vector<double> sq34 = sigma_times(q34);
            for (int j = 0; j < p; ++j) {
                g_beta[j] += sq34[j];
                rhs[j] -= g_beta[j];
            }
        }

        // S = Sigma diag(d34) Sigma + diag(schur); solve S dbeta = rhs
        for (int i = 0; i < p; ++i) {
            double* si = S.row_ptr(i);
            for (int j = 0; j < p; ++j) si[j] = 0.0;
        }
        for (int k = 0; k < p; ++k) {
            const double dk = d34[k];
            const double* sk = sigma.row_ptr(k);
            for (int i = 0; i < p; ++i) {
                const double a = dk * sk[i];
                if (a == 0.0) continue;
                double* si = S.row_ptr(i);
                for (int j = i; j < p; ++j) si[j] += a * sk[j];
            }
        }
        for (int i = 0; i < p; ++i) {
            S(i, i) += schur_diag[i];
            for (int j = i + 1; j < p; ++j) S(j, i) = S(i, j);
        }
        try {
            dbeta = cholesky_solve_vec(cholesky(S), rhs);
        } catch (const Error& err) {
            sol.status = LpStatus::NumericalFailure;
            sol.message = std::string("newton system: ") + err.what();
            break;
        }

        std::vector<double> sigma_dbeta = sigma_times(dbeta);
        for (int j = 0; j < p; ++j) {
            const double w1 = z1[j] / (-w.f1[j]);
            const double w2 = z2[j] / (-w.f2[j]);
            const double dd = w1 + w2;
            const double offd = w2 - w1;
            du[j] = (-g_u[j] - offd * dbeta[j]) / dd;
            // dz = q + w * (A dx) per constraint family
            dz1[j] = dz1[j] + w1 * (dbeta[j] - du[j]);
            dz2[j] = dz2[j] + w2 * (-dbeta[j] - du[j]);
            const double w3 = z3[j] / (-w.f3[j]);
            const double w4 = z4[j] / (-w.f4[j]);
            dz3[j] = dz3[j] + w3 * sigma_dbeta[j];
            dz4[j] = dz4[j] + w4 * (-sigma_dbeta[j]);
        }

        // longest dual-feasible step, then backtrack
        double s = 1.0;
        for (int j = 0; j < p; ++j) {
            if (dz1[j] < 0.0) s = std::min(s, -z1[j] / dz1[j]);
            if (dz2[j] < 0.0) s = std::min(s, -z2[j] / dz2[j]);
            if (dz3[j] < 0.0) s = std::min(s, -z3[j] / dz3[j]);
            if (dz4[j] < 0.0) s = std::min(s, -z4[j] / dz4[j]);
        }
        s = std::min(1.0, 0.99 * s);

        const double r0 = residual_sq(sigma_z34, z1, z2, w, z3, z4, t);
        std::vector<double> nbeta(p), nu(p), nz1(p), nz2(p), nz3(p), nz4(p), nsb(p), nsz34(p);
        std::vector<double> sigma_dz34(p);
        {
            std::vector<double> dd34(p);
            for (int k = 0; k < p; ++k) dd34[k] = dz3[k] - dz4[k];
            sigma_dz34 = sigma_times(dd34);
        }
        lp_detail::Workspace nw;
        nw.resize(p);
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int j = 0; j < p; ++j) {
                nbeta[j] = beta[j] + s * dbeta[j];
                nu[j] = u[j] + s * du[j];
                nz1[j] = z1[j] + s * dz1[j];
                nz2[j] = z2[j] + s * dz2[j];
                nz3[j] = z3[j] + s * dz3[j];
                nz4[j] = z4[j] + s * dz4[j];
                nsb[j] = sigma_beta[j] + s * sigma_dbeta[j];
                nsz34[j] = sigma_z34[j] + s * sigma_dz34[j];
            }
            lp_detail::eval_constraints(nbeta, nu, nsb, target, lambda, nw);
            if (lp_detail::strictly_feasible(nw)) {
                const double r1 = residual_sq(nsz34, nz1, nz2, nw, nz3, nz4, t);
                if (r1 <= (1.0 - opts.line_alpha * s) * (1.0 - opts.line_alpha * s) * r0) {
                    accepted = true;
                    break;
                }
            }
            s *= opts.line_beta;
        }
        if (!accepted) {
            sol.status = LpStatus::NumericalFailure;
            sol.message = "line search failed";
            break;
        }
        beta.swap(nbeta);
        u.swap(nu);
        z1.swap(nz1);
        z2.swap(nz2);
        z3.swap(nz3);
        z4.swap(nz4);
        sigma_beta.swap(nsb);
        sigma_z34.swap(nsz34);
        w = nw;
    }

    if (sol.status != LpStatus::Optimal && sol.message.empty()) {
        // iteration cap reached; the last iterate may still qualify
        if (surrogate_gap() <= opts.gap_tol && dual_residual_inf() <= opts.feas_tol)
            sol.status = LpStatus::Optimal;
        else
            sol.status = LpStatus::MaxIterations;
    }

    sol.beta = beta;
    sol.iterations = iter;
    sol.duality_gap = surrogate_gap();
    double obj = 0.0;
    for (int j = 0; j < p; ++j) obj += u[j];
    sol.objective = obj;
    return sol;
}

} // namespace clime
