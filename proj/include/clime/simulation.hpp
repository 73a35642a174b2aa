#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "clime/covariance.hpp"
#include "clime/estimator.hpp"
#include "clime/matrix.hpp"
#include "clime/model_select.hpp"
#include "clime/parallel.hpp"
#include "clime/rng.hpp"

namespace clime {

enum class ModelKind { Model1 = 1, Model2 = 2, Model3 = 3 };

struct ModelSpec {
    ModelKind kind = ModelKind::Model1;
    int p = 30;
    uint64_t seed = 0; // only Model 2 draws randomness
};

struct ExperimentConfig {
    ModelSpec model;
    int n_train = 100;
    int n_valid = 100;
    int reps = 100;
    int lambda_grid_size = 50;
    double grid_lo_factor = 0.01; // grid endpoints as multiples of sqrt(log p / n)
    double grid_hi_factor = 4.0;
    uint64_t master_seed = 0;
    double zero_tol = 1e-3; // nonzero magnitude cutoff for support metrics
    EstimateOptions estimate;
    int threads = 1; // worker threads across replications
};

struct ReplicationResult {
    double op_loss = 0.0;
    double l1_loss = 0.0;
    double fro_loss = 0.0;
    double chosen_lambda = 0.0;
    RecoveryMetrics recovery;
};

struct Aggregate {
    double mean = 0.0;
    std::optional<double> se; // sample sd / sqrt(reps); absent for reps = 1
};

struct EvalReport {
    ExperimentConfig config;
    std::vector<ReplicationResult> reps;
    Aggregate op_loss, l1_loss, fro_loss, chosen_lambda;
    std::optional<Aggregate> tp_pct, tn_pct, fpr, tpr; // percent scale for tp/tn
};

/// Banded precision matrix with entries 0.6^|i-j|.
inline Matrix model1_precision(int p) {
    if (p < 1) throw Error("model1_precision: p must be >= 1");
    Matrix omega(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) omega(i, j) = std::pow(0.6, std::abs(i - j));
    return omega;
}

/// Erdos-Renyi style sparse precision: off-diagonals of B are 0.5 with
/// probability 0.1, a diagonal shift delta makes the condition number of
/// B + delta I exactly p, and the result is standardized to unit diagonal.
inline Matrix model2_precision(int p, uint64_t seed) {
    if (p < 2) throw Error("model2_precision: p must be >= 2");
    for (int attempt = 0; attempt < 64; ++attempt) {
        Rng rng(derive_stream(seed, static_cast<uint64_t>(attempt)));
        Matrix b(p, p);
        bool any = false;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                if (rng.next_double() < 0.1) {
                    b(i, j) = 0.5;
                    b(j, i) = 0.5;
                    any = true;
                }
            }
        if (!any) continue; // degenerate draw: retry with the next substream

        const double lo = min_eigenvalue_sym(b);
        const double hi = max_eigenvalue_sym(b);
        // (hi + delta) / (lo + delta) = p
        const double delta = (hi - p * lo) / (p - 1);
        Matrix m = b;
        for (int i = 0; i < p; ++i) m(i, i) += delta;
        // unit-diagonal standardization D^{-1/2} M D^{-1/2}
        std::vector<double> dinv(p);
        for (int i = 0; i < p; ++i) dinv[i] = 1.0 / std::sqrt(m(i, i));
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) m(i, j) *= dinv[i] * dinv[j];
        for (int i = 0; i < p; ++i) m(i, i) = 1.0;
        return m;
    }
    throw Error("model2_precision: no nonzero draw in 64 attempts");
}

/// Dense compound-symmetry precision: diagonal 1, all off-diagonals 0.5.
inline Matrix model3_precision(int p) {
    if (p < 2) throw Error("model3_precision: p must be >= 2");
    Matrix omega(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) omega(i, j) = i == j ? 1.0 : 0.5;
    return omega;
}

inline Matrix model_precision(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::Model1: return model1_precision(spec.p);
        case ModelKind::Model2: return model2_precision(spec.p, spec.seed);
        default: return model3_precision(spec.p);
    }
}

/// n draws from N(0, omega0^{-1}) as rows, via the Cholesky factor of the
/// covariance and a seeded deterministic stream.
inline DataMatrix mvn_sample(const Matrix& omega0, int n, uint64_t seed) {
    const int p = omega0.rows();
    const Matrix sigma0 = spd_inverse(omega0);
    // sigma0 inherits tiny asymmetry from the solve; factor the symmetric part
    Matrix sym(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) sym(i, j) = 0.5 * (sigma0(i, j) + sigma0(j, i));
    const CholeskyFactor f = cholesky(sym);

    Rng rng(seed);
    DataMatrix x(Matrix(n, p));
    std::vector<double> z(p);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < p; ++j) z[j] = rng.next_normal();
        double* row = x.values.row_ptr(k);
        for (int i = 0; i < p; ++i) {
            const double* li = f.lower.row_ptr(i);
            double s = 0.0;
            for (int j = 0; j <= i; ++j) s += li[j] * z[j];
            row[i] = s;
        }
    }
    return x;
}

/// <Omega, Sigma> - log det(Omega), the validation criterion.
inline double likelihood_loss(const Matrix& sigma, const Matrix& omega) {
    if (sigma.rows() != omega.rows() || sigma.cols() != omega.cols() || !sigma.square())
        throw DimensionMismatch("likelihood_loss: shape mismatch");
    double dot = 0.0;
    for (int i = 0; i < sigma.rows(); ++i) {
        const double* si = sigma.row_ptr(i);
        for (int j = 0; j < sigma.cols(); ++j) dot += si[j] * omega(j, i);
    }
    return dot - log_det(omega);
}

/// Logarithmically spaced grid over [lo_factor, hi_factor] * sqrt(log p / n).
inline std::vector<double> lambda_grid(int size, int n, int p, double lo_factor = 0.01,
                                       double hi_factor = 4.0) {
    if (size < 2) throw Error("lambda_grid: size must be >= 2");
    const double r = std::sqrt(std::log(static_cast<double>(p)) / n);
    const double llo = std::log(lo_factor * r), lhi = std::log(hi_factor * r);
    std::vector<double> grid(size);
    for (int k = 0; k < size; ++k)
        grid[k] = std::exp(llo + (lhi - llo) * k / (size - 1));
    grid.front() = lo_factor * r;
    grid.back() = hi_factor * r;
    return grid;
}

/// Fit one estimate per grid value on the training covariance and keep the
/// one with the smallest validation likelihood loss. Estimates that are not
/// positive definite score +infinity. Ties keep the first (smallest) lambda.
inline std::pair<double, PrecisionEstimate> cv_select(const DataMatrix& train,
                                                      const DataMatrix& valid,
                                                      const std::vector<double>& grid, double rho,
                                                      const EstimateOptions& opts = {}) {
    if (grid.empty()) throw Error("cv_select: empty grid");
    const Matrix sigma_train = sample_covariance(train);
    const Matrix sigma_valid = sample_covariance(valid);

    double best_score = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    PrecisionEstimate best;
    bool found = false;

    for (double lam : grid) {
        PrecisionEstimate est = clime_estimate(sigma_train, lam, rho, opts);
        double score;
        try {
            score = likelihood_loss(sigma_valid, est.omega);
        } catch (const NotPositiveDefinite&) {
            score = std::numeric_limits<double>::infinity();
        }
        if (score < best_score) {
            best_score = score;
            best_lambda = lam;
            best = std::move(est);
            found = true;
        }
    }
    if (!found) throw AllInfeasible("cv_select: every grid point scored +infinity");
    return {best_lambda, std::move(best)};
}

namespace sim_detail {

inline Aggregate aggregate(const std::vector<double>& xs) {
    Aggregate a;
    const size_t n = xs.size();
    double s = 0.0;
    for (double x : xs) s += x;
    a.mean = s / n;
    if (n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - a.mean) * (x - a.mean);
        a.se = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    }
    return a;
}

} // namespace sim_detail

/// One replication: fresh train/validation samples, grid CV, losses against
/// the truth and support-recovery metrics.
inline ReplicationResult run_replication(const Matrix& omega0, const SupportPattern& truth,
                                         const ExperimentConfig& cfg, uint64_t rep_stream) {
    const int p = cfg.model.p;
    const DataMatrix train = mvn_sample(omega0, cfg.n_train, derive_stream(rep_stream, 0));
    const DataMatrix valid = mvn_sample(omega0, cfg.n_valid, derive_stream(rep_stream, 1));

    const Matrix sigma_train = sample_covariance(train);
    const double rho = auto_rho(sigma_train, cfg.n_train);
    const std::vector<double> grid =
        lambda_grid(cfg.lambda_grid_size, cfg.n_train, p, cfg.grid_lo_factor, cfg.grid_hi_factor);

    auto [lam, est] = cv_select(train, valid, grid, rho, cfg.estimate);

    ReplicationResult r;
    r.chosen_lambda = lam;
    const Matrix diff = est.omega - omega0;
    r.op_loss = spectral_norm(diff);
    r.l1_loss = matrix_l1_norm(diff);
    r.fro_loss = frobenius_norm(diff);
    r.recovery = recovery_metrics(sign_pattern(est.omega, cfg.zero_tol), truth);
    return r;
}

/// Replicated experiment with per-replication substreams; results are
/// bitwise identical for a fixed config regardless of thread count.
inline EvalReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.reps < 1) throw Error("run_experiment: reps must be >= 1");
    if (cfg.n_train < 2 || cfg.n_valid < 2)
        throw Error("run_experiment: sample sizes must be >= 2");
    const Matrix omega0 = model_precision(cfg.model);
    const SupportPattern truth = sign_pattern(omega0, cfg.zero_tol);

    EvalReport report;
    report.config = cfg;
    report.reps.resize(cfg.reps);

    try {
        parallel_for(cfg.reps, cfg.threads, [&](int r) {
            report.reps[r] =
                run_replication(omega0, truth, cfg, derive_stream(cfg.master_seed, r));
        });
    } catch (const Error& e) {
        throw Error(std::string("run_experiment: replication failed: ") + e.what());
    }

    std::vector<double> op, l1, fro, lam, tp, tn, fpr, tpr;
    for (const auto& r : report.reps) {
        op.push_back(r.op_loss);
        l1.push_back(r.l1_loss);
        fro.push_back(r.fro_loss);
        lam.push_back(r.chosen_lambda);
        if (r.recovery.tp_rate) tp.push_back(*r.recovery.tp_rate * 100.0);
        if (r.recovery.tn_rate) tn.push_back(*r.recovery.tn_rate * 100.0);
        if (r.recovery.fpr) fpr.push_back(*r.recovery.fpr);
        if (r.recovery.tpr) tpr.push_back(*r.recovery.tpr);
    }
    report.op_loss = sim_detail::aggregate(op);
    report.l1_loss = sim_detail::aggregate(l1);
    report.fro_loss = sim_detail::aggregate(fro);
    report.chosen_lambda = sim_detail::aggregate(lam);
    if (!tp.empty()) report.tp_pct = sim_detail::aggregate(tp);
    if (!tn.empty()) report.tn_pct = sim_detail::aggregate(tn);
    if (!fpr.empty()) report.fpr = sim_detail::aggregate(fpr);
    if (!tpr.empty()) report.tpr = sim_detail::aggregate(tpr);
    return report;
}

struct RocPoint {
    double lambda = 0.0;
    double mean_tpr = 0.0;
    double mean_fpr = 0.0;
};

/// Per-lambda averaged TPR/FPR across replications (no CV), one row per
/// grid value; the raw material for an ROC curve.
inline std::vector<RocPoint> roc_sweep(const ModelSpec& model, int n,
                                       const std::vector<double>& grid, int reps,
                                       uint64_t master_seed, const EstimateOptions& opts = {},
                                       int threads = 1, double zero_tol = 1e-3) {
    if (grid.empty()) throw Error("roc_sweep: empty grid");
    if (reps < 1) throw Error("roc_sweep: reps must be >= 1");
    const Matrix omega0 = model_precision(model);
    const SupportPattern truth = sign_pattern(omega0, zero_tol);

    std::vector<std::vector<RecoveryMetrics>> per_rep(reps);
    parallel_for(reps, threads, [&](int r) {
        const uint64_t stream = derive_stream(master_seed, r);
        const DataMatrix train = mvn_sample(omega0, n, derive_stream(stream, 0));
        const Matrix sigma = sample_covariance(train);
        const double rho = auto_rho(sigma, n);
        std::vector<RecoveryMetrics> row;
        row.reserve(grid.size());
        for (double lam : grid) {
            PrecisionEstimate est = clime_estimate(sigma, lam, rho, opts);
            row.push_back(recovery_metrics(sign_pattern(est.omega, zero_tol), truth));
        }
        per_rep[r] = std::move(row);
    });

    std::vector<RocPoint> out(grid.size());
    for (size_t g = 0; g < grid.size(); ++g) {
        out[g].lambda = grid[g];
        double stpr = 0.0, sfpr = 0.0;
        for (int r = 0; r < reps; ++r) {
            stpr += per_rep[r][g].tpr.value_or(0.0);
            sfpr += per_rep[r][g].fpr.value_or(0.0);
        }
        out[g].mean_tpr = stpr / reps;
        out[g].mean_fpr = sfpr / reps;
    }
    return out;
}

} // namespace clime
