#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "clime/covariance.hpp"
#include "clime/estimator.hpp"
#include "clime/matrix.hpp"
#include "clime/parallel.hpp"
#include "clime/rng.hpp"
#include "clime/simulation.hpp"

namespace clime {

/// Two-class dataset; labels are 1 (positive) and 2.
struct LabeledDataset {
    DataMatrix features;
    std::vector<int> labels;

    int n() const { return features.n(); }
    int p() const { return features.p(); }

    void validate() const {
        if (static_cast<int>(labels.size()) != n())
            throw DimensionMismatch("labeled dataset: label count differs from row count");
        for (int v : labels)
            if (v != 1 && v != 2) throw Error("labeled dataset: labels must be 1 or 2");
    }
};

struct LdaModel {
    Matrix omega;
    std::vector<double> mu1, mu2;
    double pi1 = 0.0, pi2 = 0.0;
};

struct ClassificationMetrics {
    long tp = 0, tn = 0, fp = 0, fn = 0;
    double specificity = 0.0;
    double sensitivity = 0.0;
    double mcc = 0.0;
};

/// Per-class uniform sampling without replacement into the test set; the
/// remainder is the training set. Row order within each part follows the
/// original dataset.
inline std::pair<LabeledDataset, LabeledDataset>
stratified_split(const LabeledDataset& data, int test_count1, int test_count2, uint64_t seed) {
    data.validate();
    const int n = data.n(), p = data.p();
    std::vector<int> idx1, idx2;
    for (int i = 0; i < n; ++i) (data.labels[i] == 1 ? idx1 : idx2).push_back(i);
    if (test_count1 < 0 || test_count2 < 0 || test_count1 > static_cast<int>(idx1.size()) ||
        test_count2 > static_cast<int>(idx2.size()))
        throw InsufficientClassSize("stratified_split: test counts exceed class sizes");

    Rng rng(seed);
    shuffle_indices(idx1, rng);
    shuffle_indices(idx2, rng);

    std::vector<bool> in_test(n, false);
    for (int k = 0; k < test_count1; ++k) in_test[idx1[k]] = true;
    for (int k = 0; k < test_count2; ++k) in_test[idx2[k]] = true;

    LabeledDataset train, test;
    std::vector<std::vector<double>> train_rows, test_rows;
    for (int i = 0; i < n; ++i) {
        auto& dst = in_test[i] ? test : train;
        auto& rows = in_test[i] ? test_rows : train_rows;
        dst.labels.push_back(data.labels[i]);
        rows.emplace_back(data.features.values.row_ptr(i), data.features.values.row_ptr(i) + p);
    }
    auto pack = [p](std::vector<std::vector<double>>& rows) {
        Matrix m(static_cast<int>(rows.size()), p);
        for (size_t i = 0; i < rows.size(); ++i)
            std::copy(rows[i].begin(), rows[i].end(), m.row_ptr(static_cast<int>(i)));
        return DataMatrix(std::move(m));
    };
    train.features = pack(train_rows);
    test.features = pack(test_rows);
    return {std::move(train), std::move(test)};
}

/// Welch two-sample t statistic per feature. A feature constant in both
/// groups scores 0; constant in both but with different means scores +-inf.
inline std::vector<double> t_statistics(const LabeledDataset& data) {
    data.validate();
    const int n = data.n(), p = data.p();
    int n1 = 0, n2 = 0;
    for (int v : data.labels) (v == 1 ? n1 : n2)++;
    if (n1 < 2 || n2 < 2) throw InsufficientClassSize("t_statistics: each class needs >= 2 rows");

    std::vector<double> m1(p, 0.0), m2(p, 0.0), v1(p, 0.0), v2(p, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = data.features.values.row_ptr(i);
        auto& m = data.labels[i] == 1 ? m1 : m2;
        for (int j = 0; j < p; ++j) m[j] += row[j];
    }
    for (int j = 0; j < p; ++j) {
        m1[j] /= n1;
        m2[j] /= n2;
    }
    for (int i = 0; i < n; ++i) {
        const double* row = data.features.values.row_ptr(i);
        const bool c1 = data.labels[i] == 1;
        auto& m = c1 ? m1 : m2;
        auto& v = c1 ? v1 : v2;
        for (int j = 0; j < p; ++j) {
            const double d = row[j] - m[j];
            v[j] += d * d;
        }
    }
    std::vector<double> t(p);
    for (int j = 0; j < p; ++j) {
        const double var1 = v1[j] / (n1 - 1), var2 = v2[j] / (n2 - 1);
        const double denom = std::sqrt(var1 / n1 + var2 / n2);
        const double diff = m1[j] - m2[j];
        if (denom == 0.0)
            t[j] = diff == 0.0 ? 0.0
                               : std::copysign(std::numeric_limits<double>::infinity(), diff);
        else
            t[j] = diff / denom;
    }
    return t;
}

/// Indices of the k largest |t|, ties broken toward the lower index;
/// returned in ascending index order.
inline std::vector<int> select_top_features(const std::vector<double>& t_stats, int k) {
    const int p = static_cast<int>(t_stats.size());
    if (k < 0 || k > p) throw Error("select_top_features: k out of range");
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ta = std::abs(t_stats[a]), tb = std::abs(t_stats[b]);
        if (ta != tb) return ta > tb;
        return a < b;
    });
    std::vector<int> chosen(order.begin(), order.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

inline LabeledDataset take_feature_subset(const LabeledDataset& data,
                                          const std::vector<int>& columns) {
    LabeledDataset out;
    out.labels = data.labels;
    Matrix m(data.n(), static_cast<int>(columns.size()));
    for (int i = 0; i < data.n(); ++i) {
        const double* src = data.features.values.row_ptr(i);
        double* dst = m.row_ptr(i);
        for (size_t c = 0; c < columns.size(); ++c) dst[c] = src[columns[c]];
    }
    out.features = DataMatrix(std::move(m));
    return out;
}

/// Pooled within-class covariance with divisor n: rows are centered by
/// their own class mean before the outer-product accumulation.
inline Matrix pooled_within_class_covariance(const LabeledDataset& data) {
    data.validate();
    const int n = data.n(), p = data.p();
    if (n < 2) throw TooFewSamples("pooled covariance: need n >= 2");
    int n1 = 0, n2 = 0;
    std::vector<double> m1(p, 0.0), m2(p, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = data.features.values.row_ptr(i);
        if (data.labels[i] == 1) {
            ++n1;
            for (int j = 0; j < p; ++j) m1[j] += row[j];
        } else {
            ++n2;
            for (int j = 0; j < p; ++j) m2[j] += row[j];
        }
    }
    for (int j = 0; j < p; ++j) {
        if (n1 > 0) m1[j] /= n1;
        if (n2 > 0) m2[j] /= n2;
    }
    Matrix s(p, p);
    std::vector<double> r(p);
    for (int i = 0; i < n; ++i) {
        const double* row = data.features.values.row_ptr(i);
        const auto& m = data.labels[i] == 1 ? m1 : m2;
        for (int j = 0; j < p; ++j) r[j] = row[j] - m[j];
        for (int j = 0; j < p; ++j) {
            double* sj = s.row_ptr(j);
            const double rj = r[j];
            for (int k = j; k < p; ++k) sj[k] += rj * r[k];
        }
    }
    for (int j = 0; j < p; ++j)
        for (int k = j; k < p; ++k) {
            const double v = s(j, k) / n;
            s(j, k) = v;
            s(k, j) = v;
        }
    return s;
}

inline LdaModel fit_lda(const LabeledDataset& train, const Matrix& omega_hat) {
    train.validate();
    const int p = train.p();
    if (omega_hat.rows() != p || omega_hat.cols() != p)
        throw DimensionMismatch("fit_lda: omega dimension mismatch");
    if (omega_hat.max_abs_asymmetry() > 1e-10)
        throw NotSymmetric("fit_lda: omega not symmetric");
    LdaModel model;
    model.omega = omega_hat;
    model.mu1.assign(p, 0.0);
    model.mu2.assign(p, 0.0);
    int n1 = 0, n2 = 0;
    for (int i = 0; i < train.n(); ++i) {
        const double* row = train.features.values.row_ptr(i);
        if (train.labels[i] == 1) {
            ++n1;
            for (int j = 0; j < p; ++j) model.mu1[j] += row[j];
        } else {
            ++n2;
            for (int j = 0; j < p; ++j) model.mu2[j] += row[j];
        }
    }
    if (n1 == 0 || n2 == 0) throw InsufficientClassSize("fit_lda: both classes required");
    for (int j = 0; j < p; ++j) {
        model.mu1[j] /= n1;
        model.mu2[j] /= n2;
    }
    model.pi1 = static_cast<double>(n1) / train.n();
    model.pi2 = static_cast<double>(n2) / train.n();
    return model;
}

/// Linear discriminant score delta_k(x) = x' Omega mu_k - mu_k' Omega mu_k / 2 + log pi_k.
inline double discriminant_score(const LdaModel& model, const double* x,
                                 const std::vector<double>& mu, double pi) {
    const int p = model.omega.rows();
    std::vector<double> om = matvec(model.omega, mu);
    double xt = 0.0, mt = 0.0;
    for (int j = 0; j < p; ++j) {
        xt += x[j] * om[j];
        mt += mu[j] * om[j];
    }
    return xt - 0.5 * mt + std::log(pi);
}

/// argmax_k delta_k(x); exact ties go to class 1.
inline int predict(const LdaModel& model, const double* x) {
    const double d1 = discriminant_score(model, x, model.mu1, model.pi1);
    const double d2 = discriminant_score(model, x, model.mu2, model.pi2);
    return d1 >= d2 ? 1 : 2;
}

inline std::vector<int> predict_all(const LdaModel& model, const DataMatrix& x) {
    std::vector<int> out(x.n());
    for (int i = 0; i < x.n(); ++i) out[i] = predict(model, x.values.row_ptr(i));
    return out;
}

/// Class 1 is positive. A zero MCC denominator reports 0; empty
/// specificity/sensitivity denominators also report 0.
inline ClassificationMetrics classification_metrics(const std::vector<int>& predicted,
                                                    const std::vector<int>& actual) {
    if (predicted.size() != actual.size())
        throw DimensionMismatch("classification_metrics: length mismatch");
    ClassificationMetrics m;
    for (size_t i = 0; i < predicted.size(); ++i) {
        const bool pred_pos = predicted[i] == 1;
        const bool act_pos = actual[i] == 1;
        if (act_pos)
            pred_pos ? ++m.tp : ++m.fn;
        else
            pred_pos ? ++m.fp : ++m.tn;
    }
    m.specificity = (m.tn + m.fp) > 0 ? static_cast<double>(m.tn) / (m.tn + m.fp) : 0.0;
    m.sensitivity = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    const double denom = std::sqrt(static_cast<double>(m.tp + m.fp)) *
                         std::sqrt(static_cast<double>(m.tp + m.fn)) *
                         std::sqrt(static_cast<double>(m.tn + m.fp)) *
                         std::sqrt(static_cast<double>(m.tn + m.fn));
    m.mcc = denom > 0.0 ? (static_cast<double>(m.tp) * m.tn - static_cast<double>(m.fp) * m.fn) /
                              denom
                        : 0.0;
    return m;
}

struct PipelineConfig {
    int test_count1 = 5;
    int test_count2 = 16;
    int n_features = 113;
    int cv_folds = 6;
    int reps = 100;
    int lambda_grid_size = 50;
    double grid_lo_factor = 0.01;
    double grid_hi_factor = 4.0;
    uint64_t master_seed = 0;
    double zero_tol = 1e-3;
    EstimateOptions estimate;
    int threads = 1;
};

struct PipelineRep {
    ClassificationMetrics metrics;
    double chosen_lambda = 0.0;
    long nonzero_entries = 0;
};

struct PipelineReport {
    std::vector<PipelineRep> reps;
    Aggregate specificity, sensitivity, mcc, nonzero_entries, chosen_lambda;
};

namespace classify_detail {

// Stratified contiguous fold blocks of a seeded per-class permutation.
inline std::vector<int> fold_assignment(const std::vector<int>& labels, int folds, Rng& rng) {
    const int n = static_cast<int>(labels.size());
    std::vector<int> assign(n, 0);
    for (int cls = 1; cls <= 2; ++cls) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (labels[i] == cls) idx.push_back(i);
        shuffle_indices(idx, rng);
        const int nc = static_cast<int>(idx.size());
        for (int k = 0; k < nc; ++k)
            assign[idx[k]] = static_cast<int>((static_cast<long>(k) * folds) / nc);
    }
    return assign;
}

inline LabeledDataset rows_subset(const LabeledDataset& data, const std::vector<int>& rows) {
    LabeledDataset out;
    Matrix m(static_cast<int>(rows.size()), data.p());
    for (size_t i = 0; i < rows.size(); ++i) {
        std::copy(data.features.values.row_ptr(rows[i]),
                  data.features.values.row_ptr(rows[i]) + data.p(),
                  m.row_ptr(static_cast<int>(i)));
        out.labels.push_back(data.labels[rows[i]]);
    }
    out.features = DataMatrix(std::move(m));
    return out;
}

} // namespace classify_detail

/// K-fold cross-validated lambda on a labeled training set: each fold fits
/// the estimator on the pooled within-class covariance of the remaining
/// rows and scores the likelihood loss on the held-out fold's covariance;
/// the lambda with smallest average loss wins (ties toward smaller lambda).
inline double kfold_cv_lambda(const LabeledDataset& train, const std::vector<double>& grid,
                              int folds, uint64_t seed, const EstimateOptions& opts) {
    const int n = train.n();
    if (folds < 2 || folds > n) throw Error("kfold_cv_lambda: bad fold count");
    Rng rng(seed);
    const std::vector<int> assign = classify_detail::fold_assignment(train.labels, folds, rng);

    std::vector<double> score(grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        std::vector<int> fit_rows, valid_rows;
        for (int i = 0; i < n; ++i) (assign[i] == f ? valid_rows : fit_rows).push_back(i);
        if (valid_rows.size() < 2 || fit_rows.size() < 2)
            throw Error("kfold_cv_lambda: fold too small");
        const LabeledDataset fit = classify_detail::rows_subset(train, fit_rows);
        const LabeledDataset valid = classify_detail::rows_subset(train, valid_rows);
        const Matrix sigma_fit = pooled_within_class_covariance(fit);
        const Matrix sigma_valid = pooled_within_class_covariance(valid);
        const double rho = auto_rho(sigma_fit, fit.n());
        for (size_t g = 0; g < grid.size(); ++g) {
            PrecisionEstimate est = clime_estimate(sigma_fit, grid[g], rho, opts);
            double loss;
            try {
                loss = likelihood_loss(sigma_valid, est.omega);
            } catch (const NotPositiveDefinite&) {
                loss = std::numeric_limits<double>::infinity();
            }
            score[g] += loss;
        }
    }
    size_t best = 0;
    for (size_t g = 1; g < grid.size(); ++g)
        if (score[g] < score[best]) best = g;
    if (!std::isfinite(score[best]))
        throw AllInfeasible("kfold_cv_lambda: every grid point scored +infinity");
    return grid[best];
}

/// Full repeated protocol: stratified split, t-test screening on the
/// training rows, train-statistic standardization, K-fold CV for lambda,
/// estimator fit on the pooled training covariance, LDA on the test rows.
inline PipelineReport pcr_pipeline(const LabeledDataset& dataset, const PipelineConfig& cfg) {
    dataset.validate();
    if (cfg.n_features > dataset.p())
        throw Error("pcr_pipeline: n_features exceeds feature count");
    if (cfg.reps < 1) throw Error("pcr_pipeline: reps must be >= 1");

    PipelineReport report;
    report.reps.resize(cfg.reps);

    parallel_for(cfg.reps, cfg.threads, [&](int r) {
        const uint64_t stream = derive_stream(cfg.master_seed, r);
        auto [train_full, test_full] =
            stratified_split(dataset, cfg.test_count1, cfg.test_count2, derive_stream(stream, 0));

        const std::vector<double> tstats = t_statistics(train_full);
        const std::vector<int> features = select_top_features(tstats, cfg.n_features);
        LabeledDataset train = take_feature_subset(train_full, features);
        LabeledDataset test = take_feature_subset(test_full, features);

        const std::vector<double> means = column_means(train.features);
        const std::vector<double> sds = column_sds(train.features);
        train.features = standardize_columns(train.features, means, sds);
        test.features = standardize_columns(test.features, means, sds);

        const std::vector<double> grid =
            lambda_grid(cfg.lambda_grid_size, train.n(), train.p(), cfg.grid_lo_factor,
                        cfg.grid_hi_factor);
        const double lam =
            kfold_cv_lambda(train, grid, cfg.cv_folds, derive_stream(stream, 1), cfg.estimate);

        const Matrix sigma_train = pooled_within_class_covariance(train);
        const double rho = auto_rho(sigma_train, train.n());
        const PrecisionEstimate est = clime_estimate(sigma_train, lam, rho, cfg.estimate);

        const LdaModel model = fit_lda(train, est.omega);
        const std::vector<int> predicted = predict_all(model, test.features);

        PipelineRep rep;
        rep.metrics = classification_metrics(predicted, test.labels);
        rep.chosen_lambda = lam;
        for (double v : est.omega.data())
            if (std::abs(v) > cfg.zero_tol) ++rep.nonzero_entries;
        report.reps[r] = rep;
    });

    std::vector<double> spec, sens, mcc, nnz, lam;
    for (const auto& r : report.reps) {
        spec.push_back(r.metrics.specificity);
        sens.push_back(r.metrics.sensitivity);
        mcc.push_back(r.metrics.mcc);
        nnz.push_back(static_cast<double>(r.nonzero_entries));
        lam.push_back(r.chosen_lambda);
    }
    report.specificity = sim_detail::aggregate(spec);
    report.sensitivity = sim_detail::aggregate(sens);
    report.mcc = sim_detail::aggregate(mcc);
    report.nonzero_entries = sim_detail::aggregate(nnz);
    report.chosen_lambda = sim_detail::aggregate(lam);
    return report;
}

} // namespace clime
