#pragma once

#include <cmath>
#include <vector>

#include "clime/matrix.hpp"

namespace clime {

/// n x p data matrix; rows are observations.
struct DataMatrix {
    Matrix values;

    DataMatrix() = default;
    explicit DataMatrix(Matrix m) : values(std::move(m)) {}

    int n() const { return values.rows(); }
    int p() const { return values.cols(); }
};

inline std::vector<double> column_means(const DataMatrix& x) {
    const int n = x.n(), p = x.p();
    std::vector<double> m(p, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = x.values.row_ptr(i);
        for (int j = 0; j < p; ++j) m[j] += row[j];
    }
    for (int j = 0; j < p; ++j) m[j] /= n;
    return m;
}

/// Per-column standard deviation with divisor n-1 (the convention used for
/// the t-test and gene-standardization pipeline).
inline std::vector<double> column_sds(const DataMatrix& x) {
    const int n = x.n(), p = x.p();
    if (n < 2) throw TooFewSamples("column_sds: need n >= 2");
    std::vector<double> m = column_means(x);
    std::vector<double> s(p, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = x.values.row_ptr(i);
        for (int j = 0; j < p; ++j) {
            const double d = row[j] - m[j];
            s[j] += d * d;
        }
    }
    for (int j = 0; j < p; ++j) s[j] = std::sqrt(s[j] / (n - 1));
    return s;
}

/// Sample covariance with divisor n. Computes the upper triangle and
/// mirrors it, so the result is exactly symmetric.
inline Matrix sample_covariance(const DataMatrix& x) {
    const int n = x.n(), p = x.p();
    if (n < 2) throw TooFewSamples("sample_covariance: need n >= 2");
    std::vector<double> mean = column_means(x);
    Matrix s(p, p);
    for (int i = 0; i < n; ++i) {
        const double* row = x.values.row_ptr(i);
        for (int j = 0; j < p; ++j) {
            const double dj = row[j] - mean[j];
            double* sj = s.row_ptr(j);
            for (int k = j; k < p; ++k) sj[k] += dj * (row[k] - mean[k]);
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

/// Sigma + rho * I.
inline Matrix perturb(const Matrix& sigma, double rho) {
    if (!sigma.square()) throw DimensionMismatch("perturb: matrix not square");
    Matrix out = sigma;
    for (int i = 0; i < out.rows(); ++i) out(i, i) += rho;
    return out;
}

/// sqrt(log p / n), natural log.
inline double default_rho(int n, int p) {
    if (n < 1) throw Error("default_rho: n must be >= 1");
    if (p < 2) throw Error("default_rho: p must be >= 2");
    return std::sqrt(std::log(static_cast<double>(p)) / n);
}

/// Column j mapped to (x_j - means_j) / sds_j; statistics are supplied by
/// the caller so held-out data can reuse training moments.
inline DataMatrix standardize_columns(const DataMatrix& x, const std::vector<double>& means,
                                      const std::vector<double>& sds) {
    const int n = x.n(), p = x.p();
    if (static_cast<int>(means.size()) != p || static_cast<int>(sds.size()) != p)
        throw DimensionMismatch("standardize_columns: statistics length mismatch");
    for (int j = 0; j < p; ++j)
        if (!(sds[j] > 1e-12))
            throw ZeroVariance("standardize_columns: sd of column " + std::to_string(j) +
                               " is not positive");
    DataMatrix out = x;
    for (int i = 0; i < n; ++i) {
        double* row = out.values.row_ptr(i);
        for (int j = 0; j < p; ++j) row[j] = (row[j] - means[j]) / sds[j];
    }
    return out;
}

} // namespace clime
