#pragma once

#include <cmath>
#include <vector>

#include "clime/lp.hpp"
#include "clime/matrix.hpp"

namespace clime {

namespace simplex_detail {

constexpr double kEps = 1e-9;

// Dense two-phase tableau simplex with Bland's rule for
//   min c.x  s.t.  A x = b, x >= 0   (b is made nonnegative first).
// Exact vertex arithmetic up to floating point; test-oracle scale only.
struct StandardForm {
    Matrix a;              // m x n
    std::vector<double> b; // m
    std::vector<double> c; // n
};

struct Tableau {
    int m, n; // rows, structural+artificial columns
    std::vector<std::vector<double>> t; // (m+1) x (n+1); last row = reduced costs
    std::vector<int> basis;
    int pivots = 0;

    void pivot(int row, int col) {
        const double piv = t[row][col];
        for (double& v : t[row]) v /= piv;
        for (int r = 0; r <= m; ++r) {
            if (r == row) continue;
            const double f = t[r][col];
            if (f == 0.0) continue;
            for (int cidx = 0; cidx <= n; ++cidx) t[r][cidx] -= f * t[row][cidx];
        }
        basis[row] = col;
        ++pivots;
    }

    // Bland: entering = lowest eligible index, leaving = ratio test with
    // lowest basic index on ties. `allowed` masks columns that may enter.
    bool iterate(const std::vector<bool>& allowed, int max_pivots) {
        while (true) {
            int col = -1;
            for (int j = 0; j < n; ++j) {
                if (!allowed[j]) continue;
                if (t[m][j] < -kEps) {
                    col = j;
                    break;
                }
            }
            if (col < 0) return true; // optimal
            int row = -1;
            double best = 0.0;
            for (int r = 0; r < m; ++r) {
                if (t[r][col] > kEps) {
                    const double ratio = t[r][n] / t[r][col];
                    if (row < 0 || ratio < best - kEps ||
                        (std::abs(ratio - best) <= kEps && basis[r] < basis[row])) {
                        row = r;
                        best = ratio;
                    }
                }
            }
            if (row < 0) throw Unbounded("simplex: unbounded direction");
            pivot(row, col);
            if (pivots > max_pivots)
                throw CyclingDetected("simplex: pivot limit exceeded");
        }
    }
};

inline std::vector<double> solve_standard_form(const StandardForm& sf, int& pivots_out) {
    const int m = sf.a.rows();
    const int ns = sf.a.cols();
    const int n = ns + m; // structural + one artificial per row

    Tableau tab;
    tab.m = m;
    tab.n = n;
    tab.t.assign(m + 1, std::vector<double>(n + 1, 0.0));
    tab.basis.assign(m, 0);

    for (int r = 0; r < m; ++r) {
        const double sign = sf.b[r] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < ns; ++j) tab.t[r][j] = sign * sf.a(r, j);
        tab.t[r][ns + r] = 1.0;
        tab.t[r][n] = sign * sf.b[r];
        tab.basis[r] = ns + r;
    }

    const int max_pivots = 200000;
    std::vector<bool> allowed(n, true);

    // phase 1: minimize the artificial sum
    for (int j = 0; j <= n; ++j) {
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += tab.t[r][j];
        tab.t[m][j] = (j >= ns && j < n) ? 1.0 - s : -s;
    }
    tab.iterate(allowed, max_pivots);
    // the objective cell holds -sum(artificials) in this sign convention
    if (std::abs(tab.t[m][n]) > 1e-7)
        throw Error("simplex: problem infeasible (phase 1 objective " +
                    std::to_string(-tab.t[m][n]) + ")");

    // phase 2: artificials may not re-enter
    for (int j = ns; j < n; ++j) allowed[j] = false;
    for (int j = 0; j <= n; ++j) tab.t[m][j] = j < ns ? sf.c[j] : 0.0;
    for (int r = 0; r < m; ++r) {
        const int bv = tab.basis[r];
        if (bv < ns && sf.c[bv] != 0.0) {
            const double f = sf.c[bv];
            for (int j = 0; j <= n; ++j) tab.t[m][j] -= f * tab.t[r][j];
        }
    }
    tab.iterate(allowed, max_pivots);

    pivots_out = tab.pivots;
    std::vector<double> x(ns, 0.0);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < ns) x[tab.basis[r]] = tab.t[r][n];
    return x;
}

} // namespace simplex_detail

/// Exact-vertex reference solution of the column LP via two-phase
/// standard-form simplex with Bland's rule. Intended for tests at small p.
inline LpSolution simplex_oracle(const ColumnLp& lp) {
    const Matrix& sigma = lp.sigma;
    const int p = sigma.rows();
    if (!sigma.square()) throw DimensionMismatch("simplex_oracle: sigma not square");
    if (lp.lambda < 0.0) throw Error("simplex_oracle: lambda must be >= 0");
    const int i = lp.target_index;

    // variables: beta+ (p), beta- (p), u (p), slacks s1..s4 (4p)
    const int nv = 7 * p;
    const int m = 4 * p;
    simplex_detail::StandardForm sf;
    sf.a = Matrix(m, nv);
    sf.b.assign(m, 0.0);
    sf.c.assign(nv, 0.0);
    for (int j = 0; j < p; ++j) sf.c[2 * p + j] = 1.0;

    for (int j = 0; j < p; ++j) {
        // beta_j - u_j + s1_j = 0
        sf.a(j, j) = 1.0;
        sf.a(j, p + j) = -1.0;
        sf.a(j, 2 * p + j) = -1.0;
        sf.a(j, 3 * p + j) = 1.0;
        // -beta_j - u_j + s2_j = 0
        sf.a(p + j, j) = -1.0;
        sf.a(p + j, p + j) = 1.0;
        sf.a(p + j, 2 * p + j) = -1.0;
        sf.a(p + j, 4 * p + j) = 1.0;
    }
    for (int k = 0; k < p; ++k) {
        const double e = (k == i) ? 1.0 : 0.0;
        for (int j = 0; j < p; ++j) {
            const double s = sigma(k, j);
            sf.a(2 * p + k, j) = s;
            sf.a(2 * p + k, p + j) = -s;
            sf.a(3 * p + k, j) = -s;
            sf.a(3 * p + k, p + j) = s;
        }
        sf.a(2 * p + k, 5 * p + k) = 1.0;
        sf.b[2 * p + k] = lp.lambda + e;
        sf.a(3 * p + k, 6 * p + k) = 1.0;
        sf.b[3 * p + k] = lp.lambda - e;
    }

    int pivots = 0;
    std::vector<double> x = simplex_detail::solve_standard_form(sf, pivots);

    LpSolution sol;
    sol.beta.resize(p);
    double obj = 0.0;
    for (int j = 0; j < p; ++j) {
        sol.beta[j] = x[j] - x[p + j];
        obj += x[2 * p + j];
    }
    sol.objective = obj;
    sol.iterations = pivots;
    sol.duality_gap = 0.0;
    sol.status = LpStatus::Optimal;
    return sol;
}

} // namespace clime
