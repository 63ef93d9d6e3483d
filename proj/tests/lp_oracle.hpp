#pragma once

// Brute-force reference for  min sum_i w_i |a_i^T g|  s.t.  r^T g = c.
// With rank(A) = N the objective is piecewise linear and bounded below, so a
// minimizer sits where N - 1 independent rows of A vanish together with the
// constraint. All such vertices are enumerated.

#include "graphdeconv/types.hpp"

#include <Eigen/LU>

#include <limits>
#include <vector>

namespace graphdeconv::testing {

struct OracleResult {
    double objective = std::numeric_limits<double>::infinity();
    Vector g;
    long vertices = 0;
};

inline OracleResult lp_oracle(const Matrix& a, const Vector& r, double c, const Vector& w) {
    const Index m = a.rows();
    const Index n = a.cols();
    OracleResult best;
    std::vector<Index> idx(static_cast<std::size_t>(n - 1));
    for (Index k = 0; k < n - 1; ++k) idx[static_cast<std::size_t>(k)] = k;

    Matrix sys(n, n);
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = c;
    while (true) {
        for (Index k = 0; k < n - 1; ++k) sys.row(k) = a.row(idx[static_cast<std::size_t>(k)]);
        sys.row(n - 1) = r.transpose();
        Eigen::FullPivLU<Matrix> lu(sys);
        lu.setThreshold(1e-10);
        if (lu.rank() == n) {
            const Vector g = lu.solve(rhs);
            const double obj = (w.array() * (a * g).array().abs()).sum();
            ++best.vertices;
            if (obj < best.objective) {
                best.objective = obj;
                best.g = g;
            }
        }
        // next combination in lexicographic order
        Index k = n - 2;
        while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - (n - 1) + k) --k;
        if (k < 0) break;
        ++idx[static_cast<std::size_t>(k)];
        for (Index j = k + 1; j < n - 1; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

}  // namespace graphdeconv::testing
