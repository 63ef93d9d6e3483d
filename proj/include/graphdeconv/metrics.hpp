#pragma once

#include "graphdeconv/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace graphdeconv {

/// ||X_hat - X0||_F / ||X0||_F.
inline double rel_error(const Matrix& x_hat, const Matrix& x0) {
    detail::require_dims(x_hat.rows() == x0.rows() && x_hat.cols() == x0.cols(), "rel_error");
    const double denom = x0.norm();
    if (!(denom > 0.0)) throw DomainError("relative error is undefined for a zero reference");
    return (x_hat - x0).norm() / denom;
}

/// supp_kappa(M) = {(i, j) : |M_ij| > kappa}, on raw entries.
inline Mask support_kappa(const Matrix& m, double kappa) {
    if (!(kappa >= 0.0)) throw DomainError("kappa must be nonnegative");
    return (m.array().abs() > kappa).matrix();
}

/// |supp_k(X_hat) & supp_k(X0)| / |supp_k(X0)|.
inline double support_accuracy(const Matrix& x_hat, const Matrix& x0, double kappa = 0.1) {
    detail::require_dims(x_hat.rows() == x0.rows() && x_hat.cols() == x0.cols(), "support_accuracy");
    const Mask truth = support_kappa(x0, kappa);
    const Mask est = support_kappa(x_hat, kappa);
    const auto n_true = truth.count();
    if (n_true == 0) throw DomainError("support accuracy is undefined for an empty reference support");
    return static_cast<double>((truth.array() && est.array()).count()) / static_cast<double>(n_true);
}

/// Area under the ROC curve via the Mann-Whitney U statistic with average
/// ranks, so ties contribute one half.
inline double auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    detail::require_dims(scores.size() == labels.size(), "auc: scores and labels");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (bool l : labels) n_pos += l ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DomainError("AUC needs both positive and negative labels");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]]) pos_rank_sum += avg_rank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

}  // namespace graphdeconv
