#pragma once

// Source localization on rated cells: one blind-deconvolution solve on the
// observation matrix, then ranking of the rated cells by |X_hat| against
// ground-truth source labels, next to the naive ranking by |Y_obs|.

#include "graphdeconv/harness/ratings.hpp"
#include "graphdeconv/metrics.hpp"
#include "graphdeconv/solver.hpp"

#include <vector>

namespace graphdeconv::harness {

struct LabelSet {
    double theta_sr = 0.0;
    Mask labels;  // true on source cells; only rated cells are scored
};

struct LocalizationRow {
    double theta_sr = 0.0;
    double auc_solver = 0.0;
    double auc_naive = 0.0;
    Index n_sources = 0;
    Index n_scored = 0;
};

struct LocalizationResult {
    std::vector<LocalizationRow> rows;
    Solution solution;
};

/// Scores of the cells where `rated` is true, in column-major order.
inline std::vector<double> rated_scores(const Matrix& values, const Mask& rated) {
    std::vector<double> out;
    for (Index j = 0; j < values.cols(); ++j)
        for (Index i = 0; i < values.rows(); ++i)
            if (rated(i, j)) out.push_back(std::abs(values(i, j)));
    return out;
}

inline std::vector<bool> rated_labels(const Mask& labels, const Mask& rated) {
    std::vector<bool> out;
    for (Index j = 0; j < labels.cols(); ++j)
        for (Index i = 0; i < labels.rows(); ++i)
            if (rated(i, j)) out.push_back(labels(i, j));
    return out;
}

/// Solves with r = 1 and c = N, then reports solver and naive AUC per label set.
inline LocalizationResult run_source_localization(const Matrix& y_obs, const Mask& rated, const ShiftOperator& s,
                                                  const SolverConfig& config, const std::vector<LabelSet>& label_sets) {
    const Index n = y_obs.rows();
    detail::require_dims(s.matrix.rows() == n && rated.rows() == n && rated.cols() == y_obs.cols(),
                         "run_source_localization: S, Y_obs and rated mask");
    if (y_obs.cwiseAbs().maxCoeff() == 0.0) throw DomainError("observation matrix is identically zero");

    const auto dec = eig_sym(s);
    const DesignMatrix design = khatri_rao_design(y_obs, dec.eigvecs);
    LocalizationResult out;
    out.solution = reweighted_l1(design, Vector::Ones(n), static_cast<double>(n), config);

    const auto solver_scores = rated_scores(out.solution.X_hat, rated);
    const auto naive_scores = rated_scores(y_obs, rated);
    for (const auto& set : label_sets) {
        detail::require_dims(set.labels.rows() == n && set.labels.cols() == y_obs.cols(),
                             "run_source_localization: labels");
        const auto labels = rated_labels(set.labels, rated);
        LocalizationRow row;
        row.theta_sr = set.theta_sr;
        row.n_scored = static_cast<Index>(labels.size());
        for (bool l : labels) row.n_sources += l ? 1 : 0;
        row.auc_solver = auc(solver_scores, labels);
        row.auc_naive = auc(naive_scores, labels);
        out.rows.push_back(row);
    }
    return out;
}

/// Ratings pipeline: center the ratings, build the GSO of the symmetrized
/// trust graph and score against the earliest-rating labels for each theta_sr.
inline LocalizationResult run_source_localization(const RatingsDataset& ds, ShiftKind kind,
                                                  const SolverConfig& config, const std::vector<double>& theta_grid) {
    if (ds.empty()) throw DomainError("dataset has no ratings");
    const Graph g = trust_graph(ds);
    if (!g.is_connected()) throw ValidationError("trust graph of the sampled users is not connected");
    std::vector<LabelSet> sets;
    for (double th : theta_grid) sets.push_back({th, earliest_source_labels(ds, th)});
    return run_source_localization(center_ratings(ds), rated_mask(ds), build_gso(g, kind), config, sets);
}

}  // namespace graphdeconv::harness
