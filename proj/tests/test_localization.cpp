#include "graphdeconv/harness/localization.hpp"
#include "planted_fixture.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace graphdeconv;
using namespace graphdeconv::harness;
using graphdeconv::testing::planted_localization;

TEST(Localization, PlantedSourcesBeatNaiveRanking) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto pl = planted_localization(seed);
        const auto res =
            run_source_localization(pl.y_obs, pl.rated, pl.shift, SolverConfig{}, {{0.0, pl.x0.support_mask()}});
        ASSERT_EQ(res.rows.size(), 1u);
        EXPECT_GE(res.rows[0].auc_solver, 0.9);
        EXPECT_GT(res.rows[0].auc_solver, res.rows[0].auc_naive);
        EXPECT_EQ(res.rows[0].n_scored, pl.rated.count());
    }
}

TEST(Localization, IdentityFilterMatchesNaive) {
    // H = I: the solver returns g = 1, so X_hat = Y_obs.
    const auto pl = planted_localization(4, 40, 30, 0.1, 0.05, 0.0);
    Mask labels = pl.rated;
    Index k = 0;
    for (Index j = 0; j < labels.cols(); ++j)
        for (Index i = 0; i < labels.rows(); ++i)
            if (labels(i, j)) labels(i, j) = (k++ % 3) == 0;
    const auto res = run_source_localization(pl.y_obs, pl.rated, pl.shift, SolverConfig{}, {{0.5, labels}});
    EXPECT_LE((res.solution.X_hat - pl.y_obs).norm(), 1e-6 * pl.y_obs.norm());
    EXPECT_NEAR(res.rows[0].auc_solver, res.rows[0].auc_naive, 1e-12);
}

TEST(Localization, ScoresInvariantToPositiveRescaling) {
    const auto pl = planted_localization(2);
    const std::vector<LabelSet> sets{{0.0, pl.x0.support_mask()}};
    const auto a = run_source_localization(pl.y_obs, pl.rated, pl.shift, SolverConfig{}, sets);
    const auto b = run_source_localization(7.5 * pl.y_obs, pl.rated, pl.shift, SolverConfig{}, sets);
    EXPECT_NEAR(a.rows[0].auc_solver, b.rows[0].auc_solver, 1e-12);
    EXPECT_EQ(a.rows[0].auc_naive, b.rows[0].auc_naive);
}

TEST(Localization, RejectsZeroObservations) {
    const auto pl = planted_localization(1);
    EXPECT_THROW(run_source_localization(Matrix::Zero(40, 30), pl.rated, pl.shift, SolverConfig{}, {}), DomainError);
}

TEST(Localization, DatasetPipelineRunsEndToEnd) {
    // ring of six users trusting their successor; three items
    std::istringstream trust("1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n");
    std::istringstream ratings(
        "1,10,5,1\n2,10,4,2\n3,10,3,3\n4,10,2,4\n"
        "2,20,1,5\n3,20,2,6\n5,20,4,7\n"
        "6,30,5,8\n1,30,4,9\n4,30,1,10\n");
    const auto ds = ingest_ratings(trust, ratings);
    const auto res = run_source_localization(ds, ShiftKind::NormalizedAdjacency, SolverConfig{}, {0.3, 0.5});
    ASSERT_EQ(res.rows.size(), 2u);
    for (const auto& row : res.rows) {
        EXPECT_GE(row.auc_solver, 0.0);
        EXPECT_LE(row.auc_solver, 1.0);
        EXPECT_EQ(row.n_scored, 10);
    }
    EXPECT_EQ(res.rows[0].n_sources, 4);  // ceil(0.3 * 4) + ceil(0.3 * 3) + ceil(0.3 * 3)
}

TEST(Localization, DisconnectedTrustGraphIsRejected) {
    std::istringstream trust("1 2\n3 4\n");
    std::istringstream ratings("1,10,5,1\n2,10,4,2\n3,10,3,3\n4,10,2,4\n");
    const auto ds = ingest_ratings(trust, ratings);
    EXPECT_THROW(run_source_localization(ds, ShiftKind::NormalizedAdjacency, SolverConfig{}, {0.5}), ValidationError);
}
