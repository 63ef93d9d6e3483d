#include "graphdeconv/solver.hpp"
#include "graphdeconv/synth.hpp"
#include "lp_oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace graphdeconv;
using graphdeconv::testing::lp_oracle;
using graphdeconv::testing::random_matrix;
using graphdeconv::testing::random_symmetric;
using graphdeconv::testing::random_vector;

namespace {

struct Planted {
    Matrix v;
    FrequencyResponse g0;
    SourceMatrix x0;
    Matrix y;
    DesignMatrix design;
};

Planted planted(Index n, Index p, double alpha, double theta, std::uint64_t seed) {
    Planted out;
    const Graph g = gen_er_graph(n, 0.4, RngSeed(seed, {0}));
    out.v = eig_sym(build_gso(g, ShiftKind::NormalizedAdjacency)).eigvecs;
    out.g0 = gen_inverse_filter(n, alpha, RngSeed(seed, {1}));
    out.x0 = gen_bernoulli_gaussian(n, p, theta, RngSeed(seed, {2}));
    out.y = apply_spectral_filter(out.v, inverse_response(out.g0), out.x0.values);
    out.design = khatri_rao_design(out.y, out.v);
    return out;
}

}  // namespace

TEST(L1Synthesis, TwoByTwoToy) {
    L1SynthesisProblem pb{Matrix::Identity(2, 2), Vector::Ones(2), 2.0, Vector::Ones(2)};
    const auto sol = solve_l1_synthesis(pb);
    EXPECT_TRUE(sol.converged);
    EXPECT_NEAR(sol.objective, 2.0, 1e-8);
    EXPECT_NEAR(sol.g_hat.values.sum(), 2.0, 1e-12);
}

TEST(L1Synthesis, MatchesVertexEnumerationOracle) {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (Index n = 2; n <= 6; ++n) {
        for (Index p = 1; p <= 4; ++p) {
            for (int rep = 0; rep < 6; ++rep) {
                Matrix a;
                if (rep % 2 == 0) {
                    a = random_matrix(n * p, n, rng);
                } else {
                    const Matrix v = graphdeconv::eig_sym(random_symmetric(n, rng)).eigvecs;
                    a = khatri_rao_design(random_matrix(n, p, rng), v).matrix;
                }
                Vector r = random_vector(n, rng);
                const double c = 1.0 + std::abs(random_vector(1, rng)(0));
                Vector w = Vector::Ones(n * p);
                if (rep >= 3) w = random_vector(n * p, rng).cwiseAbs().array() + 0.1;
                const auto ref = lp_oracle(a, r, c, w);
                ASSERT_GT(ref.vertices, 0);
                const auto sol = solve_l1_synthesis({a, r, c, w});
                EXPECT_TRUE(sol.converged) << "n=" << n << " p=" << p << " rep=" << rep;
                EXPECT_NEAR(r.dot(sol.g_hat.values), c, 1e-9 * c);
                EXPECT_NEAR(sol.objective, ref.objective, 1e-6 * std::max(1.0, ref.objective))
                    << "n=" << n << " p=" << p << " rep=" << rep;
                ++checked;
            }
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(L1Synthesis, NoRandomFeasiblePointBeatsSolution) {
    std::mt19937_64 rng(5);
    const Matrix a = random_matrix(12, 4, rng);
    const Vector r = Vector::Ones(4);
    const auto sol = solve_l1_synthesis(L1SynthesisProblem::standard(a));
    for (int k = 0; k < 10000; ++k) {
        Vector g = random_vector(4, rng) * 3.0;
        g.array() += (4.0 - r.dot(g)) / 4.0;
        EXPECT_GE((a * g).lpNorm<1>(), sol.objective - 1e-9 * sol.objective);
    }
    EXPECT_LE(sol.objective, (a * Vector::Ones(4)).lpNorm<1>() + 1e-9);
}

TEST(L1Synthesis, HomogeneousInConstraintValue) {
    std::mt19937_64 rng(8);
    const Matrix a = random_matrix(15, 5, rng);
    const Vector r = random_vector(5, rng);
    const Vector w = Vector::Ones(15);
    const auto s1 = solve_l1_synthesis({a, r, 1.0, w});
    const auto s3 = solve_l1_synthesis({a, r, 3.0, w});
    EXPECT_NEAR(s3.objective, 3.0 * s1.objective, 1e-7 * s3.objective);
    const auto sneg = solve_l1_synthesis({a, r, -2.0, w});
    EXPECT_NEAR(sneg.objective, 2.0 * s1.objective, 1e-7 * sneg.objective);
}

TEST(L1Synthesis, RejectsDegenerateInputs) {
    const Matrix a = Matrix::Identity(3, 3);
    EXPECT_THROW(solve_l1_synthesis({a, Vector::Zero(3), 1.0, Vector::Ones(3)}), DomainError);
    EXPECT_THROW(solve_l1_synthesis({a, Vector::Ones(3), 0.0, Vector::Ones(3)}), DomainError);
    Vector w = Vector::Ones(3);
    w(1) = 0.0;
    EXPECT_THROW(solve_l1_synthesis({a, Vector::Ones(3), 1.0, w}), DomainError);
    EXPECT_THROW(solve_l1_synthesis({a, Vector::Ones(2), 1.0, Vector::Ones(3)}), ContractViolation);
}

TEST(L1Synthesis, IdentityFilterRegime) {
    // H = I and sparse X: g = 1 is optimal, so X_hat = X0.
    const auto pl = planted(20, 20, 0.0, 0.1, 3);
    const auto sol = solve_l1_synthesis(L1SynthesisProblem::standard(pl.design.matrix));
    EXPECT_TRUE(sol.converged);
    EXPECT_LE((sol.g_hat.values - Vector::Ones(20)).norm(), 1e-6);
    EXPECT_LE((sol.X_hat - pl.x0.values).norm() / pl.x0.values.norm(), 1e-6);
}

TEST(L1Synthesis, SmallPerturbationRecovered) {
    const auto pl = planted(20, 20, 0.02, 0.1, 4);
    const auto sol = solve_l1_synthesis(L1SynthesisProblem::standard(pl.design.matrix));
    EXPECT_LE((sol.g_hat.values - pl.g0.values).norm() / pl.g0.values.norm(), 1e-6);
    EXPECT_LE((reconstruct_sources(pl.design, sol.g_hat) - sol.X_hat).norm(), 1e-12 * sol.X_hat.norm());
}

TEST(Reweighted, ExactInstanceStopsWithinTwoRounds) {
    const auto pl = planted(20, 20, 0.0, 0.1, 3);
    const auto sol = reweighted_l1(pl.design, Vector::Ones(20), 20.0);
    EXPECT_TRUE(sol.converged);
    EXPECT_TRUE(sol.outer_converged);
    EXPECT_LE(sol.iterations, 2);
    EXPECT_LE((sol.X_hat - pl.x0.values).norm() / pl.x0.values.norm(), 1e-6);
}

TEST(Reweighted, HugeDeltaMatchesSingleSolve) {
    // With delta >> |x| the weights are nearly uniform.
    const auto pl = planted(12, 6, 0.3, 0.2, 9);
    SolverConfig cfg;
    cfg.delta = 1e9;
    cfg.max_outer_iterations = 3;
    const auto rw = reweighted_l1(pl.design, Vector::Ones(12), 12.0, cfg);
    const auto single = solve_l1_synthesis(L1SynthesisProblem::standard(pl.design.matrix));
    EXPECT_LE((rw.g_hat.values - single.g_hat.values).norm() / single.g_hat.values.norm(), 1e-5);
    ASSERT_FALSE(rw.unweighted_objectives.empty());
    EXPECT_NEAR(rw.unweighted_objectives.front(), single.objective, 1e-7 * single.objective);
}

TEST(Reweighted, ConfigValidation) {
    SolverConfig cfg;
    cfg.max_outer_iterations = 0;
    EXPECT_THROW(reweighted_l1(Matrix::Identity(4, 2), Vector::Ones(2), 2.0, cfg), DomainError);
    EXPECT_THROW(reweighted_l1(Matrix::Identity(3, 2), Vector::Ones(2), 2.0), ContractViolation);
}

TEST(EstimateFilter, InvertsSpectralResponse) {
    std::mt19937_64 rng(3);
    const Matrix v = eig_sym(random_symmetric(6, rng)).eigvecs;
    EXPECT_LE((estimate_filter(v, {Vector::Ones(6)}) - Matrix::Identity(6, 6)).norm(), 1e-12);
    Vector g = Vector::Constant(6, 2.0);
    EXPECT_LE((estimate_filter(v, {g}) - 0.5 * Matrix::Identity(6, 6)).norm(), 1e-12);
    g(2) = 0.0;
    EXPECT_THROW(estimate_filter(v, {g}), InvertibilityError);
}
