#pragma once

// Weighted l1-synthesis under one linear equality constraint,
//
//     minimize  sum_i w_i |(A g)_i|   subject to  r^T g = c,
//
// and the iteratively reweighted refinement built on top of it.
//
// The inner problem is solved as the linear program
//
//     minimize  w^T t   s.t.  A g - t <= 0,  -A g - t <= 0,  r^T g = c
//
// with a Mehrotra predictor-corrector primal-dual interior-point method. The
// slack/dual pairs for the two inequality blocks are (s1, z1) and (s2, z2).
// Eliminating the step in t leaves an N x N normal-equations matrix
// A^T diag(4 d1 d2 / (d1 + d2)) A, d = z / s, bordered by r.

#include "graphdeconv/gsp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace graphdeconv {

struct L1SynthesisProblem {
    Matrix design;   // M x N
    Vector r;        // N
    double c = 0.0;
    Vector weights;  // M, strictly positive

    /// Unweighted problem with the default constraint 1^T g = N.
    static L1SynthesisProblem standard(Matrix design) {
        const Index n = design.cols();
        const Index m = design.rows();
        return {std::move(design), Vector::Ones(n), static_cast<double>(n), Vector::Ones(m)};
    }

    void validate() const {
        detail::require_dims(design.cols() == r.size() && design.rows() == weights.size(),
                             "L1SynthesisProblem: design, r and weights");
        if (design.cols() == 0 || design.rows() == 0) throw DomainError("empty design matrix");
        if (r.cwiseAbs().maxCoeff() == 0.0) throw DomainError("constraint vector r must be nonzero");
        if (c == 0.0 || !std::isfinite(c)) throw DomainError("constraint value c must be finite and nonzero");
        if (!(weights.array() > 0.0).all() || !weights.allFinite())
            throw DomainError("weights must be positive and finite");
        if (!design.allFinite()) throw DomainError("design matrix has non-finite entries");
    }
};

struct SolverConfig {
    double tolerance = 1e-9;        // relative residual / duality-gap tolerance of the inner solve
    int max_inner_iterations = 0;   // 0: use 50 * N * P
    double delta = 0.0;             // reweighting damping; 0: 1e-3 * max(1, max|vec(X1)|)
    double outer_tolerance = 1e-6;  // stop when ||X(t) - X(t-1)||_F <= this
    int max_outer_iterations = 4;

    void validate() const {
        if (!(tolerance > 0.0) || !(outer_tolerance > 0.0))
            throw DomainError("solver tolerances must be positive");
        if (max_inner_iterations < 0 || max_outer_iterations < 1)
            throw DomainError("iteration limits must be positive");
        if (delta < 0.0) throw DomainError("delta must be positive (or 0 for the default)");
    }
};

struct Solution {
    FrequencyResponse g_hat;
    Matrix X_hat;
    double objective = 0.0;  // weighted objective of the last inner solve
    int iterations = 0;      // inner IPM iterations (solve) or outer rounds (reweighted)
    bool converged = false;
    // Reweighted runs only.
    bool outer_converged = false;
    int total_inner_iterations = 0;
    std::vector<double> unweighted_objectives;
};

namespace detail {

inline double max_step(const Vector& v, const Vector& dv) {
    double alpha = 1.0;
    for (Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
    return alpha;
}

struct IpmResult {
    Vector g;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Bordered solve for the reduced KKT system. K = A^T E A is factored in
/// extended precision with a tiny ridge, and a few refinement steps run
/// against the unregularized K.
class ReducedKkt {
public:
    using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using WideVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

    ReducedKkt(const Matrix& a, const Vector& r, const Vector& e) : r_(r) {
        const Wide aw = a.cast<long double>();
        Wide k = aw.transpose() * e.cast<long double>().asDiagonal() * aw;
        k_ = k.cast<double>();
        k.diagonal().array() += 1e-17L * std::max(1.0L, k.diagonal().maxCoeff());
        ldlt_.compute(k);
        kinv_r_ = ldlt_.solve(r_.cast<long double>());
        rkr_ = r_.cast<long double>().dot(kinv_r_);
    }

    /// Solves [K r; r^T 0] [dg; dy] = [bg; -req].
    void solve(const Vector& bg, double req, Vector& dg, double& dy) const {
        solve_once(bg, -req, dg, dy);
        for (int k = 0; k < 2; ++k) {
            const Vector res_g = bg - k_ * dg - dy * r_;
            const double res_e = -req - r_.dot(dg);
            Vector cg;
            double cy = 0.0;
            solve_once(res_g, res_e, cg, cy);
            dg += cg;
            dy += cy;
        }
    }

private:
    void solve_once(const Vector& bg, double be, Vector& dg, double& dy) const {
        const WideVector kinv_b = ldlt_.solve(bg.cast<long double>());
        const long double y = (r_.cast<long double>().dot(kinv_b) - be) / rkr_;
        dg = (kinv_b - y * kinv_r_).cast<double>();
        dy = static_cast<double>(y);
    }

    const Vector& r_;
    Matrix k_;
    Eigen::LDLT<Wide> ldlt_;
    WideVector kinv_r_;
    long double rkr_ = 0.0L;
};

inline IpmResult solve_weighted_l1_ipm(const L1SynthesisProblem& pb, const SolverConfig& cfg,
                                       const std::optional<Vector>& warm_start) {
    const Matrix& a = pb.design;
    // the minimizer is invariant to a positive rescaling of w
    const Vector w = pb.weights / pb.weights.maxCoeff();
    const Index m = a.rows();
    const Index n = a.cols();
    const double rr = pb.r.squaredNorm();
    const int max_iter = cfg.max_inner_iterations > 0
                             ? cfg.max_inner_iterations
                             : static_cast<int>(std::max<Index>(50, 50 * m));

    auto project = [&](Vector g) {
        g += ((pb.c - pb.r.dot(g)) / rr) * pb.r;
        return g;
    };

    Vector g = project(warm_start && warm_start->size() == n ? *warm_start : Vector(pb.r * (pb.c / rr)));
    Vector ag = a * g;
    const double margin = std::max(1.0, 0.1 * ag.cwiseAbs().maxCoeff());
    Vector t = ag.cwiseAbs().array() + margin;
    Vector s1 = t - ag;
    Vector s2 = t + ag;
    Vector z1 = 0.5 * w;
    Vector z2 = 0.5 * w;
    double y = 0.0;

    const double scale_w = std::max(1.0, w.cwiseAbs().maxCoeff());
    const double scale_c = std::max(1.0, std::abs(pb.c));

    IpmResult best;
    best.g = g;
    best.objective = (w.array() * ag.array().abs()).sum();
    double best_merit = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iter; ++iter) {
        ag.noalias() = a * g;
        // residuals of: q + G^T z + A_eq^T y = 0, G x + s = h, A_eq x = b
        const Vector rd_g = a.transpose() * (z1 - z2) + y * pb.r;
        const Vector rd_t = w - z1 - z2;
        const Vector rp1 = ag - t + s1;
        const Vector rp2 = -ag - t + s2;
        const double req = pb.r.dot(g) - pb.c;

        const double gap = s1.dot(z1) + s2.dot(z2);
        const double mu = gap / static_cast<double>(2 * m);
        const double pobj = w.dot(t);
        const double dobj = -pb.c * y;

        const double pres = std::max({rp1.lpNorm<Eigen::Infinity>(), rp2.lpNorm<Eigen::Infinity>()}) /
                                 std::max(1.0, t.lpNorm<Eigen::Infinity>()) +
                             std::abs(req) / scale_c;
        const double dres = std::max(rd_g.lpNorm<Eigen::Infinity>(), rd_t.lpNorm<Eigen::Infinity>()) / scale_w;
        const double rel_gap = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));

        const double merit = std::max({pres, dres, rel_gap});
        if (merit < best_merit) {
            best_merit = merit;
            best.g = g;
            best.iterations = iter;
        }
        if (pres <= cfg.tolerance && dres <= cfg.tolerance && rel_gap <= cfg.tolerance &&
            gap / std::max(1.0, std::abs(pobj)) <= cfg.tolerance) {
            best.g = g;
            best.iterations = iter;
            best.converged = true;
            break;
        }

        const Vector d1 = z1.cwiseQuotient(s1);
        const Vector d2 = z2.cwiseQuotient(s2);
        const Vector dsum = d1 + d2;
        const Vector e = 4.0 * d1.cwiseProduct(d2).cwiseQuotient(dsum);
        const Vector mix = (d2 - d1).cwiseQuotient(dsum);
        const ReducedKkt kkt(a, pb.r, e);

        // Newton step for residuals (rd_g, rd_t, rp1, rp2, req) and a
        // complementarity target rc = s o z - target.
        struct Step {
            Vector dg, dt, ds1, ds2, dz1, dz2;
            double dy = 0.0;
        };
        struct Rhs {
            Vector dg, dt, p1, p2;
            double eq = 0.0;
            Vector c1, c2;
        };
        auto reduced_solve = [&](const Rhs& rhs) {
            Step st;
            // u = S^{-1} (Z rp - rc)
            const Vector u1 = (z1.cwiseProduct(rhs.p1) - rhs.c1).cwiseQuotient(s1);
            const Vector u2 = (z2.cwiseProduct(rhs.p2) - rhs.c2).cwiseQuotient(s2);
            // b_x = -rd - G^T u
            const Vector bg = -rhs.dg - a.transpose() * (u1 - u2);
            const Vector bt = -rhs.dt + u1 + u2;
            const Vector bg_red = bg - a.transpose() * mix.cwiseProduct(bt);
            kkt.solve(bg_red, rhs.eq, st.dg, st.dy);
            const Vector adg = a * st.dg;
            st.dt = (bt - (d2 - d1).cwiseProduct(adg)).cwiseQuotient(dsum);
            // ds = -rp - G dx
            st.ds1 = -rhs.p1 - (adg - st.dt);
            st.ds2 = -rhs.p2 - (-adg - st.dt);
            // dz = D G dx + u
            st.dz1 = d1.cwiseProduct(adg - st.dt) + u1;
            st.dz2 = d2.cwiseProduct(-adg - st.dt) + u2;
            return st;
        };
        // Iterative refinement against the full linearization, kept going
        // while the residual still shrinks by at least half.
        auto newton = [&](const Vector& rc1, const Vector& rc2) {
            Step st = reduced_solve({rd_g, rd_t, rp1, rp2, req, rc1, rc2});
            Step best_st = st;
            double prev_norm = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 10; ++k) {
                const Vector adg = a * st.dg;
                Rhs res{a.transpose() * (st.dz1 - st.dz2) + st.dy * pb.r + rd_g,
                        -st.dz1 - st.dz2 + rd_t,
                        adg - st.dt + st.ds1 + rp1,
                        -adg - st.dt + st.ds2 + rp2,
                        pb.r.dot(st.dg) + req,
                        z1.cwiseProduct(st.ds1) + s1.cwiseProduct(st.dz1) + rc1,
                        z2.cwiseProduct(st.ds2) + s2.cwiseProduct(st.dz2) + rc2};
                const double norm = std::max({res.dg.lpNorm<Eigen::Infinity>(), res.dt.lpNorm<Eigen::Infinity>(),
                                              res.p1.lpNorm<Eigen::Infinity>(), res.p2.lpNorm<Eigen::Infinity>(),
                                              std::abs(res.eq)});
                if (norm <= prev_norm) best_st = st;
                if (!(norm <= 0.5 * prev_norm)) break;
                prev_norm = norm;
                const Step corr = reduced_solve(res);
                Step next = st;
                next.dg += corr.dg;
                next.dt += corr.dt;
                next.ds1 += corr.ds1;
                next.ds2 += corr.ds2;
                next.dz1 += corr.dz1;
                next.dz2 += corr.dz2;
                next.dy += corr.dy;
                if (!next.dg.allFinite() || !std::isfinite(next.dy)) break;
                st = std::move(next);
            }
            return best_st;
        };

        // predictor
        const Vector sz1 = s1.cwiseProduct(z1);
        const Vector sz2 = s2.cwiseProduct(z2);
        const Step aff = newton(sz1, sz2);
        const double ap_aff = std::min(max_step(s1, aff.ds1), max_step(s2, aff.ds2));
        const double ad_aff = std::min(max_step(z1, aff.dz1), max_step(z2, aff.dz2));
        const double mu_aff = ((s1 + ap_aff * aff.ds1).dot(z1 + ad_aff * aff.dz1) +
                               (s2 + ap_aff * aff.ds2).dot(z2 + ad_aff * aff.dz2)) /
                              static_cast<double>(2 * m);
        const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

        // corrector
        const Vector rc1 = sz1 + aff.ds1.cwiseProduct(aff.dz1) - Vector::Constant(m, sigma * mu);
        const Vector rc2 = sz2 + aff.ds2.cwiseProduct(aff.dz2) - Vector::Constant(m, sigma * mu);
        const Step st = newton(rc1, rc2);
        if (!st.dg.allFinite() || !std::isfinite(st.dy)) break;

        const double ap = std::min(1.0, 0.995 * std::min(max_step(s1, st.ds1), max_step(s2, st.ds2)));
        const double ad = std::min(1.0, 0.995 * std::min(max_step(z1, st.dz1), max_step(z2, st.dz2)));

        g += ap * st.dg;
        t += ap * st.dt;
        s1 += ap * st.ds1;
        s2 += ap * st.ds2;
        z1 += ad * st.dz1;
        z2 += ad * st.dz2;
        y += ad * st.dy;
        best.iterations = iter + 1;
    }

    if (!best.converged) best.iterations = max_iter;
    best.g = project(best.g);
    best.objective = (pb.weights.array() * (a * best.g).array().abs()).sum();
    return best;
}

}  // namespace detail

/// One weighted l1-synthesis solve. Never throws on non-convergence; the
/// best iterate is returned with converged = false instead.
inline Solution solve_l1_synthesis(const L1SynthesisProblem& problem, const SolverConfig& config = {},
                                   const std::optional<Vector>& warm_start = std::nullopt) {
    problem.validate();
    config.validate();
    const auto res = detail::solve_weighted_l1_ipm(problem, config, warm_start);
    const Index n = problem.design.cols();
    Solution sol;
    sol.g_hat = {res.g};
    sol.objective = res.objective;
    sol.iterations = res.iterations;
    sol.converged = res.converged;
    sol.total_inner_iterations = res.iterations;
    if (problem.design.rows() % n == 0) sol.X_hat = unvec(problem.design * res.g, n, problem.design.rows() / n);
    return sol;
}

/// Column-major unvec of design * g_hat.
inline Matrix reconstruct_sources(const DesignMatrix& design, const FrequencyResponse& g_hat) {
    detail::require_dims(design.matrix.cols() == g_hat.size(), "reconstruct_sources");
    return unvec(design.matrix * g_hat.values, design.n_nodes, design.n_signals);
}

/// Iteratively reweighted l1: w = 1, then repeatedly solve, synthesize X and
/// set w_i = 1 / (|vec(X)_i| + delta) until X stops moving.
inline Solution reweighted_l1(const Matrix& design, const Vector& r, double c, const SolverConfig& config = {}) {
    config.validate();
    const Index n = design.cols();
    const Index m = design.rows();
    detail::require_dims(n > 0 && m % n == 0, "reweighted_l1: design must be NP x N");
    const Index p = m / n;

    L1SynthesisProblem problem{design, r, c, Vector::Ones(m)};
    problem.validate();

    Solution out;
    out.converged = true;
    Vector x_prev = Vector::Zero(m);
    std::optional<Vector> warm;
    double delta = config.delta;

    for (int round = 1; round <= config.max_outer_iterations; ++round) {
        const auto res = detail::solve_weighted_l1_ipm(problem, config, warm);
        out.total_inner_iterations += res.iterations;
        out.converged = out.converged && res.converged;
        const Vector x = design * res.g;
        out.unweighted_objectives.push_back(x.lpNorm<1>());
        out.g_hat = {res.g};
        out.objective = res.objective;
        out.iterations = round;

        if (round == 1 && delta <= 0.0) delta = 1e-3 * std::max(1.0, x.cwiseAbs().maxCoeff());
        const double moved = (x - x_prev).norm();
        x_prev = x;
        warm = res.g;
        if (moved <= config.outer_tolerance) {
            out.outer_converged = true;
            break;
        }
        problem.weights = (x.cwiseAbs().array() + delta).inverse();
    }
    out.X_hat = unvec(x_prev, n, p);
    return out;
}

inline Solution reweighted_l1(const DesignMatrix& design, const Vector& r, double c, const SolverConfig& config = {}) {
    return reweighted_l1(design.matrix, r, c, config);
}

/// H^ = V diag(1 / g_hat) V^T.
inline Matrix estimate_filter(const Matrix& eigvecs, const FrequencyResponse& g_hat,
                              std::optional<double> tol = std::nullopt) {
    detail::require_dims(eigvecs.cols() == g_hat.size() && eigvecs.rows() == eigvecs.cols(), "estimate_filter");
    const FrequencyResponse h = inverse_response(g_hat, tol);
    return eigvecs * h.values.asDiagonal() * eigvecs.transpose();
}

}  // namespace graphdeconv
