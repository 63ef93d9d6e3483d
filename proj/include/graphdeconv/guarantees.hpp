#pragma once

// Recovery certificates for the l1-synthesis estimator: the exact-recovery
// condition ||P (r o g0)||_2 <= c d0, the stable-recovery error bound and
// noise tolerance, and the scalar helpers behind the constants.

#include "graphdeconv/gsp.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace graphdeconv {

/// Free parameters of the exact/stable recovery conditions.
struct SigmaParams {
    double sigma1 = 0.0;  // (0, sqrt(pi) theta^{3/2} / 2]
    double sigma2 = 0.0;  // (0, sqrt(pi) theta / 2]
    double sigma3 = 0.1;  // > 0
    double sigma4 = 0.1;  // (0, 1)
    double sigma5 = 1.0;  // [0, 1]; 1 is the worst case
    double theta = 0.0;
    double delta_prob = 0.05;

    static double sigma1_max(double theta) { return std::sqrt(std::numbers::pi) * std::pow(theta, 1.5) / 2.0; }
    static double sigma2_max(double theta) { return std::sqrt(std::numbers::pi) * theta / 2.0; }

    /// sigma1, sigma2 at their upper limits; sigma3 = sigma4 = 0.1; sigma5 = 1.
    static SigmaParams defaults(double theta) {
        SigmaParams p;
        p.theta = theta;
        p.sigma1 = sigma1_max(theta);
        p.sigma2 = sigma2_max(theta);
        p.validate();
        return p;
    }

    /// Range checks. Theta is additionally limited to (0, 0.324] by
    /// validate_for_exact_recovery().
    void validate() const {
        if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0, 1)");
        const double tol = 1e-15;
        if (!(sigma1 > 0.0 && sigma1 <= sigma1_max(theta) * (1 + tol)))
            throw DomainError("sigma1 must lie in (0, sqrt(pi) theta^{3/2} / 2]");
        if (!(sigma2 > 0.0 && sigma2 <= sigma2_max(theta) * (1 + tol)))
            throw DomainError("sigma2 must lie in (0, sqrt(pi) theta / 2]");
        if (!(sigma3 > 0.0)) throw DomainError("sigma3 must be positive");
        if (!(sigma4 > 0.0 && sigma4 < 1.0)) throw DomainError("sigma4 must lie in (0, 1)");
        if (!(sigma5 >= 0.0 && sigma5 <= 1.0)) throw DomainError("sigma5 must lie in [0, 1]");
        if (!(delta_prob > 0.0 && delta_prob < 1.0)) throw DomainError("delta_prob must lie in (0, 1)");
    }

    void validate_for_exact_recovery() const {
        validate();
        if (theta > 0.324) throw DomainError("exact-recovery certificate requires theta <= 0.324");
    }
};

struct RecoveryCertificate {
    double lhs = 0.0;  // ||P (r o g0)||_2
    double rhs = 0.0;  // c * d0
    double d0 = 0.0;
    double sigma_max_U = std::numeric_limits<double>::quiet_NaN();
    bool satisfied = false;
};

enum class NormKind { L1, L2 };

struct StabilityReport {
    double Q = std::numeric_limits<double>::quiet_NaN();
    double numerator_factor_l1 = 0.0;  // ||diag(g0)(I - 1 (r o g0)^T / c)||_{1->2}
    double numerator_factor_l2 = 0.0;  // same, spectral norm
    double noise_l11 = 0.0;            // ||N_C||_{1,1}
    double noise_kr_norm = 0.0;        // ||N_C^T V (.) V||_{1->2}
    double denominator = 0.0;
    double error_bound_l1 = std::numeric_limits<double>::infinity();
    double error_bound_l2 = std::numeric_limits<double>::infinity();
    double noise_tolerance = std::numeric_limits<double>::infinity();
    bool denominator_positive = false;

    double error_bound(NormKind kind) const { return kind == NormKind::L1 ? error_bound_l1 : error_bound_l2; }
};

/// Largest column l2 norm, i.e. the induced 1 -> 2 operator norm.
inline double norm_1_to_2(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.colwise().norm().maxCoeff();
}

/// Largest singular value.
inline double norm_2_to_2(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// sigma_max((V o V) P), P = I - 11^T / N. Bounded by 1 for orthogonal V.
inline double sigma_max_U(const Matrix& eigvecs) {
    detail::require_dims(eigvecs.rows() == eigvecs.cols() && eigvecs.rows() > 0, "sigma_max_U: V must be square");
    const Matrix vv = eigvecs.cwiseProduct(eigvecs);
    // right-multiplying by P subtracts each row's mean
    const Matrix u = vv.colwise() - vv.rowwise().mean();
    return norm_2_to_2(u);
}

/// d0 = sqrt(1 - s^2) [(1 - sigma1) - 2 theta (1 + sigma2)] (1 - sigma4) / ((1 + sigma3) sqrt(theta)).
/// May be <= 0 when theta is too large for the chosen sigmas; reported as is.
inline double compute_d0(const SigmaParams& params, double sigma_max_u) {
    params.validate();
    if (!(sigma_max_u >= 0.0 && sigma_max_u <= 1.0 + 1e-10))
        throw DomainError("sigma_max(U) must lie in [0, 1]");
    const double s = std::min(sigma_max_u, 1.0);
    const double th = params.theta;
    return std::sqrt(1.0 - s * s) * ((1.0 - params.sigma1) - 2.0 * th * (1.0 + params.sigma2)) *
           (1.0 - params.sigma4) / ((1.0 + params.sigma3) * std::sqrt(th));
}

/// Evaluates ||P (r o g0)||_2 <= c d0.
inline RecoveryCertificate check_exact_recovery(const FrequencyResponse& g0, const Vector& r, double c, double d0) {
    detail::require_dims(g0.size() == r.size(), "check_exact_recovery: g0 and r");
    if (c == 0.0) throw DomainError("constraint value c must be nonzero");
    RecoveryCertificate cert;
    cert.lhs = project_out_ones(r.cwiseProduct(g0.values)).norm();
    cert.rhs = c * d0;
    cert.d0 = d0;
    cert.satisfied = cert.lhs <= cert.rhs;
    return cert;
}

/// Q = (1 + sigma3) sqrt(theta) / c [sqrt(c^2 d0^2 - (1 - sigma5)^2 ||d||^2) - sigma5 ||d||].
inline double compute_Q(const SigmaParams& params, double d0, double d_norm, double c) {
    params.validate();
    if (c == 0.0) throw DomainError("constraint value c must be nonzero");
    if (!(d_norm >= 0.0)) throw DomainError("||d|| must be nonnegative");
    const double radicand = c * c * d0 * d0 - std::pow(1.0 - params.sigma5, 2) * d_norm * d_norm;
    if (radicand < 0.0) throw DomainError("negative radicand in Q: the exact-recovery condition is violated");
    return (1.0 + params.sigma3) * std::sqrt(params.theta) / c *
           (std::sqrt(radicand) - params.sigma5 * d_norm);
}

/// [V diag(g0) V^T noise] restricted to the complement of the source support.
inline Matrix offsupport_effective_noise(const Matrix& eigvecs, const FrequencyResponse& g0, const Matrix& noise,
                                         const Mask& support) {
    detail::require_dims(support.rows() == noise.rows() && support.cols() == noise.cols(),
                         "offsupport_effective_noise: support and noise");
    const Matrix eff = apply_spectral_filter(eigvecs, g0, noise);
    return support.select(Matrix::Zero(eff.rows(), eff.cols()), eff);
}

/// sqrt(2/pi) P Q / (d0 ||Nbar||_{1,1} + ||Nbar^T V (.) V||_{1->2}), Nbar = N_C / ||N_C||_F.
inline double noise_tolerance(const Matrix& noise_c, const Matrix& eigvecs, Index n_signals, double Q, double d0) {
    const double fro = noise_c.norm();
    if (!(fro > 0.0)) throw DomainError("noise tolerance is undefined for a zero noise matrix");
    const Matrix nbar = noise_c / fro;
    const double kr = norm_1_to_2(khatri_rao_design(nbar, eigvecs).matrix);
    return std::sqrt(2.0 / std::numbers::pi) * static_cast<double>(n_signals) * Q /
           (d0 * nbar.cwiseAbs().sum() + kr);
}

/// Stable-recovery error bound on ||g^ - g0|| in the l1 and l2 norms.
/// A non-positive denominator (or an undefined Q) yields infinite bounds and
/// denominator_positive = false.
inline StabilityReport stable_bound(const FrequencyResponse& g0, const Vector& r, double c, const Matrix& noise_c,
                                    const Matrix& eigvecs, const SigmaParams& params, double d0, Index n_signals) {
    const Index n = g0.size();
    detail::require_dims(r.size() == n && eigvecs.rows() == n && noise_c.rows() == n &&
                             noise_c.cols() == n_signals,
                         "stable_bound");
    if (c == 0.0) throw DomainError("constraint value c must be nonzero");

    StabilityReport rep;
    const Vector rg = r.cwiseProduct(g0.values);
    const double d_norm = project_out_ones(rg).norm();
    try {
        rep.Q = compute_Q(params, d0, d_norm, c);
    } catch (const DomainError&) {
        rep.Q = std::numeric_limits<double>::quiet_NaN();
    }

    // diag(g0) (I - 1 (r o g0)^T / c)
    Matrix op = Matrix::Identity(n, n) - Vector::Ones(n) * rg.transpose() / c;
    op = g0.values.asDiagonal() * op;
    rep.numerator_factor_l1 = norm_1_to_2(op);
    rep.numerator_factor_l2 = norm_2_to_2(op);

    rep.noise_l11 = noise_c.cwiseAbs().sum();
    rep.noise_kr_norm = norm_1_to_2(khatri_rao_design(noise_c, eigvecs).matrix);
    if (std::isnan(rep.Q)) return rep;

    rep.denominator = std::sqrt(2.0 / std::numbers::pi) * static_cast<double>(n_signals) * rep.Q -
                      d0 * rep.noise_l11 - rep.noise_kr_norm;
    rep.denominator_positive = rep.denominator > 0.0;
    if (rep.denominator_positive) {
        rep.error_bound_l1 = 2.0 * rep.numerator_factor_l1 * rep.noise_l11 / rep.denominator;
        rep.error_bound_l2 = 2.0 * rep.numerator_factor_l2 * rep.noise_l11 / rep.denominator;
    }
    if (rep.noise_l11 > 0.0) rep.noise_tolerance = noise_tolerance(noise_c, eigvecs, n_signals, rep.Q, d0);
    return rep;
}

/// Lower-bound parameter sigma'_i as a function of alpha_i = ||m_i||_inf / ||m_i||_2.
/// The two branches do not meet at alpha = sqrt(theta): the first gives 1
/// there, the second 1 - theta - theta^2 / 2. The piecewise form is kept as is.
inline double sigma_prime(double alpha_i, double theta, Index n_nodes = 0) {
    if (!(theta > 0.0 && theta <= std::exp(-1.0))) throw DomainError("theta must lie in (0, 1/e]");
    const double lo = n_nodes > 0 ? 1.0 / std::sqrt(static_cast<double>(n_nodes)) : 0.0;
    if (!(alpha_i > 0.0 && alpha_i >= lo && alpha_i <= 1.0)) throw DomainError("alpha_i must lie in [N^{-1/2}, 1]");
    if (alpha_i <= std::sqrt(theta)) return alpha_i * alpha_i / theta;
    const double a2 = alpha_i * alpha_i;
    return 1.0 - std::sqrt(theta) * alpha_i * (1.0 + (1.0 - a2) * theta * theta / (2.0 * a2 * (1.0 - theta)));
}

/// f(theta) = sqrt(pi) theta^2 + 2 theta + sqrt(pi)/2 theta^{3/2} - 1.
inline double theta_max_residual(double theta) {
    const double sp = std::sqrt(std::numbers::pi);
    return sp * theta * theta + 2.0 * theta + 0.5 * sp * std::pow(theta, 1.5) - 1.0;
}

/// Largest admissible sparsity level: the root of theta_max_residual on (0, 1/e].
inline double theta_max() {
    double lo = 0.0;
    double hi = std::exp(-1.0);
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        (theta_max_residual(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// ceil(C' sigma_m^{-2} ln(4 / delta)). C' is an unspecified absolute constant; 1.0 is
/// only a placeholder default.
inline std::int64_t min_sample_size(double sigma_m, double delta_prob, double c_prime = 1.0) {
    if (!(sigma_m > 0.0) || !(c_prime > 0.0)) throw DomainError("sigma_m and C' must be positive");
    if (!(delta_prob > 0.0 && delta_prob < 4.0)) throw DomainError("delta must lie in (0, 4)");
    const double v = c_prime * std::log(4.0 / delta_prob) / (sigma_m * sigma_m);
    // values within rounding of an integer are not bumped to the next one
    const double r = std::round(v);
    return static_cast<std::int64_t>(std::abs(v - r) <= 1e-12 * std::max(1.0, r) ? r : std::ceil(v));
}

}  // namespace graphdeconv
