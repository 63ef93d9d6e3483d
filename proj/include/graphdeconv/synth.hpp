#pragma once

// Random generators for the synthetic experiments: connected Erdos-Renyi
// graphs, Bernoulli-Gaussian sources, perturbed inverse filters, perturbed
// filter taps and additive Gaussian noise.

#include "graphdeconv/gsp.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace graphdeconv {

/// Identifies an independent random stream: a master seed plus a path such
/// as (cell, realization, purpose). Equal seeds give bit-identical draws.
struct RngSeed {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> stream_path;

    RngSeed() = default;
    RngSeed(std::uint64_t master, std::vector<std::uint64_t> path = {})
        : master_seed(master), stream_path(std::move(path)) {}

    /// Child stream with one more path component.
    RngSeed child(std::uint64_t component) const {
        RngSeed out = *this;
        out.stream_path.push_back(component);
        return out;
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Engine for a stream. The path is folded into the state through splitmix64,
/// so sibling streams are decorrelated even for adjacent indices.
inline std::mt19937_64 make_engine(const RngSeed& seed) {
    std::uint64_t state = detail::splitmix64(seed.master_seed);
    for (const auto component : seed.stream_path)
        state = detail::splitmix64(state ^ detail::splitmix64(component + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32),
                      static_cast<std::uint32_t>(seed.stream_path.size())};
    return std::mt19937_64(seq);
}

inline constexpr int kMaxConnectivityAttempts = 1000;

/// G(n, p) with unit weights, resampled until connected.
inline Graph gen_er_graph(Index n, double p, const RngSeed& seed) {
    if (n < 2) throw DomainError("Erdos-Renyi graph needs n >= 2");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in (0, 1]");
    auto engine = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int attempt = 0; attempt < kMaxConnectivityAttempts; ++attempt) {
        Matrix a = Matrix::Zero(n, n);
        for (Index j = 1; j < n; ++j)
            for (Index i = 0; i < j; ++i)
                if (unif(engine) < p) a(i, j) = a(j, i) = 1.0;
        Graph g(std::move(a));
        if (g.is_connected()) return g;
    }
    throw GenerationError("no connected Erdos-Renyi graph after 1000 attempts; p is too small for n");
}

/// Sparse N x P matrix with a recorded support.
struct SourceMatrix {
    Matrix values;
    std::vector<std::pair<Index, Index>> support;  // (node, signal), column-major order
    double theta = 0.0;

    Mask support_mask() const {
        Mask m = Mask::Constant(values.rows(), values.cols(), false);
        for (const auto& [i, p] : support) m(i, p) = true;
        return m;
    }
};

/// Entries Omega * gamma / sqrt(theta), Omega ~ Bernoulli(theta), gamma ~ N(0, 1).
inline SourceMatrix gen_bernoulli_gaussian(Index n, Index p_signals, double theta, const RngSeed& seed) {
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0, 1)");
    if (n < 1 || p_signals < 1) throw DomainError("source matrix dimensions must be positive");
    auto engine = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(theta);
    SourceMatrix out{Matrix::Zero(n, p_signals), {}, theta};
    for (Index p = 0; p < p_signals; ++p) {
        for (Index i = 0; i < n; ++i) {
            // draw both variables for every entry so the stream layout is fixed
            const bool active = unif(engine) < theta;
            const double gamma = normal(engine);
            if (active && gamma != 0.0) {
                out.values(i, p) = gamma * scale;
                out.support.emplace_back(i, p);
            }
        }
    }
    return out;
}

/// g~ = 1 + alpha * N * (P b) / ||P b||, b standard normal and P the projector
/// onto the complement of the all-ones vector. Hence 1^T g~ = N and
/// ||P g~|| = alpha * N.
inline FrequencyResponse gen_inverse_filter(Index n, double alpha, const RngSeed& seed) {
    if (n < 2) throw DomainError("inverse filter needs n >= 2");
    if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector b(n);
    for (int attempt = 0; attempt < 64; ++attempt) {
        for (Index i = 0; i < n; ++i) b(i) = normal(engine);
        const Vector proj = project_out_ones(b);
        const double norm = proj.norm();
        if (norm > 1e-12) {
            Vector g = Vector::Ones(n) + (alpha * static_cast<double>(n) / norm) * proj;
            // remove the rounding drift in the mean so that 1^T g = N holds tightly
            g.array() += 1.0 - g.mean();
            return {std::move(g)};
        }
    }
    throw GenerationError("could not draw a non-degenerate perturbation");
}

/// h = (1, beta * b_1, ..., beta * b_{L-1}) with b standard normal.
inline GraphFilter gen_filter_coeffs(Index order, double beta, const RngSeed& seed) {
    if (order < 1) throw DomainError("filter order must be at least 1");
    if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector h(order);
    h(0) = 1.0;
    for (Index l = 1; l < order; ++l) h(l) = beta * normal(engine);
    return GraphFilter(std::move(h));
}

/// Y + eta * W with W i.i.d. standard normal.
inline Matrix add_noise(const Matrix& y, double eta, const RngSeed& seed) {
    if (!(eta >= 0.0)) throw DomainError("noise level must be nonnegative");
    if (eta == 0.0) return y;
    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out = y;
    for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i) out(i, j) += eta * normal(engine);
    return out;
}

}  // namespace graphdeconv
