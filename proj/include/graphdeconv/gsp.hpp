#pragma once

// Graph-shift operators, spectral decomposition and graph filtering.
//
// Conventions used throughout the library:
//   * graph signals are columns; an N x P matrix holds P signals on N nodes
//   * vec() stacks columns (column-major), matching Eigen's storage order
//   * eigenvalues are sorted in descending order, so eigvals(0) is the largest

#include "graphdeconv/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace graphdeconv {

/// Undirected weighted graph without self-loops, stored densely.
class Graph {
public:
    explicit Graph(Matrix adjacency) : adjacency_(std::move(adjacency)) { validate(); }

    /// Builds a graph from an undirected edge list (each edge listed once).
    static Graph from_edges(Index n_nodes,
                            const std::vector<std::tuple<Index, Index, double>>& edges) {
        if (n_nodes <= 0) throw DomainError("graph must have at least one node");
        Matrix a = Matrix::Zero(n_nodes, n_nodes);
        for (const auto& [i, j, w] : edges) {
            if (i < 0 || j < 0 || i >= n_nodes || j >= n_nodes)
                throw ValidationError("edge endpoint out of range");
            if (i == j) throw ValidationError("self-loops are not allowed");
            if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("edge weight must be positive");
            a(i, j) = w;
            a(j, i) = w;
        }
        return Graph(std::move(a));
    }

    Index n_nodes() const noexcept { return adjacency_.rows(); }
    const Matrix& adjacency() const noexcept { return adjacency_; }
    Vector degrees() const { return adjacency_.rowwise().sum(); }

    Index n_edges() const {
        Index m = 0;
        for (Index j = 0; j < n_nodes(); ++j)
            for (Index i = 0; i < j; ++i)
                if (adjacency_(i, j) != 0.0) ++m;
        return m;
    }

    bool is_connected() const {
        const Index n = n_nodes();
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Index> stack{0};
        seen[0] = 1;
        Index reached = 1;
        while (!stack.empty()) {
            const Index u = stack.back();
            stack.pop_back();
            for (Index v = 0; v < n; ++v) {
                if (adjacency_(u, v) != 0.0 && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++reached;
                    stack.push_back(v);
                }
            }
        }
        return reached == n;
    }

private:
    void validate() const {
        if (adjacency_.rows() == 0 || adjacency_.rows() != adjacency_.cols())
            throw ContractViolation("adjacency must be a non-empty square matrix");
        for (Index j = 0; j < adjacency_.cols(); ++j) {
            if (adjacency_(j, j) != 0.0) throw ValidationError("self-loops are not allowed");
            for (Index i = 0; i < adjacency_.rows(); ++i) {
                const double a = adjacency_(i, j);
                if (!std::isfinite(a) || a < 0.0)
                    throw ValidationError("adjacency entries must be finite and nonnegative");
                if (a != adjacency_(j, i)) throw ValidationError("adjacency must be symmetric");
            }
        }
    }

    Matrix adjacency_;
};

enum class ShiftKind { Adjacency, NormalizedAdjacency, CombinatorialLaplacian };

inline std::string to_string(ShiftKind kind) {
    switch (kind) {
        case ShiftKind::Adjacency: return "adj";
        case ShiftKind::NormalizedAdjacency: return "norm-adj";
        case ShiftKind::CombinatorialLaplacian: return "laplacian";
    }
    return "?";
}

inline ShiftKind parse_shift_kind(const std::string& name) {
    if (name == "adj") return ShiftKind::Adjacency;
    if (name == "norm-adj") return ShiftKind::NormalizedAdjacency;
    if (name == "laplacian") return ShiftKind::CombinatorialLaplacian;
    throw ValidationError("unknown GSO kind '" + name + "' (expected adj, norm-adj or laplacian)");
}

struct ShiftOperator {
    Matrix matrix;
    ShiftKind kind = ShiftKind::Adjacency;

    Index n_nodes() const noexcept { return matrix.rows(); }
};

/// S = V diag(eigvals) V^T with V orthogonal and eigvals descending.
struct SpectralDecomposition {
    Matrix eigvecs;
    Vector eigvals;

    Index n_nodes() const noexcept { return eigvals.size(); }
};

/// Polynomial filter H = sum_l coeffs(l) S^l.
struct GraphFilter {
    Vector coeffs;

    explicit GraphFilter(Vector h) : coeffs(std::move(h)) {
        if (coeffs.size() < 1) throw DomainError("graph filter needs at least one coefficient");
    }
    Index order() const noexcept { return coeffs.size(); }
};

/// One gain per graph frequency (forward response h~ or inverse response g~).
struct FrequencyResponse {
    Vector values;

    Index size() const noexcept { return values.size(); }
};

/// The NP x N Khatri-Rao operator (Y^T V) (.) V. Row p*N + i corresponds to
/// entry (i, p) of the synthesized N x P matrix.
struct DesignMatrix {
    Matrix matrix;
    Index n_nodes = 0;
    Index n_signals = 0;
};

/// Builds the shift operator. The Laplacian is the standard D - A; some texts
/// write A - D, which only flips the sign (and order) of the spectrum.
inline ShiftOperator build_gso(const Graph& graph, ShiftKind kind) {
    const Matrix& a = graph.adjacency();
    switch (kind) {
        case ShiftKind::Adjacency: return {a, kind};
        case ShiftKind::NormalizedAdjacency: {
            const Vector d = graph.degrees();
            if ((d.array() <= 0.0).any())
                throw DegenerateDegreeError("normalized adjacency requires every node to have positive degree");
            const Vector inv_sqrt = d.array().rsqrt();
            Matrix s = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
            // exact symmetry regardless of rounding in the two products
            s = 0.5 * (s + s.transpose()).eval();
            return {std::move(s), kind};
        }
        case ShiftKind::CombinatorialLaplacian: {
            Matrix l = -a;
            l.diagonal() = graph.degrees();
            return {std::move(l), kind};
        }
    }
    throw DomainError("unknown shift kind");
}

inline void require_symmetric(const Matrix& s) {
    if (s.rows() != s.cols() || s.rows() == 0) throw ContractViolation("matrix must be square and non-empty");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ContractViolation("matrix is not symmetric");
}

/// Symmetric eigendecomposition with eigenvalues in descending order.
inline SpectralDecomposition eig_sym(const Matrix& s) {
    require_symmetric(s);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
    if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed to converge");
    // Eigen sorts ascending
    return {solver.eigenvectors().rowwise().reverse(), solver.eigenvalues().reverse()};
}

inline SpectralDecomposition eig_sym(const ShiftOperator& s) { return eig_sym(s.matrix); }

/// N x L Vandermonde matrix with entries eigvals(i)^j, j = 0..L-1.
inline Matrix vandermonde(const Vector& eigvals, Index order) {
    if (order < 1) throw DomainError("filter order must be at least 1");
    if (order > eigvals.size()) throw DomainError("filter order cannot exceed the number of nodes");
    Matrix psi(eigvals.size(), order);
    psi.col(0).setOnes();
    for (Index j = 1; j < order; ++j) psi.col(j) = psi.col(j - 1).cwiseProduct(eigvals);
    return psi;
}

/// sum_l h_l S^l X by Horner's rule; never forms a power of S.
inline Matrix apply_filter_coeffs(const ShiftOperator& s, const GraphFilter& h, const Matrix& x) {
    detail::require_dims(s.matrix.cols() == x.rows(), "apply_filter_coeffs: S and X");
    const Index order = h.order();
    if (order > s.n_nodes()) throw DomainError("filter order cannot exceed the number of nodes");
    Matrix out = h.coeffs(order - 1) * x;
    for (Index l = order - 2; l >= 0; --l) {
        out = (s.matrix * out).eval();
        out += h.coeffs(l) * x;
    }
    return out;
}

/// V diag(response) V^T X.
inline Matrix apply_spectral_filter(const Matrix& eigvecs, const FrequencyResponse& response,
                                    const Matrix& x) {
    detail::require_dims(eigvecs.rows() == x.rows() && eigvecs.cols() == response.size(),
                         "apply_spectral_filter: V, response and X");
    return eigvecs * (response.values.asDiagonal() * (eigvecs.transpose() * x));
}

inline FrequencyResponse frequency_response(const GraphFilter& h, const Vector& eigvals) {
    return {vandermonde(eigvals, h.order()) * h.coeffs};
}

/// Relative tolerance used when the caller does not supply one.
inline double default_invertibility_tol(const FrequencyResponse& response) {
    if (response.size() == 0) return 0.0;
    return 1e-8 * response.values.cwiseAbs().maxCoeff();
}

inline bool is_invertible(const FrequencyResponse& response, double tol) {
    if (!(tol > 0.0)) throw DomainError("invertibility tolerance must be positive");
    if (response.size() == 0) return false;
    return response.values.cwiseAbs().minCoeff() > tol;
}

/// Entrywise reciprocal, so that inverse o response = 1.
inline FrequencyResponse inverse_response(const FrequencyResponse& response,
                                          std::optional<double> tol = std::nullopt) {
    const double t = tol.value_or(default_invertibility_tol(response));
    if (!(t > 0.0) || !is_invertible(response, t))
        throw InvertibilityError("frequency response vanishes at some graph frequency");
    return {response.values.cwiseInverse()};
}

/// Column k is vec(v_k v_k^T Y), so that design * g = vec(V diag(g) V^T Y).
inline DesignMatrix khatri_rao_design(const Matrix& y, const Matrix& eigvecs) {
    detail::require_dims(eigvecs.rows() == y.rows() && eigvecs.rows() == eigvecs.cols(),
                         "khatri_rao_design: Y and V");
    const Index n = eigvecs.rows();
    const Index p = y.cols();
    const Matrix ytv = y.transpose() * eigvecs;  // P x N
    DesignMatrix out{Matrix(n * p, n), n, p};
    for (Index k = 0; k < n; ++k)
        for (Index sig = 0; sig < p; ++sig)
            out.matrix.col(k).segment(sig * n, n) = ytv(sig, k) * eigvecs.col(k);
    return out;
}

/// Column-major reshape of a length N*P vector into N x P.
inline Matrix unvec(const Vector& v, Index rows, Index cols) {
    detail::require_dims(v.size() == rows * cols, "unvec");
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

/// Orthogonal projector onto the complement of span(1): P x = x - mean(x).
inline Vector project_out_ones(const Vector& x) {
    return x.array() - x.mean();
}

}  // namespace graphdeconv
