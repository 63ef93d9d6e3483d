#pragma once

// Certificate report for one problem instance, serialized as JSON.

#include "graphdeconv/guarantees.hpp"
#include "graphdeconv/synth.hpp"

#include <nlohmann/json.hpp>

#include <optional>

namespace graphdeconv::harness {

struct CertificateRequest {
    explicit CertificateRequest(Graph g) : graph(std::move(g)) {}

    Graph graph;
    ShiftKind gso = ShiftKind::NormalizedAdjacency;
    // Either an inverse-filter draw of size alpha or filter taps (order, beta).
    double alpha = 0.0;
    std::optional<Index> filter_order;
    double beta = 0.1;
    std::optional<Vector> r;  // default: all ones
    std::optional<double> c;  // default: 1^T g0
    SigmaParams params;
    Index n_signals = 20;
    double eta = 0.0;  // > 0 also draws sources and noise for the stable bound
    std::uint64_t seed = 1;
};

struct CertificateReport {
    double sigma_max_U = 0.0;
    double d0 = 0.0;
    RecoveryCertificate certificate;
    std::optional<StabilityReport> stability;
    Vector g0;
    double c = 0.0;
};

inline CertificateReport check_certificate(const CertificateRequest& req) {
    req.params.validate();
    const Index n = req.graph.n_nodes();
    const auto dec = eig_sym(build_gso(req.graph, req.gso));
    const RngSeed base(req.seed);

    FrequencyResponse g0;
    if (req.filter_order) {
        const auto h = gen_filter_coeffs(*req.filter_order, req.beta, base.child(1));
        g0 = inverse_response(frequency_response(h, dec.eigvals));
    } else {
        g0 = gen_inverse_filter(n, req.alpha, base.child(1));
    }
    const Vector r = req.r.value_or(Vector::Ones(n));
    detail::require_dims(r.size() == n, "check_certificate: r");

    CertificateReport rep;
    rep.g0 = g0.values;
    rep.c = req.c.value_or(r.dot(g0.values));
    rep.sigma_max_U = sigma_max_U(dec.eigvecs);
    rep.d0 = compute_d0(req.params, rep.sigma_max_U);
    rep.certificate = check_exact_recovery(g0, r, rep.c, rep.d0);
    rep.certificate.sigma_max_U = rep.sigma_max_U;

    if (req.eta > 0.0) {
        const auto x0 = gen_bernoulli_gaussian(n, req.n_signals, req.params.theta, base.child(2));
        const Matrix noise = add_noise(Matrix::Zero(n, req.n_signals), req.eta, base.child(3));
        const Matrix noise_c = offsupport_effective_noise(dec.eigvecs, g0, noise, x0.support_mask());
        rep.stability = stable_bound(g0, r, rep.c, noise_c, dec.eigvecs, req.params, rep.d0, req.n_signals);
    }
    return rep;
}

inline nlohmann::json to_json(const CertificateReport& rep) {
    // JSON has no NaN or infinity; those become null
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["sigma_max_U"] = num(rep.sigma_max_U);
    j["d0"] = num(rep.d0);
    j["c"] = num(rep.c);
    j["certificate"] = {{"lhs", num(rep.certificate.lhs)},
                        {"rhs", num(rep.certificate.rhs)},
                        {"satisfied", rep.certificate.satisfied}};
    if (rep.stability) {
        const auto& s = *rep.stability;
        j["stability"] = {{"Q", num(s.Q)},
                          {"denominator", num(s.denominator)},
                          {"denominator_positive", s.denominator_positive},
                          {"noise_l11", num(s.noise_l11)},
                          {"noise_kr_norm", num(s.noise_kr_norm)},
                          {"numerator_factor_l1", num(s.numerator_factor_l1)},
                          {"numerator_factor_l2", num(s.numerator_factor_l2)},
                          {"error_bound_l1", num(s.error_bound_l1)},
                          {"error_bound_l2", num(s.error_bound_l2)},
                          {"noise_tolerance", num(s.noise_tolerance)}};
    }
    j["g0"] = std::vector<double>(rep.g0.data(), rep.g0.data() + rep.g0.size());
    return j;
}

}  // namespace graphdeconv::harness
