#pragma once

// Monte Carlo phase-diagram sweeps over a two-dimensional parameter grid.
// Every (cell, realization) pair owns its random streams, so the results do
// not depend on how the work is scheduled across threads.

#include "graphdeconv/io.hpp"
#include "graphdeconv/metrics.hpp"
#include "graphdeconv/solver.hpp"
#include "graphdeconv/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace graphdeconv::harness {

/// axis1 x axis2 of each experiment:
///   AlphaVsP      alpha x P
///   AlphaVsTheta  alpha x theta
///   ThetaVsP      theta x P
///   EtaVsAlpha    eta x alpha
///   ThetaVsL      theta x L   (filter taps instead of an inverse-filter draw)
enum class Experiment { AlphaVsP, AlphaVsTheta, ThetaVsP, EtaVsAlpha, ThetaVsL };

inline const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::AlphaVsP: return "alpha_vs_p";
        case Experiment::AlphaVsTheta: return "alpha_vs_theta";
        case Experiment::ThetaVsP: return "theta_vs_p";
        case Experiment::EtaVsAlpha: return "eta_vs_alpha";
        case Experiment::ThetaVsL: return "theta_vs_l";
    }
    return "?";
}

inline Experiment parse_experiment(const std::string& s) {
    for (auto e : {Experiment::AlphaVsP, Experiment::AlphaVsTheta, Experiment::ThetaVsP, Experiment::EtaVsAlpha,
                   Experiment::ThetaVsL})
        if (s == to_string(e)) return e;
    throw ValidationError("unknown experiment '" + s + "'");
}

struct SweepConfig {
    Experiment experiment = Experiment::AlphaVsP;
    std::vector<double> axis1;
    std::vector<double> axis2;
    Index n_nodes = 20;
    Index n_signals = 20;
    double edge_prob = 0.4;
    double theta = 0.1;
    double alpha = 0.1;
    double beta = 0.1;
    Index order = 3;
    double eta = 0.0;
    int realizations = 20;
    std::uint64_t master_seed = 1;
    double kappa = 0.1;
    bool fixed_graph = false;
    std::string graph_file;  // implies a fixed graph
    ShiftKind gso = ShiftKind::NormalizedAdjacency;
    SolverConfig solver;

    /// Per-cell parameters after substituting the axis values.
    struct Point {
        Index n_signals;
        double theta, alpha, eta;
        Index order;
    };

    Point point(double a1, double a2) const {
        Point p{n_signals, theta, alpha, eta, order};
        switch (experiment) {
            case Experiment::AlphaVsP: p.alpha = a1, p.n_signals = static_cast<Index>(std::llround(a2)); break;
            case Experiment::AlphaVsTheta: p.alpha = a1, p.theta = a2; break;
            case Experiment::ThetaVsP: p.theta = a1, p.n_signals = static_cast<Index>(std::llround(a2)); break;
            case Experiment::EtaVsAlpha: p.eta = a1, p.alpha = a2; break;
            case Experiment::ThetaVsL: p.theta = a1, p.order = static_cast<Index>(std::llround(a2)); break;
        }
        return p;
    }

    void validate() const {
        if (axis1.empty() || axis2.empty()) throw ValidationError("both axes need at least one value");
        if (realizations < 1) throw ValidationError("realizations must be at least 1");
        if (n_nodes < 2) throw ValidationError("n_nodes must be at least 2");
        if (!(edge_prob > 0.0 && edge_prob <= 1.0)) throw ValidationError("edge_prob must lie in (0, 1]");
        if (!(kappa >= 0.0)) throw ValidationError("kappa must be nonnegative");
        if (!(beta >= 0.0)) throw ValidationError("beta must be nonnegative");
        for (double a1 : axis1)
            for (double a2 : axis2) {
                const Point p = point(a1, a2);
                if (!(p.theta > 0.0 && p.theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
                if (!(p.alpha >= 0.0)) throw ValidationError("alpha must be nonnegative");
                if (!(p.eta >= 0.0)) throw ValidationError("eta must be nonnegative");
                if (p.n_signals < 1) throw ValidationError("P must be at least 1");
                if (p.order < 1) throw ValidationError("L must be at least 1");
            }
        if (experiment == Experiment::AlphaVsP || experiment == Experiment::ThetaVsP)
            for (double v : axis2)
                if (v != std::round(v)) throw ValidationError("P grid values must be integers");
        if (experiment == Experiment::ThetaVsL)
            for (double v : axis2)
                if (v != std::round(v)) throw ValidationError("L grid values must be integers");
        try {
            solver.validate();
        } catch (const DomainError& e) {
            throw ValidationError(e.what());
        }
    }
};

inline SweepConfig parse_sweep_config(const nlohmann::json& j) {
    static const std::set<std::string> known{"experiment", "axis1",      "axis2",       "n_nodes", "n_signals",
                                             "edge_prob",  "theta",      "alpha",       "beta",    "order",
                                             "eta",        "realizations", "master_seed", "kappa",   "fixed_graph",
                                             "graph_file", "gso",        "solver"};
    static const std::set<std::string> solver_known{"tolerance", "max_inner_iterations", "delta", "outer_tolerance",
                                                    "max_outer_iterations"};
    if (!j.is_object()) throw ValidationError("sweep config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError("unknown sweep config key '" + key + "'");
    if (!j.contains("experiment") || !j.contains("axis1") || !j.contains("axis2"))
        throw ValidationError("sweep config needs 'experiment', 'axis1' and 'axis2'");

    SweepConfig c;
    try {
        c.experiment = parse_experiment(j.at("experiment").get<std::string>());
        c.axis1 = j.at("axis1").get<std::vector<double>>();
        c.axis2 = j.at("axis2").get<std::vector<double>>();
        c.n_nodes = j.value("n_nodes", c.n_nodes);
        c.n_signals = j.value("n_signals", c.n_signals);
        c.edge_prob = j.value("edge_prob", c.edge_prob);
        c.theta = j.value("theta", c.theta);
        c.alpha = j.value("alpha", c.alpha);
        c.beta = j.value("beta", c.beta);
        c.order = j.value("order", c.order);
        c.eta = j.value("eta", c.eta);
        c.realizations = j.value("realizations", c.realizations);
        c.master_seed = j.value("master_seed", c.master_seed);
        c.kappa = j.value("kappa", c.kappa);
        c.fixed_graph = j.value("fixed_graph", c.fixed_graph);
        c.graph_file = j.value("graph_file", c.graph_file);
        if (j.contains("gso")) c.gso = parse_shift_kind(j.at("gso").get<std::string>());
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            if (!s.is_object()) throw ValidationError("'solver' must be an object");
            for (const auto& [key, value] : s.items())
                if (!solver_known.count(key)) throw ValidationError("unknown solver config key '" + key + "'");
            c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
            c.solver.max_inner_iterations = s.value("max_inner_iterations", c.solver.max_inner_iterations);
            c.solver.delta = s.value("delta", c.solver.delta);
            c.solver.outer_tolerance = s.value("outer_tolerance", c.solver.outer_tolerance);
            c.solver.max_outer_iterations = s.value("max_outer_iterations", c.solver.max_outer_iterations);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed sweep config: ") + e.what());
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    c.validate();
    return c;
}

inline SweepConfig read_sweep_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sweep config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return parse_sweep_config(j);
}

struct RealizationRecord {
    std::size_t cell = 0;
    int realization = 0;
    double axis1 = 0.0;
    double axis2 = 0.0;
    bool ok = false;
    double re = std::numeric_limits<double>::quiet_NaN();
    double acc = std::numeric_limits<double>::quiet_NaN();
    std::string failure;
};

struct CellResult {
    double axis1 = 0.0;
    double axis2 = 0.0;
    double re_mean = std::numeric_limits<double>::quiet_NaN();
    double re_stderr = std::numeric_limits<double>::quiet_NaN();
    double acc_mean = std::numeric_limits<double>::quiet_NaN();
    double acc_stderr = std::numeric_limits<double>::quiet_NaN();
    int n_ok = 0;
    int n_fail = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<CellResult> cells;
    std::vector<RealizationRecord> realizations;  // cell-major, realization-minor
};

/// Stream purposes within one (cell, realization).
enum StreamPurpose : std::uint64_t { kGraph = 0, kFilter = 1, kSources = 2, kNoise = 3 };

/// Streams for a held-fixed graph use this cell index, outside any grid.
inline constexpr std::uint64_t kFixedGraphStream = ~std::uint64_t{0};

inline RealizationRecord run_realization(const SweepConfig& cfg, std::size_t cell, int rep, double a1, double a2,
                                         const std::optional<Graph>& fixed) {
    RealizationRecord rec{cell, rep, a1, a2, false, std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN(), {}};
    const RngSeed base(cfg.master_seed, {static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(rep)});
    const auto p = cfg.point(a1, a2);
    try {
        const Graph graph = fixed ? *fixed : gen_er_graph(cfg.n_nodes, cfg.edge_prob, base.child(kGraph));
        const Index n = graph.n_nodes();
        const auto dec = eig_sym(build_gso(graph, cfg.gso));

        FrequencyResponse g0;
        if (cfg.experiment == Experiment::ThetaVsL) {
            const auto h = gen_filter_coeffs(p.order, cfg.beta, base.child(kFilter));
            g0 = inverse_response(frequency_response(h, dec.eigvals));
        } else {
            g0 = gen_inverse_filter(n, p.alpha, base.child(kFilter));
        }
        const SourceMatrix x0 = gen_bernoulli_gaussian(n, p.n_signals, p.theta, base.child(kSources));
        Matrix y = apply_spectral_filter(dec.eigvecs, inverse_response(g0), x0.values);
        y = add_noise(y, p.eta, base.child(kNoise));

        const Solution sol = reweighted_l1(khatri_rao_design(y, dec.eigvecs), Vector::Ones(n), g0.values.sum(),
                                           cfg.solver);
        if (!sol.converged) {
            rec.failure = "solver did not converge";
            return rec;
        }
        rec.re = rel_error(sol.X_hat, x0.values);
        rec.acc = support_accuracy(sol.X_hat, x0.values, cfg.kappa);
        rec.ok = std::isfinite(rec.re) && std::isfinite(rec.acc);
        if (!rec.ok) rec.failure = "non-finite metric";
    } catch (const Error& e) {
        rec.failure = e.what();
    }
    return rec;
}

/// Mean and standard error (sample standard deviation over sqrt(n)); the
/// standard error is NaN below two samples.
inline std::pair<double, double> mean_stderr(const std::vector<double>& v) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (v.empty()) return {nan, nan};
    double sum = 0.0;
    for (double x : v) sum += x;
    const double n = static_cast<double>(v.size());
    const double mean = sum / n;
    if (v.size() < 2) return {mean, nan};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

/// Reduces realization records (any order) into per-cell results in grid order.
inline std::vector<CellResult> aggregate(const SweepConfig& cfg, const std::vector<RealizationRecord>& records) {
    std::vector<CellResult> cells;
    for (double a1 : cfg.axis1)
        for (double a2 : cfg.axis2) {
            CellResult c;
            c.axis1 = a1;
            c.axis2 = a2;
            c.seed = cfg.master_seed;
            cells.push_back(c);
        }
    std::vector<std::vector<const RealizationRecord*>> per_cell(cells.size());
    for (const auto& r : records) per_cell.at(r.cell).push_back(&r);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        auto& list = per_cell[k];
        std::sort(list.begin(), list.end(),
                  [](const RealizationRecord* a, const RealizationRecord* b) { return a->realization < b->realization; });
        std::vector<double> re;
        std::vector<double> acc;
        for (const auto* r : list) {
            if (r->ok) {
                re.push_back(r->re);
                acc.push_back(r->acc);
            } else {
                ++cells[k].n_fail;
            }
        }
        cells[k].n_ok = static_cast<int>(re.size());
        std::tie(cells[k].re_mean, cells[k].re_stderr) = mean_stderr(re);
        std::tie(cells[k].acc_mean, cells[k].acc_stderr) = mean_stderr(acc);
    }
    return cells;
}

/// Runs every (cell, realization) pair on `threads` workers (0: hardware
/// concurrency) and reduces deterministically.
inline SweepResult run_sweep(const SweepConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    std::optional<Graph> fixed;
    if (!cfg.graph_file.empty()) {
        fixed = io::read_graph_file(cfg.graph_file);
    } else if (cfg.fixed_graph) {
        fixed = gen_er_graph(cfg.n_nodes, cfg.edge_prob, RngSeed(cfg.master_seed, {kFixedGraphStream, kGraph}));
    }

    const std::size_t n_cells = cfg.axis1.size() * cfg.axis2.size();
    const std::size_t reps = static_cast<std::size_t>(cfg.realizations);
    const std::size_t n_jobs = n_cells * reps;
    std::vector<RealizationRecord> records(n_jobs);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n_jobs, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < n_jobs; job = next++) {
            const std::size_t cell = job / reps;
            const int rep = static_cast<int>(job % reps);
            const double a1 = cfg.axis1[cell / cfg.axis2.size()];
            const double a2 = cfg.axis2[cell % cfg.axis2.size()];
            records[job] = run_realization(cfg, cell, rep, a1, a2, fixed);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SweepResult out;
    out.cells = aggregate(cfg, records);
    out.realizations = std::move(records);
    return out;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<CellResult>& cells) {
    out << "axis1,axis2,re_mean,re_stderr,acc_mean,acc_stderr,n_ok,n_fail,seed\n";
    for (const auto& c : cells)
        out << io::format_double(c.axis1) << ',' << io::format_double(c.axis2) << ',' << io::format_double(c.re_mean)
            << ',' << io::format_double(c.re_stderr) << ',' << io::format_double(c.acc_mean) << ','
            << io::format_double(c.acc_stderr) << ',' << c.n_ok << ',' << c.n_fail << ',' << c.seed << '\n';
}

inline void write_realization_log(std::ostream& out, const std::vector<RealizationRecord>& records) {
    out << "cell,realization,axis1,axis2,ok,re,acc,failure\n";
    for (const auto& r : records) {
        std::string why = r.failure;
        std::replace(why.begin(), why.end(), ',', ';');
        std::replace(why.begin(), why.end(), '\n', ' ');
        out << r.cell << ',' << r.realization << ',' << io::format_double(r.axis1) << ','
            << io::format_double(r.axis2) << ',' << (r.ok ? 1 : 0) << ',' << io::format_double(r.re) << ','
            << io::format_double(r.acc) << ',' << why << '\n';
    }
}

/// Parses a log written by write_realization_log.
inline std::vector<RealizationRecord> read_realization_log(std::istream& in) {
    std::vector<RealizationRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) continue;
        if (io::detail::trim(line).empty()) continue;
        const auto f = io::detail::split(line, ',');
        if (f.size() != 8) throw ParseError("realization log line needs 8 fields", lineno);
        RealizationRecord r;
        int ok = 0;
        auto num = [&](std::string_view s, double& v) {
            if (s == "nan" || s == "-nan") {
                v = std::numeric_limits<double>::quiet_NaN();
                return true;
            }
            return io::detail::parse_number(s, v);
        };
        if (!io::detail::parse_number(f[0], r.cell) || !io::detail::parse_number(f[1], r.realization) ||
            !num(f[2], r.axis1) || !num(f[3], r.axis2) || !io::detail::parse_number(f[4], ok) || !num(f[5], r.re) ||
            !num(f[6], r.acc))
            throw ParseError("malformed realization log line", lineno);
        r.ok = ok != 0;
        r.failure = std::string(f[7]);
        out.push_back(r);
    }
    return out;
}

/// Companion script that renders the sweep CSV as heat maps of the means.
inline const char* plot_script() {
    return R"PY(#!/usr/bin/env python3
"""Heat maps of re_mean and acc_mean from a sweep CSV.

usage: plot_sweep.py sweep.csv [out_prefix]
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
    prefix = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0]
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    a1 = sorted({float(r["axis1"]) for r in rows})
    a2 = sorted({float(r["axis2"]) for r in rows})
    for metric in ("re_mean", "acc_mean"):
        grid = [[float("nan")] * len(a1) for _ in a2]
        for r in rows:
            grid[a2.index(float(r["axis2"]))][a1.index(float(r["axis1"]))] = float(r[metric])
        fig, ax = plt.subplots(figsize=(5, 4))
        im = ax.imshow(grid, origin="lower", aspect="auto", cmap="gray")
        ax.set_xticks(range(len(a1)), [f"{v:g}" for v in a1], rotation=90)
        ax.set_yticks(range(len(a2)), [f"{v:g}" for v in a2])
        ax.set_xlabel("axis1")
        ax.set_ylabel("axis2")
        ax.set_title(metric)
        fig.colorbar(im)
        fig.tight_layout()
        fig.savefig(f"{prefix}_{metric}.png", dpi=150)


if __name__ == "__main__":
    main()
)PY";
}

}  // namespace graphdeconv::harness
