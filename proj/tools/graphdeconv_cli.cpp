// graphdeconv: command-line front end.
//
//   gen       synthetic graph, inverse filter, sources and observations
//   solve     one blind-deconvolution run on an observation matrix
//   sweep     phase-diagram sweep from a JSON config
//   check     exact/stable recovery certificate report
//   epinions  ratings pipeline: dense core, centering, source localization
//
// Exit codes: 0 success, 1 usage error, 2 data or validation error,
// 3 solver non-convergence on `solve`.

#include "graphdeconv/harness/certificate.hpp"
#include "graphdeconv/harness/localization.hpp"
#include "graphdeconv/harness/ratings.hpp"
#include "graphdeconv/harness/sweep.hpp"
#include "graphdeconv/io.hpp"
#include "graphdeconv/solver.hpp"
#include "graphdeconv/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace graphdeconv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

void write_vector_csv(const fs::path& path, const Vector& v) {
    io::write_matrix_csv_file(path.string(), Matrix(v));
}

Vector read_vector_csv(const std::string& path) {
    const Matrix m = io::read_matrix_csv_file(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw ValidationError("'" + path + "' must hold a single row or column");
}

struct GenOptions {
    Index n = 20;
    double edge_prob = 0.4;
    Index signals = 20;
    double theta = 0.1;
    double alpha = 0.02;
    double eta = 0.0;
    std::uint64_t seed = 1;
    std::string gso = "norm-adj";
    std::string out = ".";
};

int run_gen(const GenOptions& o) {
    const RngSeed base(o.seed);
    const Graph g = gen_er_graph(o.n, o.edge_prob, base.child(0));
    const auto dec = eig_sym(build_gso(g, parse_shift_kind(o.gso)));
    const auto g0 = gen_inverse_filter(o.n, o.alpha, base.child(1));
    const auto x0 = gen_bernoulli_gaussian(o.n, o.signals, o.theta, base.child(2));
    Matrix y = apply_spectral_filter(dec.eigvecs, inverse_response(g0), x0.values);
    y = add_noise(y, o.eta, base.child(3));

    const fs::path dir(o.out);
    fs::create_directories(dir);
    {
        auto f = open_out(dir / "graph.txt");
        io::write_edges(f, g);
    }
    write_vector_csv(dir / "g0.csv", g0.values);
    io::write_matrix_csv_file((dir / "X0.csv").string(), x0.values);
    io::write_matrix_csv_file((dir / "Y.csv").string(), y);
    std::cout << "wrote graph.txt, g0.csv, X0.csv, Y.csv to " << dir.string() << '\n';
    return kExitOk;
}

struct SolveOptions {
    std::string graph;
    std::string observations;
    std::string gso = "norm-adj";
    std::string r;
    std::optional<double> c;
    double delta = 0.0;
    double eps = 1e-6;
    int max_outer = 4;
    int max_inner = 0;
    std::string out = ".";
};

int run_solve(const SolveOptions& o) {
    const Graph g = io::read_graph_file(o.graph);
    const Matrix y = io::read_matrix_csv_file(o.observations);
    if (y.rows() != g.n_nodes())
        throw ValidationError("observations have " + std::to_string(y.rows()) + " rows but the graph has " +
                              std::to_string(g.n_nodes()) + " nodes");
    const Index n = g.n_nodes();
    const Vector r = o.r.empty() ? Vector(Vector::Ones(n)) : read_vector_csv(o.r);
    if (r.size() != n) throw ValidationError("r must have one entry per node");
    const double c = o.c.value_or(static_cast<double>(n));

    SolverConfig cfg;
    cfg.delta = o.delta;
    cfg.outer_tolerance = o.eps;
    cfg.max_outer_iterations = o.max_outer;
    cfg.max_inner_iterations = o.max_inner;

    const auto dec = eig_sym(build_gso(g, parse_shift_kind(o.gso)));
    const auto design = khatri_rao_design(y, dec.eigvecs);
    const Solution sol = reweighted_l1(design, r, c, cfg);

    const fs::path dir(o.out);
    fs::create_directories(dir);
    write_vector_csv(dir / "g_hat.csv", sol.g_hat.values);
    io::write_matrix_csv_file((dir / "X_hat.csv").string(), sol.X_hat);
    std::cout << "outer rounds: " << sol.iterations << ", inner iterations: " << sol.total_inner_iterations
              << ", objective: " << io::format_double(sol.objective)
              << ", converged: " << (sol.converged ? "yes" : "no") << '\n';
    if (!sol.converged) {
        std::cerr << "error: an inner solve did not converge\n";
        return kExitNoConvergence;
    }
    return kExitOk;
}

struct SweepOptions {
    std::string config;
    std::string out = ".";
    bool log_realizations = false;
    unsigned threads = 0;
};

int run_sweep_cmd(const SweepOptions& o) {
    const auto cfg = harness::read_sweep_config_file(o.config);
    const auto res = harness::run_sweep(cfg, o.threads);
    const fs::path dir(o.out);
    fs::create_directories(dir);
    {
        auto f = open_out(dir / "sweep.csv");
        harness::write_sweep_csv(f, res.cells);
    }
    if (o.log_realizations) {
        auto f = open_out(dir / "realizations.csv");
        harness::write_realization_log(f, res.realizations);
    }
    {
        auto f = open_out(dir / "plot_sweep.py");
        f << harness::plot_script();
    }
    int failures = 0;
    for (const auto& c : res.cells) failures += c.n_fail;
    std::cout << "experiment " << harness::to_string(cfg.experiment) << ": " << res.cells.size() << " cells, "
              << res.realizations.size() << " realizations, " << failures << " failures\n";
    return kExitOk;
}

struct CheckOptions {
    std::string graph;
    Index n = 20;
    double edge_prob = 0.4;
    std::string gso = "norm-adj";
    double alpha = 0.0;
    std::optional<Index> order;
    double beta = 0.1;
    std::string r;
    std::optional<double> c;
    double theta = 0.1;
    std::optional<double> sigma1, sigma2, sigma3, sigma4, sigma5;
    Index signals = 20;
    double eta = 0.0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_check(const CheckOptions& o) {
    harness::CertificateRequest req(o.graph.empty() ? gen_er_graph(o.n, o.edge_prob, RngSeed(o.seed).child(0))
                                                    : io::read_graph_file(o.graph));
    req.gso = parse_shift_kind(o.gso);
    req.alpha = o.alpha;
    req.filter_order = o.order;
    req.beta = o.beta;
    if (!o.r.empty()) req.r = read_vector_csv(o.r);
    req.c = o.c;
    req.params = SigmaParams::defaults(o.theta);
    if (o.sigma1) req.params.sigma1 = *o.sigma1;
    if (o.sigma2) req.params.sigma2 = *o.sigma2;
    if (o.sigma3) req.params.sigma3 = *o.sigma3;
    if (o.sigma4) req.params.sigma4 = *o.sigma4;
    if (o.sigma5) req.params.sigma5 = *o.sigma5;
    req.n_signals = o.signals;
    req.eta = o.eta;
    req.seed = o.seed;

    const auto report = harness::to_json(harness::check_certificate(req)).dump(2);
    if (o.out.empty()) {
        std::cout << report << '\n';
    } else {
        auto f = open_out(o.out);
        f << report << '\n';
    }
    return kExitOk;
}

struct EpinionsOptions {
    std::string trust;
    std::string ratings;
    Index n_min = 150;
    std::optional<Index> n_min_users;
    std::optional<Index> n_min_items;
    std::vector<double> theta_sr{0.05, 0.1, 0.2, 0.3, 0.5};
    std::uint64_t seed = 1;
    std::string gso = "norm-adj";
    std::string out = ".";
};

int run_epinions(const EpinionsOptions& o) {
    const auto ds = harness::ingest_ratings(o.trust, o.ratings);
    for (const auto& w : ds.warnings) std::cerr << "warning: " << w << '\n';
    const auto core = harness::sample_dense_core(ds, o.n_min_users.value_or(o.n_min), o.n_min_items.value_or(o.n_min),
                                                 RngSeed(o.seed));
    for (const auto& it : core.trace)
        std::cout << "core iteration " << it.iteration << ": " << it.n_users << " users, " << it.n_items
                  << " items, " << it.n_ratings << " ratings\n";
    if (core.empty()) throw ValidationError("dense-core sampling left no ratings; lower --n-min");

    const auto res = harness::run_source_localization(core.data, parse_shift_kind(o.gso), SolverConfig{}, o.theta_sr);
    const fs::path dir(o.out);
    fs::create_directories(dir);
    auto f = open_out(dir / "auc.csv");
    f << "theta_sr,auc_solver,auc_naive,n_sources,n_scored\n";
    for (const auto& row : res.rows)
        f << io::format_double(row.theta_sr) << ',' << io::format_double(row.auc_solver) << ','
          << io::format_double(row.auc_naive) << ',' << row.n_sources << ',' << row.n_scored << '\n';
    std::cout << "wrote " << (dir / "auc.csv").string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind deconvolution of sparse graph signals"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic Erdos-Renyi instance");
    gen_cmd->add_option("--nodes,-n", gen.n, "Number of nodes N")->check(CLI::Range(2, 100000));
    gen_cmd->add_option("--edge-prob", gen.edge_prob, "Edge probability p")->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--signals,-P", gen.signals, "Number of signals P")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--theta", gen.theta, "Source density")->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--alpha", gen.alpha, "Inverse-filter perturbation size")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--eta", gen.eta, "Noise level")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "Master seed");
    gen_cmd->add_option("--gso", gen.gso, "Shift operator")->check(CLI::IsMember({"adj", "norm-adj", "laplacian"}));
    gen_cmd->add_option("--out", gen.out, "Output directory");

    SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "Estimate the inverse filter and the sources");
    solve_cmd->add_option("--graph", solve.graph, "Edge-list file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--observations", solve.observations, "N x P CSV")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--gso", solve.gso, "Shift operator")->check(CLI::IsMember({"adj", "norm-adj", "laplacian"}));
    solve_cmd->add_option("--r", solve.r, "CSV with the constraint vector r (default: all ones)")
        ->check(CLI::ExistingFile);
    solve_cmd->add_option("--c", solve.c, "Constraint value c (default: N)");
    solve_cmd->add_option("--delta", solve.delta, "Reweighting damping (0: automatic)")->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--eps", solve.eps, "Outer stopping tolerance")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-outer", solve.max_outer, "Maximum reweighting rounds")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-inner", solve.max_inner, "Interior-point iteration cap per solve (0: automatic)")
        ->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--out", solve.out, "Output directory");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a phase-diagram sweep");
    sweep_cmd->add_option("--config", sweep.config, "JSON sweep config")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", sweep.out, "Output directory");
    sweep_cmd->add_flag("--log-realizations", sweep.log_realizations, "Also write realizations.csv");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0: all cores)");

    CheckOptions check;
    auto* check_cmd = app.add_subcommand("check", "Evaluate the recovery certificates");
    check_cmd->add_option("--graph", check.graph, "Edge-list file (default: a seeded ER graph)")
        ->check(CLI::ExistingFile);
    check_cmd->add_option("--nodes,-n", check.n, "ER graph size when no --graph is given")->check(CLI::Range(2, 100000));
    check_cmd->add_option("--edge-prob", check.edge_prob, "ER edge probability")->check(CLI::Range(0.0, 1.0));
    check_cmd->add_option("--gso", check.gso, "Shift operator")->check(CLI::IsMember({"adj", "norm-adj", "laplacian"}));
    check_cmd->add_option("--alpha", check.alpha, "Inverse-filter perturbation size")->check(CLI::NonNegativeNumber);
    check_cmd->add_option("--order,-L", check.order, "Use random filter taps of this order instead of --alpha")
        ->check(CLI::PositiveNumber);
    check_cmd->add_option("--beta", check.beta, "Tap perturbation size with --order")->check(CLI::NonNegativeNumber);
    check_cmd->add_option("--r", check.r, "CSV with the constraint vector r")->check(CLI::ExistingFile);
    check_cmd->add_option("--c", check.c, "Constraint value c (default: r^T g0)");
    check_cmd->add_option("--theta", check.theta, "Source density")->check(CLI::Range(0.0, 1.0));
    check_cmd->add_option("--sigma1", check.sigma1);
    check_cmd->add_option("--sigma2", check.sigma2);
    check_cmd->add_option("--sigma3", check.sigma3);
    check_cmd->add_option("--sigma4", check.sigma4);
    check_cmd->add_option("--sigma5", check.sigma5);
    check_cmd->add_option("--signals,-P", check.signals, "Number of signals P")->check(CLI::PositiveNumber);
    check_cmd->add_option("--eta", check.eta, "Noise level for the stable bound (0: skip)")
        ->check(CLI::NonNegativeNumber);
    check_cmd->add_option("--seed", check.seed, "Seed for the random draws");
    check_cmd->add_option("--out", check.out, "JSON output file (default: stdout)");

    EpinionsOptions epi;
    auto* epi_cmd = app.add_subcommand("epinions", "Source localization on a trust network with ratings");
    epi_cmd->add_option("--trust", epi.trust, "Directed trust edge list")->required()->check(CLI::ExistingFile);
    epi_cmd->add_option("--ratings", epi.ratings, "user_id,item_id,rating,timestamp CSV")
        ->required()
        ->check(CLI::ExistingFile);
    epi_cmd->add_option("--n-min", epi.n_min, "Shared default for the two thresholds below")
        ->check(CLI::PositiveNumber);
    epi_cmd->add_option("--n-min-users", epi.n_min_users, "Minimum number of raters per kept item")
        ->check(CLI::PositiveNumber);
    epi_cmd->add_option("--n-min-items", epi.n_min_items, "Minimum number of rated items per kept user")
        ->check(CLI::PositiveNumber);
    epi_cmd->add_option("--theta-sr", epi.theta_sr, "Source fractions of the earliest ratings")
        ->check(CLI::Range(0.0, 1.0));
    epi_cmd->add_option("--seed", epi.seed, "Seed for the core-sampling start user");
    epi_cmd->add_option("--gso", epi.gso, "Shift operator")->check(CLI::IsMember({"adj", "norm-adj", "laplacian"}));
    epi_cmd->add_option("--out", epi.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen_cmd) return run_gen(gen);
        if (*solve_cmd) return run_solve(solve);
        if (*sweep_cmd) return run_sweep_cmd(sweep);
        if (*check_cmd) return run_check(check);
        if (*epi_cmd) return run_epinions(epi);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
