#include "lowrank/lowrank.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

void print_summary(const std::vector<lowrank::SummaryRow>& rows) {
    std::printf("%-18s %6s %8s %10s %12s %7s\n", "algo", "xi", "smnr_db", "srer_db",
                "median_db", "trials");
    for (const auto& row : rows) {
        std::printf("%-18s %6.2f %8.1f %10.2f %12.2f %7d\n", row.algo.c_str(), row.xi,
                    row.smnr_db, row.srer_db, row.srer_median_db, row.trials);
    }
}

struct RunArgs {
    std::string config_path;
    int n1 = 0;
    int n2 = 0;
    int rank = 0;
    std::string xi_csv;
    std::string smnr_csv;
    int trials = 0;
    std::uint64_t seed = 0;
    std::string algos_csv;
    std::string structured;
    std::string out;
    int threads = -1;
};

int cmd_run(const RunArgs& args, const CLI::App& cmd) {
    lowrank::SweepConfig cfg;
    if (cmd.count("--config")) {
        cfg = lowrank::load_config(args.config_path);
    }
    if (cmd.count("--n1")) cfg.n1 = args.n1;
    if (cmd.count("--n2")) cfg.n2 = args.n2;
    if (cmd.count("--rank")) cfg.r = args.rank;
    if (cmd.count("--xi")) cfg.xi_grid = lowrank::detail::parse_double_list(args.xi_csv);
    if (cmd.count("--smnr")) cfg.smnr_grid_db = lowrank::detail::parse_double_list(args.smnr_csv);
    if (cmd.count("--trials")) cfg.trials = args.trials;
    if (cmd.count("--seed")) cfg.master_seed = args.seed;
    if (cmd.count("--algos")) cfg.algos = lowrank::detail::parse_string_list(args.algos_csv);
    if (cmd.count("--structured")) cfg.structured = lowrank::detail::parse_bool(args.structured);
    if (cmd.count("--out")) cfg.output_path = args.out;
    if (cmd.count("--threads")) cfg.threads = args.threads;

    std::vector<lowrank::TrialRecord> records = lowrank::run_sweep(cfg);
    lowrank::emit_csv(records, cfg.output_path);
    std::printf("wrote %zu records to %s\n\n", records.size(), cfg.output_path.c_str());
    print_summary(lowrank::aggregate(records));
    return 0;
}

struct TraceArgs {
    std::string algo = "adls";
    int n1 = 20;
    int n2 = 20;
    int rank = 2;
    double xi = 0.3;
    double smnr = 15.0;
    std::uint64_t seed = 1;
    std::string structured = "true";
    std::string out;
};

int cmd_trace(const TraceArgs& args) {
    using namespace lowrank;
    if (args.algo != "adls" && args.algo != "adls-unstructured") {
        std::cerr << "trace: only adls and adls-unstructured expose per-iteration traces\n";
        return 1;
    }
    const bool structured = detail::parse_bool(args.structured);

    const std::uint64_t seed = split_seed(args.seed, 0, 0, 0);
    const std::uint64_t seed_x = splitmix64(seed ^ 1);
    const std::uint64_t seed_a = splitmix64(seed ^ 2);
    const std::uint64_t seed_e = splitmix64(seed ^ 3);
    const Index m = std::llround(args.xi * args.n1 * args.n2);

    Matrix X = structured ? gen_hankel_lowrank(args.n1, args.n2, args.rank, seed_x).second
                          : gen_lowrank(args.n1, args.n2, args.rank, seed_x);
    Matrix A = make_gaussian_operator(m, args.n1, args.n2, seed_a);
    Vector y = apply_operator(A, X);
    auto [y_noisy, sigma] = add_noise(y, X, args.smnr, seed_e);
    MeasurementModel model = prewhiten(A, y_noisy, NoiseSpec::isotropic(sigma), args.n1, args.n2);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!args.out.empty()) {
        file.open(args.out);
        if (!file) {
            std::cerr << "trace: cannot open '" << args.out << "' for writing\n";
            return 1;
        }
        os = &file;
    }
    *os << "iteration,residual,r_minus_z,l_minus_s\n";
    TraceSink sink = [os](int k, double residual, double r_minus_z, double l_minus_s) {
        *os << k << ',' << lowrank::detail::format_double(residual) << ','
            << lowrank::detail::format_double(r_minus_z) << ','
            << lowrank::detail::format_double(l_minus_s) << '\n';
    };

    std::optional<LinearStructure> s;
    if (args.algo == "adls") {
        s = hankel_structure(args.n1, args.n2);
    }
    Estimate est = adls_solve(model, args.rank, s, SolverOptions{}, sink);
    std::cerr << (est.converged ? "converged" : "stopped") << " after " << est.iterations
              << " iterations, srer = " << srer_db(X, est.X_hat) << " dB\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmarks for structured low-rank matrix recovery"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run a sweep and write per-trial records to CSV");
    run->add_option("--config", run_args.config_path, "Config file of key = value lines")
        ->check(CLI::ExistingFile);
    run->add_option("--n1", run_args.n1, "Matrix row count");
    run->add_option("--n2", run_args.n2, "Matrix column count");
    run->add_option("--rank", run_args.rank, "Target rank");
    run->add_option("--xi", run_args.xi_csv, "Comma-separated undersampling ratios");
    run->add_option("--smnr", run_args.smnr_csv, "Comma-separated noise levels in dB");
    run->add_option("--trials", run_args.trials, "Trials per grid cell");
    run->add_option("--seed", run_args.seed, "Master seed");
    run->add_option("--algos", run_args.algos_csv,
                    "Comma-separated algorithms: als, als-hankel, ale, adls, adls-unstructured");
    run->add_option("--structured", run_args.structured,
                    "Generate Hankel instances (true) or plain low-rank ones (false)");
    run->add_option("--out", run_args.out, "Output CSV path");
    run->add_option("--threads", run_args.threads, "Worker threads (0 = all cores)");

    TraceArgs trace_args;
    CLI::App* trace = app.add_subcommand("trace", "Trace one solve iteration by iteration");
    trace->add_option("--algo", trace_args.algo, "adls or adls-unstructured");
    trace->add_option("--n1", trace_args.n1, "Matrix row count");
    trace->add_option("--n2", trace_args.n2, "Matrix column count");
    trace->add_option("--rank", trace_args.rank, "Target rank");
    trace->add_option("--xi", trace_args.xi, "Undersampling ratio");
    trace->add_option("--smnr", trace_args.smnr, "Noise level in dB");
    trace->add_option("--seed", trace_args.seed, "Master seed");
    trace->add_option("--structured", trace_args.structured, "Hankel instance (true) or not");
    trace->add_option("--out", trace_args.out, "Trace CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_args, *run);
        }
        return cmd_trace(trace_args);
    } catch (const std::exception& e) {
        std::cerr << "bench: " << e.what() << '\n';
        return 1;
    }
}
