#pragma once

#include "lowrank/adls.hpp"
#include "lowrank/ale.hpp"
#include "lowrank/als.hpp"
#include "lowrank/probgen.hpp"
#include "lowrank/sensing.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace lowrank {

/// SplitMix64 finalizer, used as a 64-bit mixing hash.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic per-trial seed. Each grid coordinate is folded in through
/// one SplitMix64 round: s = mix(mix(mix(mix(master) ^ xi_i) ^ smnr_i) ^ trial_i),
/// so trials are independent of sweep order and schedule.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t xi_index,
                                std::uint64_t smnr_index, std::uint64_t trial_index) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ xi_index);
    s = splitmix64(s ^ smnr_index);
    return splitmix64(s ^ trial_index);
}

struct TrialRecord {
    std::string algo;
    int n1 = 0;
    int n2 = 0;
    int r = 0;
    Index m = 0;
    double xi = 0.0;
    double smnr_db = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double srer_db = 0.0;
    int iterations = 0;
    double runtime_ms = 0.0;
    bool converged = false;

    // Carried in memory for aggregation; not part of the CSV schema.
    double signal_energy = 0.0;
    double error_energy = 0.0;
    std::uint64_t instance_hash = 0;
};

struct SweepConfig {
    int n1 = 20;
    int n2 = 20;
    int r = 2;
    std::vector<double> xi_grid{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> smnr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
    int trials = 100;
    std::uint64_t master_seed = 1;
    std::vector<std::string> algos{"als", "ale", "adls"};
    SolverOptions solver_opts;
    bool structured = true;
    std::string output_path = "records.csv";
    int threads = 0;  // 0 = hardware concurrency
};

inline void validate(const SweepConfig& cfg) {
    if (cfg.n1 < 1 || cfg.n2 < 1) {
        throw std::invalid_argument("SweepConfig: dimensions must be positive");
    }
    if (cfg.r < 1 || cfg.r > std::min(cfg.n1, cfg.n2)) {
        throw std::invalid_argument("SweepConfig: rank out of range");
    }
    if (cfg.xi_grid.empty() || cfg.smnr_grid_db.empty() || cfg.algos.empty()) {
        throw std::invalid_argument("SweepConfig: grids and algo list must be nonempty");
    }
    for (double xi : cfg.xi_grid) {
        if (!(xi > 0.0) || xi > 1.0) {
            throw std::invalid_argument("SweepConfig: xi values must lie in (0, 1]");
        }
        if (std::llround(xi * cfg.n1 * cfg.n2) < 1) {
            throw std::invalid_argument("SweepConfig: xi too small for the matrix size");
        }
    }
    if (cfg.trials < 1) {
        throw std::invalid_argument("SweepConfig: trials must be positive");
    }
    if (cfg.threads < 0) {
        throw std::invalid_argument("SweepConfig: threads must be nonnegative");
    }
    for (const std::string& a : cfg.algos) {
        if (a != "als" && a != "als-hankel" && a != "ale" && a != "adls" &&
            a != "adls-unstructured") {
            throw std::invalid_argument("SweepConfig: unknown algorithm '" + a + "'");
        }
    }
    validate(cfg.solver_opts);
}

/// Run one named solver on a prewhitened model.
inline Estimate run_algo(const std::string& name, const MeasurementModel& model, Index r,
                         const SolverOptions& opts) {
    if (name == "als") {
        return als_solve(model, r, std::nullopt, opts);
    }
    if (name == "als-hankel") {
        return als_solve(model, r, hankel_structure(model.n1, model.n2), opts);
    }
    if (name == "ale") {
        return ale_solve(model, r, hankel_structure(model.n1, model.n2), opts);
    }
    if (name == "adls") {
        return adls_solve(model, r, hankel_structure(model.n1, model.n2), opts);
    }
    if (name == "adls-unstructured") {
        return adls_solve(model, r, std::nullopt, opts);
    }
    throw std::invalid_argument("run_algo: unknown algorithm '" + name + "'");
}

namespace detail {

inline std::uint64_t fnv1a_bytes(const void* data, std::size_t size, std::uint64_t h) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t hash_instance(const Matrix& X, const Matrix& Abar, const Vector& ybar) {
    std::uint64_t h = 1469598103934665603ULL;
    h = fnv1a_bytes(X.data(), sizeof(double) * static_cast<std::size_t>(X.size()), h);
    h = fnv1a_bytes(Abar.data(), sizeof(double) * static_cast<std::size_t>(Abar.size()), h);
    h = fnv1a_bytes(ybar.data(), sizeof(double) * static_cast<std::size_t>(ybar.size()), h);
    return h;
}

}  // namespace detail

/// Full grid sweep. Every (xi, smnr, trial) cell builds one shared problem
/// instance from its split seed and runs every requested algorithm on it.
/// Records come back in a fixed slot order independent of thread schedule.
inline std::vector<TrialRecord> run_sweep(const SweepConfig& cfg) {
    validate(cfg);
    const std::size_t n_xi = cfg.xi_grid.size();
    const std::size_t n_smnr = cfg.smnr_grid_db.size();
    const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t n_algos = cfg.algos.size();
    const std::size_t n_cells = n_xi * n_smnr * n_trials;
    std::vector<TrialRecord> records(n_cells * n_algos);

    auto run_cell = [&](std::size_t cell) {
        const std::size_t xi_i = cell / (n_smnr * n_trials);
        const std::size_t smnr_i = (cell / n_trials) % n_smnr;
        const std::size_t trial = cell % n_trials;
        const double xi = cfg.xi_grid[xi_i];
        const double smnr = cfg.smnr_grid_db[smnr_i];
        const std::uint64_t seed = split_seed(cfg.master_seed, xi_i, smnr_i, trial);
        const std::uint64_t seed_x = splitmix64(seed ^ 1);
        const std::uint64_t seed_a = splitmix64(seed ^ 2);
        const std::uint64_t seed_e = splitmix64(seed ^ 3);

        const Index m = std::llround(xi * cfg.n1 * cfg.n2);
        Matrix X = cfg.structured
                       ? gen_hankel_lowrank(cfg.n1, cfg.n2, cfg.r, seed_x).second
                       : gen_lowrank(cfg.n1, cfg.n2, cfg.r, seed_x);
        Matrix A = make_gaussian_operator(m, cfg.n1, cfg.n2, seed_a);
        Vector y = apply_operator(A, X);
        auto [y_noisy, sigma] = add_noise(y, X, smnr, seed_e);
        MeasurementModel model =
            prewhiten(A, y_noisy, NoiseSpec::isotropic(sigma), cfg.n1, cfg.n2);
        const std::uint64_t inst_hash = detail::hash_instance(X, model.Abar, model.ybar);

        for (std::size_t a = 0; a < n_algos; ++a) {
            TrialRecord& rec = records[cell * n_algos + a];
            rec.algo = cfg.algos[a];
            rec.n1 = cfg.n1;
            rec.n2 = cfg.n2;
            rec.r = cfg.r;
            rec.m = m;
            rec.xi = xi;
            rec.smnr_db = smnr;
            rec.trial = static_cast<int>(trial);
            rec.seed = seed;
            rec.signal_energy = X.squaredNorm();
            rec.instance_hash = inst_hash;

            const auto t0 = std::chrono::steady_clock::now();
            try {
                Estimate est = run_algo(cfg.algos[a], model, cfg.r, cfg.solver_opts);
                rec.srer_db = srer_db(X, est.X_hat);
                rec.iterations = est.iterations;
                rec.converged = est.converged;
                rec.error_energy = (X - est.X_hat).squaredNorm();
            } catch (const std::exception&) {
                rec.srer_db = 0.0;
                rec.iterations = 0;
                rec.converged = false;
                rec.error_energy = rec.signal_energy;
            }
            const auto t1 = std::chrono::steady_clock::now();
            rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
    };

    std::size_t n_threads = cfg.threads > 0
                                ? static_cast<std::size_t>(cfg.threads)
                                : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_cells);
    if (n_threads <= 1) {
        for (std::size_t cell = 0; cell < n_cells; ++cell) {
            run_cell(cell);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t cell = t; cell < n_cells; cell += n_threads) {
                    run_cell(cell);
                }
            });
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }
    return records;
}

struct SummaryRow {
    std::string algo;
    double xi = 0.0;
    double smnr_db = 0.0;
    double srer_db = 0.0;         // ratio of mean energies, in dB
    double srer_median_db = 0.0;  // median of per-trial values
    int trials = 0;
};

/// Collapse records to one row per (algo, xi, smnr) cell. The headline SRER
/// is 10 log10(sum of signal energies / sum of error energies), capped at
/// 300 dB; the median of the per-trial dB values rides along.
inline std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records) {
    std::map<std::tuple<std::string, double, double>, std::vector<const TrialRecord*>> groups;
    for (const TrialRecord& rec : records) {
        groups[{rec.algo, rec.xi, rec.smnr_db}].push_back(&rec);
    }
    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        SummaryRow row;
        row.algo = std::get<0>(key);
        row.xi = std::get<1>(key);
        row.smnr_db = std::get<2>(key);
        row.trials = static_cast<int>(members.size());

        double total_sig = 0.0;
        double total_err = 0.0;
        std::vector<double> values;
        values.reserve(members.size());
        for (const TrialRecord* rec : members) {
            total_sig += rec->signal_energy;
            total_err += rec->error_energy;
            values.push_back(rec->srer_db);
        }
        if (total_sig > 0.0) {
            row.srer_db = total_err <= 0.0
                              ? 300.0
                              : std::min(10.0 * std::log10(total_sig / total_err), 300.0);
        } else {
            // Energies absent (records read back from CSV): fall back to the mean.
            double sum = 0.0;
            for (double v : values) {
                sum += v;
            }
            row.srer_db = sum / static_cast<double>(values.size());
        }
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        row.srer_median_db =
            n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("csv: bad floating-point field '" + s + "'");
    }
    return v;
}

template <typename T>
inline T parse_int(const std::string& s) {
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("csv: bad integer field '" + s + "'");
    }
    return v;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "algo,n1,n2,r,m,xi,smnr_db,trial,seed,srer_db,iterations,runtime_ms,converged";

/// Write records to CSV. Floating-point fields use shortest round-trip
/// formatting so emitted files are bit-faithful and schedule-independent.
inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    }
    out << kCsvHeader << '\n';
    for (const TrialRecord& rec : records) {
        out << rec.algo << ',' << rec.n1 << ',' << rec.n2 << ',' << rec.r << ',' << rec.m << ','
            << detail::format_double(rec.xi) << ',' << detail::format_double(rec.smnr_db) << ','
            << rec.trial << ',' << rec.seed << ',' << detail::format_double(rec.srer_db) << ','
            << rec.iterations << ',' << detail::format_double(rec.runtime_ms) << ','
            << (rec.converged ? 1 : 0) << '\n';
    }
    if (!out.flush()) {
        throw std::runtime_error("emit_csv: write to '" + path + "' failed");
    }
}

inline std::vector<TrialRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("read_csv: unexpected header in '" + path + "'");
    }
    std::vector<TrialRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f = detail::split(line, ',');
        if (f.size() != 13) {
            throw std::runtime_error("read_csv: expected 13 fields, got " +
                                     std::to_string(f.size()));
        }
        TrialRecord rec;
        rec.algo = f[0];
        rec.n1 = detail::parse_int<int>(f[1]);
        rec.n2 = detail::parse_int<int>(f[2]);
        rec.r = detail::parse_int<int>(f[3]);
        rec.m = detail::parse_int<long long>(f[4]);
        rec.xi = detail::parse_double(f[5]);
        rec.smnr_db = detail::parse_double(f[6]);
        rec.trial = detail::parse_int<int>(f[7]);
        rec.seed = detail::parse_int<std::uint64_t>(f[8]);
        rec.srer_db = detail::parse_double(f[9]);
        rec.iterations = detail::parse_int<int>(f[10]);
        rec.runtime_ms = detail::parse_double(f[11]);
        rec.converged = detail::parse_int<int>(f[12]) != 0;
        records.push_back(std::move(rec));
    }
    return records;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return {};
    }
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& item : split(s, ',')) {
        out.push_back(parse_double(trim(item)));
    }
    return out;
}

inline std::vector<std::string> parse_string_list(const std::string& s) {
    std::vector<std::string> out;
    for (const std::string& item : split(s, ',')) {
        std::string t = trim(item);
        if (!t.empty()) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") {
        return true;
    }
    if (s == "false" || s == "0") {
        return false;
    }
    throw std::runtime_error("config: bad boolean '" + s + "'");
}

}  // namespace detail

/// Apply one key = value assignment to the config. Throws on unknown keys.
inline void apply_config_entry(SweepConfig& cfg, const std::string& key,
                               const std::string& value) {
    if (key == "n1") {
        cfg.n1 = detail::parse_int<int>(value);
    } else if (key == "n2") {
        cfg.n2 = detail::parse_int<int>(value);
    } else if (key == "r" || key == "rank") {
        cfg.r = detail::parse_int<int>(value);
    } else if (key == "xi_grid") {
        cfg.xi_grid = detail::parse_double_list(value);
    } else if (key == "smnr_grid_db") {
        cfg.smnr_grid_db = detail::parse_double_list(value);
    } else if (key == "trials") {
        cfg.trials = detail::parse_int<int>(value);
    } else if (key == "master_seed") {
        cfg.master_seed = detail::parse_int<std::uint64_t>(value);
    } else if (key == "algos") {
        cfg.algos = detail::parse_string_list(value);
    } else if (key == "structured") {
        cfg.structured = detail::parse_bool(value);
    } else if (key == "output_path") {
        cfg.output_path = value;
    } else if (key == "threads") {
        cfg.threads = detail::parse_int<int>(value);
    } else if (key == "epsilon") {
        cfg.solver_opts.epsilon = detail::parse_double(value);
    } else if (key == "k_max") {
        cfg.solver_opts.k_max = detail::parse_int<int>(value);
    } else if (key == "lambda") {
        cfg.solver_opts.lambda = detail::parse_double(value);
    } else if (key == "lambda_prime") {
        cfg.solver_opts.lambda_prime = detail::parse_double(value);
    } else if (key == "mu") {
        cfg.solver_opts.mu = detail::parse_double(value);
    } else if (key == "inner_tol_primal") {
        cfg.solver_opts.inner_tol_primal = detail::parse_double(value);
    } else if (key == "inner_tol_dual") {
        cfg.solver_opts.inner_tol_dual = detail::parse_double(value);
    } else if (key == "inner_max") {
        cfg.solver_opts.inner_max = detail::parse_int<int>(value);
    } else {
        throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

/// Load a flat key = value config file. Blank lines, # comments, and
/// [section] headers are ignored; list values are comma separated.
inline SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_config: cannot open '" + path + "'");
    }
    SweepConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        std::string t = detail::trim(line);
        if (t.empty() || (t.front() == '[' && t.back() == ']')) {
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not a key = value assignment");
        }
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        if (!value.empty() && value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        apply_config_entry(cfg, key, value);
    }
    return cfg;
}

}  // namespace lowrank
