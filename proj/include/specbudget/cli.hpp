#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "specbudget/bench.hpp"
#include "specbudget/config.hpp"
#include "specbudget/ensemble_spec.hpp"
#include "specbudget/errors.hpp"
#include "specbudget/matrix_io.hpp"
#include "specbudget/pruning.hpp"
#include "specbudget/reports.hpp"
#include "specbudget/rsvd.hpp"

// In-process drivers behind the CLI subcommands, testable without spawning
// the binary. Exit codes: 0 success, 2 flag validation, 3 I/O, 4 numerical
// failure. Per-instance errors are recorded in the report; a nonzero exit
// happens only when no instance succeeds.

namespace specbudget::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFlags = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

struct Outcome {
    int exit_code = kExitOk;
    std::string report;  // serialized payload for --out / stdout
    std::string message; // human-readable diagnostics for stderr
};

namespace detail {

inline bool is_io_kind(const Error& e) {
    const std::string& k = e.kind();
    return k == "IoError" || k == "BadMagic" || k == "BadVersion" ||
           k == "TruncatedPayload" || k == "ParseError" || k == "BadDims";
}

inline int exit_code_for(const Error& e) {
    if (e.kind() == "InvalidConfig" || e.kind() == "EmptyInput" || e.kind() == "MisalignedInput" ||
        e.kind() == "OutOfRange" || e.kind() == "BadProfile")
        return kExitFlags;
    return is_io_kind(e) ? kExitIo : kExitNumerical;
}

inline std::string render(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace detail

// ---------------------------------------------------------------- budget ---

struct BudgetCommand {
    std::vector<std::filesystem::path> inputs;         // matrix files
    std::optional<std::filesystem::path> ensemble;     // or a spec file
    BudgetConfig cfg;
    std::string format = "json"; // json | csv
};

inline Outcome run_budget(const BudgetCommand& cmd) {
    Outcome out;
    try {
        cmd.cfg.validate();
        if (cmd.format != "json" && cmd.format != "csv")
            throw InvalidConfig("format must be json or csv, got '" + cmd.format + "'");
        if (cmd.inputs.empty() == !cmd.ensemble)
            throw InvalidConfig("provide either matrix files or --ensemble, not both or neither");

        io::BudgetReport report;
        report.config = cmd.cfg;
        int io_failures = 0, numeric_failures = 0, successes = 0;

        auto process = [&](int id, const std::string& source, auto&& load) {
            io::BudgetInstanceRecord rec;
            rec.id = id;
            rec.source = source;
            try {
                const FeatureMatrix m = load();
                rec.result = compute_budget(m, cmd.cfg);
                rec.ok = true;
                ++successes;
            } catch (const Error& e) {
                rec.error = e.what();
                detail::is_io_kind(e) ? ++io_failures : ++numeric_failures;
            }
            report.records.push_back(std::move(rec));
        };

        if (cmd.ensemble) {
            const io::EnsembleSpec spec = io::load_ensemble_spec(*cmd.ensemble);
            for (std::size_t i = 0; i < spec.size(); ++i)
                process(static_cast<int>(i),
                        std::string("profile:") + profile_kind_name(spec.profiles[i].kind),
                        [&] { return spec.instance(i); });
        } else {
            for (std::size_t i = 0; i < cmd.inputs.size(); ++i)
                process(static_cast<int>(i), cmd.inputs[i].filename().string(),
                        [&] { return io::read_matrix(cmd.inputs[i]); });
        }

        out.report = cmd.format == "json" ? detail::render(io::to_json(report))
                                          : io::to_csv(report);
        if (successes == 0)
            out.exit_code = numeric_failures > 0 ? kExitNumerical : kExitIo;
    } catch (const Error& e) {
        out.exit_code = detail::exit_code_for(e);
        out.message = e.what();
    }
    return out;
}

// ----------------------------------------------------------------- bench ---

struct BenchCommand {
    int rows = 576;
    int cols = 1024;
    int count = 50;
    std::uint64_t seed = 0;
    std::string profile_family = "mixed"; // mixed | slow-decay
    std::optional<std::filesystem::path> ensemble;
    BudgetConfig base;                   // tau/k_min/k_max; method grid below
    std::vector<std::string> methods;    // subset of {"exact", "rsvd"}
    std::vector<int> t_grid = {300};
    std::vector<int> q_grid = {2};
    int p = 10;
    std::uint64_t sketch_seed = 0;
    int warmup = 3;
    std::string format = "json";
};

inline Outcome run_bench(const BenchCommand& cmd) {
    Outcome out;
    try {
        if (cmd.count < 1) throw InvalidConfig("count must be >= 1, got " + std::to_string(cmd.count));
        if (cmd.format != "json" && cmd.format != "csv")
            throw InvalidConfig("format must be json or csv, got '" + cmd.format + "'");
        if (cmd.methods.empty())
            throw InvalidConfig("at least one method required (exact, rsvd)");
        cmd.base.validate();

        bench::BenchInput input;
        if (cmd.ensemble) {
            const io::EnsembleSpec spec = io::load_ensemble_spec(*cmd.ensemble);
            input.rows = spec.n_v;
            input.cols = spec.d_v;
            input.count = spec.size();
            input.seed = spec.seed;
            input.description = "spec:" + cmd.ensemble->filename().string();
            input.instance = [spec](std::size_t i) { return spec.instance(i); };
        } else {
            if (cmd.rows < 1 || cmd.cols < 1)
                throw InvalidConfig("rows and cols must be >= 1");
            const auto profiles =
                io::named_profile_family(cmd.profile_family, cmd.rows, cmd.count);
            const int rows = cmd.rows, cols = cmd.cols;
            const std::uint64_t seed = cmd.seed;
            input.rows = rows;
            input.cols = cols;
            input.count = static_cast<std::size_t>(cmd.count);
            input.seed = seed;
            input.description = "family:" + cmd.profile_family;
            input.instance = [profiles, rows, cols, seed](std::size_t i) {
                return matrix_from_spectrum(generate_spectrum(profiles[i]), rows, cols,
                                            rng::derive(seed, i));
            };
        }

        std::vector<bench::GridPoint> grid;
        for (const std::string& method : cmd.methods) {
            if (method == "exact") {
                grid.push_back({Method::Exact, {}});
            } else if (method == "rsvd") {
                for (int t : cmd.t_grid)
                    for (int q : cmd.q_grid)
                        grid.push_back({Method::Randomized, {t, cmd.p, q, cmd.sketch_seed}});
            } else {
                throw InvalidConfig("unknown method '" + method + "' (expected exact or rsvd)");
            }
        }

        bench::BenchOptions opts;
        opts.warmup = cmd.warmup;
        const bench::BenchReport report = bench::run_bench(input, cmd.base, grid, opts);
        out.report = cmd.format == "json" ? detail::render(bench::to_json(report))
                                          : bench::to_csv(report);
    } catch (const Error& e) {
        out.exit_code = detail::exit_code_for(e);
        out.message = e.what();
    }
    return out;
}

// --------------------------------------------------------------- compare ---

struct CompareCommand {
    std::filesystem::path ensemble;
    std::string scores = "random"; // random | ramp | flat
    std::uint64_t score_seed = 0;
    BudgetConfig cfg;
    std::string format = "json";
};

inline TokenScores synthesize_scores(const std::string& kind, std::size_t tokens,
                                     std::uint64_t seed, std::size_t instance) {
    std::vector<double> s(tokens);
    if (kind == "random") {
        const std::uint64_t stream = rng::derive(seed, instance);
        for (std::size_t i = 0; i < tokens; ++i) s[i] = rng::uniform01(stream, i);
    } else if (kind == "ramp") {
        for (std::size_t i = 0; i < tokens; ++i)
            s[i] = static_cast<double>(tokens - i);
    } else if (kind == "flat") {
        for (double& v : s) v = 1.0;
    } else {
        throw InvalidConfig("unknown score kind '" + kind + "' (expected random, ramp, flat)");
    }
    return TokenScores(std::move(s));
}

inline Outcome run_compare(const CompareCommand& cmd) {
    Outcome out;
    try {
        cmd.cfg.validate();
        if (cmd.format != "json" && cmd.format != "csv")
            throw InvalidConfig("format must be json or csv, got '" + cmd.format + "'");

        const io::EnsembleSpec spec = io::load_ensemble_spec(cmd.ensemble);
        std::vector<FeatureMatrix> ensemble = spec.materialize();
        std::vector<TokenScores> scores;
        scores.reserve(ensemble.size());
        for (std::size_t i = 0; i < ensemble.size(); ++i)
            scores.push_back(synthesize_scores(
                cmd.scores, static_cast<std::size_t>(ensemble[i].rows()), cmd.score_seed, i));

        const PolicyComparison cmp = compare_policies(ensemble, scores, cmd.cfg);
        out.report = cmd.format == "json" ? detail::render(io::to_json(cmp, cmd.cfg))
                                          : io::to_csv(cmp);
    } catch (const Error& e) {
        out.exit_code = detail::exit_code_for(e);
        out.message = e.what();
    }
    return out;
}

// Write a command's report to a file or stdout.
inline int emit(const Outcome& out, const std::optional<std::filesystem::path>& path,
                std::ostream& con = std::cout, std::ostream& err = std::cerr) {
    if (!out.message.empty()) err << out.message << "\n";
    if (!out.report.empty()) {
        if (path) {
            std::ofstream f(*path, std::ios::binary | std::ios::trunc);
            if (!f) {
                err << "cannot open " << path->string() << " for writing\n";
                return kExitIo;
            }
            f << out.report;
        } else {
            con << out.report;
        }
    }
    return out.exit_code;
}

} // namespace specbudget::cli
