// specbudget - adaptive token budgets for feature matrices from spectral
// energy, with exact and randomized decomposition paths.
//
//   specbudget budget  --ensemble spec.json --tau 0.99 --out report.json
//   specbudget budget  features.eapm fixtures/*.csv --method rsvd --t 300
//   specbudget bench   --rows 576 --cols 1024 --count 50 --methods exact,rsvd
//   specbudget compare --ensemble spec.json --scores random --tau 0.999

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "specbudget/cli.hpp"

namespace {

struct SketchFlags {
    std::string method = "exact";
    int t = 300;
    int p = 10;
    int q = 2;
    std::uint64_t seed = 0;
};

void add_budget_config_flags(CLI::App* app, specbudget::BudgetConfig& cfg, SketchFlags& sk) {
    app->add_option("--tau", cfg.tau, "Energy preservation threshold in (0, 1]")
        ->capture_default_str();
    app->add_option("--k-min", cfg.k_min, "Lower budget clamp")->capture_default_str();
    app->add_option("--k-max", [&cfg](const std::vector<std::string>& vals) {
        cfg.k_max = std::stoi(vals.front());
        return true;
    }, "Upper budget clamp (default: token count n_v)")->expected(1);
    app->add_option("--method", sk.method, "Decomposition path: exact or rsvd")
        ->check(CLI::IsMember({"exact", "rsvd"}))
        ->capture_default_str();
    app->add_option("--t", sk.t, "Sketch target dimension (rsvd)")->capture_default_str();
    app->add_option("--p", sk.p, "Sketch oversampling (rsvd)")->capture_default_str();
    app->add_option("--q", sk.q, "Power iteration rounds (rsvd)")->capture_default_str();
    app->add_option("--seed", sk.seed, "Sketch RNG seed (rsvd)")->capture_default_str();
}

void apply_sketch_flags(specbudget::BudgetConfig& cfg, const SketchFlags& sk) {
    if (sk.method == "rsvd")
        cfg.randomized = specbudget::SketchConfig{sk.t, sk.p, sk.q, sk.seed};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral token-budget engine"};
    app.require_subcommand(1);

    // budget
    specbudget::cli::BudgetCommand budget;
    SketchFlags budget_sketch;
    std::optional<std::filesystem::path> budget_out;
    CLI::App* cmd_budget = app.add_subcommand("budget", "Per-instance adaptive budgets");
    cmd_budget->add_option("files", budget.inputs, "Matrix files (.eapm binary or .csv)");
    cmd_budget->add_option("--ensemble", budget.ensemble, "Ensemble spec JSON file");
    add_budget_config_flags(cmd_budget, budget.cfg, budget_sketch);
    cmd_budget->add_option("--format", budget.format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd_budget->add_option("--out", budget_out, "Report destination (default: stdout)");

    // bench
    specbudget::cli::BenchCommand bench;
    SketchFlags bench_base_sketch; // tau/k-min/k-max reuse; method ignored
    std::optional<std::filesystem::path> bench_out;
    CLI::App* cmd_bench = app.add_subcommand("bench", "Latency benchmark over a method grid");
    cmd_bench->add_option("--rows", bench.rows, "Tokens per instance")->capture_default_str();
    cmd_bench->add_option("--cols", bench.cols, "Feature dimension")->capture_default_str();
    cmd_bench->add_option("--count", bench.count, "Instances per configuration")
        ->capture_default_str();
    cmd_bench->add_option("--seed", bench.seed, "Ensemble seed")->capture_default_str();
    cmd_bench->add_option("--profiles", bench.profile_family,
                          "Built-in spectrum family: mixed or slow-decay")
        ->capture_default_str();
    cmd_bench->add_option("--ensemble", bench.ensemble, "Ensemble spec JSON (overrides --rows/--cols/--profiles)");
    cmd_bench->add_option("--tau", bench.base.tau, "Energy preservation threshold")
        ->capture_default_str();
    cmd_bench->add_option("--k-min", bench.base.k_min, "Lower budget clamp")->capture_default_str();
    cmd_bench->add_option("--k-max", [&bench](const std::vector<std::string>& vals) {
        bench.base.k_max = std::stoi(vals.front());
        return true;
    }, "Upper budget clamp")->expected(1);
    cmd_bench->add_option("--methods", bench.methods, "Methods to benchmark: exact, rsvd")
        ->delimiter(',')
        ->default_val(std::vector<std::string>{"exact", "rsvd"});
    cmd_bench->add_option("--t-grid", bench.t_grid, "Sketch target dimensions (rsvd)")
        ->delimiter(',')
        ->capture_default_str();
    cmd_bench->add_option("--q-grid", bench.q_grid, "Power iteration counts (rsvd)")
        ->delimiter(',')
        ->capture_default_str();
    cmd_bench->add_option("--p", bench.p, "Sketch oversampling")->capture_default_str();
    cmd_bench->add_option("--sketch-seed", bench.sketch_seed, "Sketch RNG seed")
        ->capture_default_str();
    cmd_bench->add_option("--warmup", bench.warmup, "Warmup calls before timing")
        ->capture_default_str();
    cmd_bench->add_option("--format", bench.format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd_bench->add_option("--out", bench_out, "Report destination (default: stdout)");
    (void)bench_base_sketch;

    // compare
    specbudget::cli::CompareCommand compare;
    SketchFlags compare_sketch;
    std::optional<std::filesystem::path> compare_out;
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "Adaptive vs calibrated static budget policies");
    cmd_compare->add_option("--ensemble", compare.ensemble, "Ensemble spec JSON file")
        ->required();
    cmd_compare->add_option("--scores", compare.scores,
                            "Synthetic importance scores: random, ramp, or flat")
        ->check(CLI::IsMember({"random", "ramp", "flat"}))
        ->capture_default_str();
    cmd_compare->add_option("--score-seed", compare.score_seed, "Score RNG seed")
        ->capture_default_str();
    add_budget_config_flags(cmd_compare, compare.cfg, compare_sketch);
    cmd_compare->add_option("--format", compare.format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd_compare->add_option("--out", compare_out, "Report destination (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return specbudget::cli::kExitFlags;
    }

    if (cmd_budget->parsed()) {
        apply_sketch_flags(budget.cfg, budget_sketch);
        return specbudget::cli::emit(specbudget::cli::run_budget(budget), budget_out);
    }
    if (cmd_bench->parsed()) {
        return specbudget::cli::emit(specbudget::cli::run_bench(bench), bench_out);
    }
    if (cmd_compare->parsed()) {
        apply_sketch_flags(compare.cfg, compare_sketch);
        return specbudget::cli::emit(specbudget::cli::run_compare(compare), compare_out);
    }
    return specbudget::cli::kExitFlags;
}
