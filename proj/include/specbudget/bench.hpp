#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "specbudget/config.hpp"
#include "specbudget/matrix.hpp"
#include "specbudget/reports.hpp"
#include "specbudget/rsvd.hpp"
#include "specbudget/spectral.hpp"

// Latency benchmark over a grid of decomposition configurations. Each
// configuration runs against the same seeded instances, single-threaded,
// with warmup calls before any timing, and reports the median and mean
// per-instance budget latency alongside the budgets themselves. Budgets in
// bench runs are exactly what the budget command produces for the same
// inputs; instrumentation never perturbs results.

namespace specbudget::bench {

struct GridPoint {
    Method method = Method::Exact;
    SketchConfig sketch; // used when method == Randomized
};

struct BenchRecord {
    GridPoint point;
    double median_latency_ms = 0.0;
    double mean_latency_ms = 0.0;
    double mean_k_star = 0.0;
    double total_time_s = 0.0; // summed budget-call time, synthesis excluded
};

struct BenchOptions {
    int warmup = 3;
    int min_timed_iterations = 20; // instances are cycled up to this floor
};

struct BenchInput {
    std::function<FeatureMatrix(std::size_t)> instance; // deterministic by index
    std::size_t count = 0;
    int rows = 0;
    int cols = 0;
    std::string description; // for the report environment block
    std::uint64_t seed = 0;
};

inline BenchRecord bench_configuration(const BenchInput& input, const BudgetConfig& base,
                                       const GridPoint& point, const BenchOptions& opts) {
    if (input.count == 0) throw InvalidConfig("benchmark needs at least one instance");

    BudgetConfig cfg = base;
    cfg.randomized = point.method == Method::Randomized
                         ? std::optional<SketchConfig>(point.sketch)
                         : std::nullopt;
    cfg.validate();

    for (int w = 0; w < opts.warmup; ++w) {
        const FeatureMatrix m = input.instance(static_cast<std::size_t>(w) % input.count);
        (void)compute_budget(m, cfg);
    }

    const std::size_t iterations =
        std::max<std::size_t>(input.count, static_cast<std::size_t>(opts.min_timed_iterations));
    std::vector<double> latencies_ms;
    latencies_ms.reserve(iterations);
    double sum_k = 0.0;
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < iterations; ++i) {
        const std::size_t idx = i % input.count;
        const FeatureMatrix m = input.instance(idx);
        const BudgetResult r = compute_budget(m, cfg);
        latencies_ms.push_back(r.elapsed_seconds * 1e3);
        if (i < input.count) {
            sum_k += r.k_star;
            ++distinct;
        }
    }

    BenchRecord rec;
    rec.point = point;
    std::vector<double> sorted = latencies_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    rec.median_latency_ms = sorted.size() % 2 == 1
                                ? sorted[mid]
                                : 0.5 * (sorted[mid - 1] + sorted[mid]);
    double total = 0.0;
    for (double v : latencies_ms) total += v;
    rec.mean_latency_ms = total / static_cast<double>(latencies_ms.size());
    rec.total_time_s = total / 1e3;
    rec.mean_k_star = sum_k / static_cast<double>(distinct);
    return rec;
}

struct BenchReport {
    BenchInput input; // environment metadata only; instances not serialized
    BudgetConfig base;
    BenchOptions options;
    std::vector<BenchRecord> records;
};

inline BenchReport run_bench(const BenchInput& input, const BudgetConfig& base,
                             const std::vector<GridPoint>& grid, const BenchOptions& opts) {
    if (grid.empty()) throw InvalidConfig("benchmark grid is empty");
    BenchReport report;
    report.input = input;
    report.base = base;
    report.options = opts;
    report.records.reserve(grid.size());
    for (const GridPoint& point : grid)
        report.records.push_back(bench_configuration(input, base, point, opts));
    return report;
}

inline nlohmann::json to_json(const BenchReport& report) {
    nlohmann::json j;
    j["schema"] = "specbudget.bench_report";
    j["schema_version"] = io::kReportSchemaVersion;

    nlohmann::json env;
    env["rows"] = report.input.rows;
    env["cols"] = report.input.cols;
    env["count"] = report.input.count;
    env["ensemble"] = report.input.description;
    env["seed"] = report.input.seed;
    env["tau"] = report.base.tau;
    env["warmup"] = report.options.warmup;
    j["environment"] = std::move(env);

    nlohmann::json records = nlohmann::json::array();
    for (const BenchRecord& rec : report.records) {
        nlohmann::json r;
        r["method"] = method_name(rec.point.method);
        if (rec.point.method == Method::Randomized) {
            r["t"] = rec.point.sketch.t;
            r["p"] = rec.point.sketch.p;
            r["q"] = rec.point.sketch.q;
        } else {
            r["t"] = nullptr;
            r["p"] = nullptr;
            r["q"] = nullptr;
        }
        r["median_latency_ms"] = rec.median_latency_ms;
        r["mean_latency_ms"] = rec.mean_latency_ms;
        r["mean_k_star"] = rec.mean_k_star;
        r["total_time_s"] = rec.total_time_s;
        records.push_back(std::move(r));
    }
    j["records"] = std::move(records);
    return j;
}

inline std::string to_csv(const BenchReport& report) {
    std::string out = "method,t,p,q,median_latency_ms,mean_latency_ms,mean_k_star,total_time_s\n";
    for (const BenchRecord& rec : report.records) {
        out += method_name(rec.point.method);
        if (rec.point.method == Method::Randomized)
            out += "," + std::to_string(rec.point.sketch.t) + "," +
                   std::to_string(rec.point.sketch.p) + "," + std::to_string(rec.point.sketch.q);
        else
            out += ",,,";
        out += "," + io::detail::fmt_double(rec.median_latency_ms) + "," +
               io::detail::fmt_double(rec.mean_latency_ms) + "," +
               io::detail::fmt_double(rec.mean_k_star) + "," +
               io::detail::fmt_double(rec.total_time_s) + "\n";
    }
    return out;
}

} // namespace specbudget::bench
