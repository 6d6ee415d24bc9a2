#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "specbudget/config.hpp"
#include "specbudget/pruning.hpp"
#include "specbudget/spectral.hpp"

// Report structures and their JSON/CSV serializations. Every JSON document
// carries a schema name and version matching the schema files shipped under
// schemas/; emission is deterministic so identical runs produce identical
// bytes (timing fields aside, which measure wall clock).

namespace specbudget::io {

using nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

// ---------------------------------------------------------------- budget ---

struct BudgetInstanceRecord {
    int id = 0;
    std::string source;
    bool ok = false;
    BudgetResult result;
    std::string error;
};

struct BudgetReport {
    BudgetConfig config;
    std::vector<BudgetInstanceRecord> records;
};

namespace detail {

inline json config_json(const BudgetConfig& cfg) {
    json j;
    j["tau"] = cfg.tau;
    j["k_min"] = cfg.k_min;
    if (cfg.k_max) j["k_max"] = *cfg.k_max; else j["k_max"] = nullptr;
    j["method"] = cfg.randomized ? "randomized" : "exact";
    if (cfg.randomized) {
        j["t"] = cfg.randomized->t;
        j["p"] = cfg.randomized->p;
        j["q"] = cfg.randomized->q;
        j["seed"] = cfg.randomized->seed;
    } else {
        j["t"] = nullptr;
        j["p"] = nullptr;
        j["q"] = nullptr;
        j["seed"] = nullptr;
    }
    return j;
}

// Integer-width histogram over the observed k* range, at most 12 bins.
inline json k_star_histogram(const std::vector<int>& ks) {
    json h;
    if (ks.empty()) {
        h["lo"] = 0;
        h["bin_width"] = 1;
        h["counts"] = json::array();
        return h;
    }
    const int lo = *std::min_element(ks.begin(), ks.end());
    const int hi = *std::max_element(ks.begin(), ks.end());
    const int span = hi - lo + 1;
    const int width = std::max(1, (span + 11) / 12);
    const int bins = (span + width - 1) / width;
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (int k : ks) ++counts[static_cast<std::size_t>((k - lo) / width)];
    h["lo"] = lo;
    h["bin_width"] = width;
    h["counts"] = counts;
    return h;
}

} // namespace detail

inline json to_json(const BudgetReport& report) {
    json j;
    j["schema"] = "specbudget.budget_report";
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = detail::config_json(report.config);

    json instances = json::array();
    std::vector<int> ks;
    double sum_k = 0.0;
    int errors = 0;
    for (const auto& rec : report.records) {
        json r;
        r["id"] = rec.id;
        r["source"] = rec.source;
        if (rec.ok) {
            r["k_raw"] = rec.result.k_raw;
            r["k_star"] = rec.result.k_star;
            r["rho"] = rec.result.rho;
            r["achieved_ratio"] = rec.result.achieved_ratio;
            r["saturated"] = rec.result.saturated;
            r["elapsed_ms"] = rec.result.elapsed_seconds * 1e3;
            ks.push_back(rec.result.k_star);
            sum_k += rec.result.k_star;
        } else {
            r["error"] = rec.error;
            ++errors;
        }
        instances.push_back(std::move(r));
    }
    j["instances"] = std::move(instances);

    json agg;
    agg["count"] = report.records.size();
    agg["errors"] = errors;
    if (!ks.empty()) {
        agg["mean_k_star"] = sum_k / static_cast<double>(ks.size());
        agg["min_k_star"] = *std::min_element(ks.begin(), ks.end());
        agg["max_k_star"] = *std::max_element(ks.begin(), ks.end());
    } else {
        agg["mean_k_star"] = nullptr;
        agg["min_k_star"] = nullptr;
        agg["max_k_star"] = nullptr;
    }
    agg["histogram"] = detail::k_star_histogram(ks);
    j["aggregates"] = std::move(agg);
    return j;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string to_csv(const BudgetReport& report) {
    std::string out = "id,source,k_raw,k_star,rho,achieved_ratio,saturated,elapsed_ms,error\n";
    for (const auto& rec : report.records) {
        out += std::to_string(rec.id) + "," + rec.source + ",";
        if (rec.ok) {
            out += std::to_string(rec.result.k_raw) + "," + std::to_string(rec.result.k_star) +
                   "," + detail::fmt_double(rec.result.rho) + "," +
                   detail::fmt_double(rec.result.achieved_ratio) + "," +
                   (rec.result.saturated ? "true" : "false") + "," +
                   detail::fmt_double(rec.result.elapsed_seconds * 1e3) + ",";
        } else {
            std::string msg = rec.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            out += ",,,,,," + msg;
        }
        out += "\n";
    }
    return out;
}

// --------------------------------------------------------------- compare ---

inline json to_json(const PolicyComparison& cmp, const BudgetConfig& cfg) {
    json j;
    j["schema"] = "specbudget.compare_report";
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = detail::config_json(cfg);

    json instances = json::array();
    for (const auto& ic : cmp.instances) {
        json r;
        r["id"] = ic.instance;
        r["k_adaptive"] = ic.k_adaptive;
        r["k_static"] = ic.k_static;
        r["retained_energy_adaptive"] = ic.retained_energy_adaptive;
        r["retained_energy_static"] = ic.retained_energy_static;
        r["retained_score_mass_adaptive"] = ic.retained_score_mass_adaptive;
        r["retained_score_mass_static"] = ic.retained_score_mass_static;
        r["deficit_adaptive"] = ic.deficit_adaptive;
        r["deficit_static"] = ic.deficit_static;
        instances.push_back(std::move(r));
    }
    j["instances"] = std::move(instances);

    json agg;
    agg["mean_k_adaptive"] = cmp.mean_k_adaptive;
    agg["k_static"] = cmp.k_static;
    agg["mean_retained_energy_adaptive"] = cmp.mean_retained_energy_adaptive;
    agg["mean_retained_energy_static"] = cmp.mean_retained_energy_static;
    agg["mean_deficit_adaptive"] = cmp.mean_deficit_adaptive;
    agg["mean_deficit_static"] = cmp.mean_deficit_static;
    j["aggregates"] = std::move(agg);
    return j;
}

inline std::string to_csv(const PolicyComparison& cmp) {
    std::string out =
        "id,k_adaptive,k_static,retained_energy_adaptive,retained_energy_static,"
        "retained_score_mass_adaptive,retained_score_mass_static,deficit_adaptive,deficit_static\n";
    for (const auto& ic : cmp.instances) {
        out += std::to_string(ic.instance) + "," + std::to_string(ic.k_adaptive) + "," +
               std::to_string(ic.k_static) + "," + detail::fmt_double(ic.retained_energy_adaptive) +
               "," + detail::fmt_double(ic.retained_energy_static) + "," +
               detail::fmt_double(ic.retained_score_mass_adaptive) + "," +
               detail::fmt_double(ic.retained_score_mass_static) + "," +
               detail::fmt_double(ic.deficit_adaptive) + "," +
               detail::fmt_double(ic.deficit_static) + "\n";
    }
    return out;
}

} // namespace specbudget::io
