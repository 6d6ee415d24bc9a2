#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "specbudget/config.hpp"
#include "specbudget/errors.hpp"
#include "specbudget/matrix.hpp"
#include "specbudget/rsvd.hpp"
#include "specbudget/spectral.hpp"

// Budget determination is decoupled from token selection: any external
// scoring heuristic supplies per-token importance, and the adaptive budget
// k* is only the cut-off applied to its ranking. This module applies the
// cut-off, calibrates a matched static budget (the mean of the adaptive
// ones), and compares the two policies on retained energy and score mass.

namespace specbudget {

// One importance score per token of the originating matrix.
struct TokenScores {
    std::vector<double> scores;

    explicit TokenScores(std::vector<double> s) : scores(std::move(s)) {
        for (double v : scores)
            if (!std::isfinite(v)) throw NonFinite("token scores contain NaN or Inf");
    }

    std::size_t size() const noexcept { return scores.size(); }
};

// Indices of the k highest-scoring tokens, ascending, so the kept tokens stay
// in their original sequence order. Ties keep the lower index.
inline std::vector<int> truncate_top_k(const TokenScores& scores, int k) {
    const int n = static_cast<int>(scores.size());
    if (k < 1 || k > n)
        throw OutOfRange("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return scores.scores[static_cast<std::size_t>(a)] > scores.scores[static_cast<std::size_t>(b)];
    });
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Mean of per-instance budgets, rounded half to even. Integer arithmetic
// throughout so .5 cases are decided exactly.
inline int calibrate_static_budget(const std::vector<int>& budgets) {
    if (budgets.empty()) throw EmptyInput("no budgets to calibrate from");
    std::int64_t sum = 0;
    for (int b : budgets) sum += b;
    const std::int64_t n = static_cast<std::int64_t>(budgets.size());
    std::int64_t quot = sum / n;
    std::int64_t rem = sum % n;
    if (rem < 0) { rem += n; --quot; }
    if (2 * rem > n) return static_cast<int>(quot + 1);
    if (2 * rem < n) return static_cast<int>(quot);
    return static_cast<int>(quot % 2 == 0 ? quot : quot + 1);
}

// Dropping-ratio clamp for multi-stage pruning schedules.
inline double clamp_ratio(double rho, double lo, double hi) {
    if (!(lo >= 0.0) || !(hi >= lo) || !(hi <= 1.0))
        throw InvalidConfig("require 0 <= lo <= hi <= 1, got [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    return std::clamp(rho, lo, hi);
}

struct InstanceComparison {
    int instance = 0;
    int k_adaptive = 0;
    int k_static = 0;
    double retained_energy_adaptive = 0.0;
    double retained_energy_static = 0.0;
    double retained_score_mass_adaptive = 0.0;
    double retained_score_mass_static = 0.0;
    double deficit_adaptive = 0.0; // energy short of the tau-target C(k_raw)
    double deficit_static = 0.0;
};

struct PolicyComparison {
    std::vector<InstanceComparison> instances;
    double mean_k_adaptive = 0.0;
    int k_static = 0;
    double mean_retained_energy_adaptive = 0.0;
    double mean_retained_energy_static = 0.0;
    double mean_deficit_adaptive = 0.0;
    double mean_deficit_static = 0.0;
};

namespace detail {

// Energy credited to a policy that keeps k tokens: the fraction of total
// energy in the leading k_raw components, capped at the applied k. A policy
// keeping at least k_raw tokens retains the full tau-target energy.
inline double retained_energy(const SingularSpectrum& s, int k_raw, int k_applied) {
    return cumulative_energy_ratio(s, std::min(k_raw, k_applied));
}

inline double score_mass(const TokenScores& scores, const std::vector<int>& kept) {
    double total = 0.0;
    for (double v : scores.scores) total += v;
    if (total == 0.0) return 0.0;
    double kept_sum = 0.0;
    for (int i : kept) kept_sum += scores.scores[static_cast<std::size_t>(i)];
    return kept_sum / total;
}

} // namespace detail

// Per-instance adaptive budgets (exact or randomized per cfg), a matched
// static budget calibrated as their mean, and both policies applied to the
// external importance scores.
inline PolicyComparison compare_policies(const std::vector<FeatureMatrix>& ensemble,
                                         const std::vector<TokenScores>& scores,
                                         const BudgetConfig& cfg) {
    cfg.validate();
    if (ensemble.empty()) throw EmptyInput("ensemble is empty");
    if (ensemble.size() != scores.size())
        throw MisalignedInput("ensemble has " + std::to_string(ensemble.size()) +
                              " instances but " + std::to_string(scores.size()) +
                              " score vectors");
    for (std::size_t i = 0; i < ensemble.size(); ++i)
        if (static_cast<Eigen::Index>(scores[i].size()) != ensemble[i].rows())
            throw MisalignedInput("instance " + std::to_string(i) + " has " +
                                  std::to_string(ensemble[i].rows()) + " tokens but " +
                                  std::to_string(scores[i].size()) + " scores");

    struct InstanceState {
        SingularSpectrum spectrum;
        int k_raw = 0;
        int k_star = 0;
    };
    std::vector<InstanceState> states;
    states.reserve(ensemble.size());
    std::vector<int> adaptive_budgets;
    adaptive_budgets.reserve(ensemble.size());

    for (const FeatureMatrix& m : ensemble) {
        InstanceState st;
        if (cfg.randomized) {
            const RangeBasis basis = sketch_range(m, *cfg.randomized);
            st.spectrum = approximate_spectrum(m, basis);
        } else {
            st.spectrum = compute_singular_values(m);
        }
        const RawRank raw = select_raw_rank(st.spectrum, cfg.tau);
        st.k_raw = raw.k_raw;
        st.k_star = finalize_budget(raw.k_raw, cfg.k_min, cfg.resolve_k_max(m.rows())).k_star;
        adaptive_budgets.push_back(st.k_star);
        states.push_back(std::move(st));
    }

    PolicyComparison cmp;
    cmp.k_static = calibrate_static_budget(adaptive_budgets);
    cmp.instances.reserve(ensemble.size());

    double sum_k = 0.0, sum_ea = 0.0, sum_es = 0.0, sum_da = 0.0, sum_ds = 0.0;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        const InstanceState& st = states[i];
        InstanceComparison ic;
        ic.instance = static_cast<int>(i);
        ic.k_adaptive = st.k_star;
        ic.k_static = cmp.k_static;

        const double target = cumulative_energy_ratio(st.spectrum, st.k_raw);
        ic.retained_energy_adaptive = detail::retained_energy(st.spectrum, st.k_raw, ic.k_adaptive);
        ic.retained_energy_static = detail::retained_energy(st.spectrum, st.k_raw, ic.k_static);
        ic.deficit_adaptive = target - ic.retained_energy_adaptive;
        ic.deficit_static = target - ic.retained_energy_static;

        ic.retained_score_mass_adaptive =
            detail::score_mass(scores[i], truncate_top_k(scores[i], ic.k_adaptive));
        ic.retained_score_mass_static =
            detail::score_mass(scores[i], truncate_top_k(scores[i], ic.k_static));

        sum_k += ic.k_adaptive;
        sum_ea += ic.retained_energy_adaptive;
        sum_es += ic.retained_energy_static;
        sum_da += ic.deficit_adaptive;
        sum_ds += ic.deficit_static;
        cmp.instances.push_back(ic);
    }
    const double n = static_cast<double>(ensemble.size());
    cmp.mean_k_adaptive = sum_k / n;
    cmp.mean_retained_energy_adaptive = sum_ea / n;
    cmp.mean_retained_energy_static = sum_es / n;
    cmp.mean_deficit_adaptive = sum_da / n;
    cmp.mean_deficit_static = sum_ds / n;
    return cmp;
}

} // namespace specbudget
