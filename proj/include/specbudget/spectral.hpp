#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <string>
#include <vector>

#include "specbudget/config.hpp"
#include "specbudget/errors.hpp"
#include "specbudget/matrix.hpp"

// Exact spectral-energy analysis and adaptive rank selection.
//
// The token budget of a feature matrix is the smallest number of spectral
// components whose cumulative energy (squared singular values) reaches a
// preservation threshold tau, clamped to [k_min, k_max]. Information-dense
// inputs have flat spectra and earn large budgets; redundant inputs decay
// fast and compress hard.

namespace specbudget {

// Descending singular values plus the total-energy reference used as the
// denominator of cumulative ratios. On the exact path total_energy is the sum
// of the squared values; the randomized path substitutes the squared
// Frobenius norm of the original matrix, which the approximated values can
// only undershoot.
struct SingularSpectrum {
    std::vector<double> values;
    double total_energy = 0.0;

    // Number of available singular values.
    std::size_t n() const noexcept { return values.size(); }
};

enum class Method { Exact, Randomized };

inline const char* method_name(Method m) noexcept {
    return m == Method::Exact ? "exact" : "randomized";
}

struct RawRank {
    int k_raw = 0;
    bool saturated = false; // threshold unreachable from the available values
};

struct FinalBudget {
    int k_star = 0;
    double rho = 0.0; // dropping ratio 1 - k_star / k_max
};

struct BudgetResult {
    int k_raw = 0;
    int k_star = 0;
    double rho = 0.0;
    double achieved_ratio = 0.0; // cumulative energy fraction at k_raw
    Method method = Method::Exact;
    double elapsed_seconds = 0.0;
    bool saturated = false;
};

namespace detail {

// Values below this fraction of sigma_1 are fp noise from the decomposition;
// treating them as exact zeros keeps energy denominators clean.
inline constexpr double kSpectrumZeroTol = 1e-12;

inline void zero_trailing_noise(std::vector<double>& values) {
    if (values.empty()) return;
    const double floor = kSpectrumZeroTol * values.front();
    for (double& v : values)
        if (v < floor) v = 0.0;
}

// The one accumulation routine behind both total energies and cumulative
// partial sums. Kept out of line so every call site runs the identical
// instruction sequence: partial sums then agree bit for bit with the total
// at full width, making C(n) exactly 1 on the exact path regardless of how
// the surrounding code was vectorized or contracted.
#if defined(__GNUC__) || defined(__clang__)
[[gnu::noinline]]
#endif
inline double sum_of_squares(const double* values, std::size_t n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += values[i] * values[i];
    return total;
}

inline double sum_of_squares(const std::vector<double>& values) {
    return sum_of_squares(values.data(), values.size());
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

// All min(n_v, d_v) singular values of m, descending. Only the values are
// computed; no singular vectors.
inline SingularSpectrum compute_singular_values(const FeatureMatrix& m) {
    Eigen::BDCSVD<Matrix> svd(m.data());
    if (svd.info() != Eigen::Success)
        throw ConvergenceFailure("singular value decomposition did not converge for " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                 " input");

    SingularSpectrum s;
    const auto& sv = svd.singularValues();
    s.values.assign(sv.data(), sv.data() + sv.size());
    detail::zero_trailing_noise(s.values);
    // Same accumulation order as the cumulative scan, so C(n) is exactly 1.
    s.total_energy = detail::sum_of_squares(s.values);
    return s;
}

// C(k) = (sum of the k leading squared values) / total_energy.
inline double cumulative_energy_ratio(const SingularSpectrum& s, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > s.n())
        throw OutOfRange("k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(s.n()) + "]");
    if (!(s.total_energy > 0.0))
        throw ZeroEnergy("spectrum carries no energy");
    return detail::sum_of_squares(s.values.data(), static_cast<std::size_t>(k)) / s.total_energy;
}

// Smallest k with C(k) >= tau. The comparison is exact, no epsilon slack:
// a ratio landing precisely on tau selects that k. The scan evaluates the
// same cumulative_energy_ratio the rest of the library reports, so
// minimality holds for the reported ratios bit for bit. When no available
// value reaches tau (possible only when total_energy exceeds the sum of
// squares, i.e. on the randomized path) the full width is returned with the
// saturation flag set.
inline RawRank select_raw_rank(const SingularSpectrum& s, double tau) {
    if (!(tau > 0.0) || tau > 1.0)
        throw InvalidConfig("tau must lie in (0, 1], got " + std::to_string(tau));
    if (s.values.empty())
        throw EmptyInput("spectrum has no singular values");
    if (!(s.total_energy > 0.0))
        throw ZeroEnergy("spectrum carries no energy");

    const int n = static_cast<int>(s.n());
    for (int k = 1; k <= n; ++k) {
        if (cumulative_energy_ratio(s, k) >= tau) return {k, false};
    }
    return {n, true};
}

// Clamp the raw rank to [k_min, k_max] and derive the dropping ratio.
inline FinalBudget finalize_budget(int k_raw, int k_min, int k_max) {
    if (k_raw < 1)
        throw OutOfRange("k_raw must be >= 1, got " + std::to_string(k_raw));
    if (k_min < 1 || k_max < k_min)
        throw InvalidConfig("require 1 <= k_min <= k_max, got k_min=" +
                            std::to_string(k_min) + " k_max=" + std::to_string(k_max));
    const int k_star = std::clamp(k_raw, k_min, k_max);
    return {k_star, 1.0 - static_cast<double>(k_star) / static_cast<double>(k_max)};
}

inline FinalBudget finalize_budget(int k_raw, const BudgetConfig& cfg, Eigen::Index n_v) {
    cfg.validate();
    return finalize_budget(k_raw, cfg.k_min, cfg.resolve_k_max(n_v));
}

namespace detail {

inline BudgetResult budget_from_spectrum(const SingularSpectrum& s, const BudgetConfig& cfg,
                                         Eigen::Index n_v, Method method,
                                         const Stopwatch& timer) {
    const RawRank raw = select_raw_rank(s, cfg.tau);
    const FinalBudget fin = finalize_budget(raw.k_raw, cfg.k_min, cfg.resolve_k_max(n_v));
    BudgetResult r;
    r.k_raw = raw.k_raw;
    r.k_star = fin.k_star;
    r.rho = fin.rho;
    r.achieved_ratio = cumulative_energy_ratio(s, raw.k_raw);
    r.method = method;
    r.saturated = raw.saturated;
    r.elapsed_seconds = timer.seconds();
    return r;
}

} // namespace detail

// Exact-path budget: full singular spectrum, threshold scan, clamp.
inline BudgetResult budget_exact(const FeatureMatrix& m, const BudgetConfig& cfg) {
    cfg.validate();
    const detail::Stopwatch timer;
    const SingularSpectrum s = compute_singular_values(m);
    return detail::budget_from_spectrum(s, cfg, m.rows(), Method::Exact, timer);
}

} // namespace specbudget
