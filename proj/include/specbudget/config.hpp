#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>

#include "specbudget/errors.hpp"

namespace specbudget {

// Parameters of the randomized decomposition path. Defaults are the
// configuration that matches the exact path's budgets at a fraction of the
// cost on 576-token inputs.
struct SketchConfig {
    int t = 300;            // target dimension of the sketch
    int p = 10;             // oversampling columns beyond t
    int q = 2;              // power iteration rounds
    std::uint64_t seed = 0; // sketch RNG stream

    void validate() const {
        if (t < 1) throw InvalidConfig("sketch target dimension t must be >= 1, got " + std::to_string(t));
        if (p < 0) throw InvalidConfig("sketch oversampling p must be >= 0, got " + std::to_string(p));
        if (q < 0) throw InvalidConfig("power iteration count q must be >= 0, got " + std::to_string(q));
    }
};

// Budget selection parameters. k_max defaults to the token count n_v of the
// matrix being budgeted when left unset.
struct BudgetConfig {
    double tau = 0.99;                      // energy preservation threshold, in (0, 1]
    int k_min = 1;                          // lower budget clamp
    std::optional<int> k_max;               // upper budget clamp; n_v when unset
    std::optional<SketchConfig> randomized; // present => randomized path

    void validate() const {
        if (!(tau > 0.0) || tau > 1.0)
            throw InvalidConfig("tau must lie in (0, 1], got " + std::to_string(tau));
        if (k_min < 1)
            throw InvalidConfig("k_min must be >= 1, got " + std::to_string(k_min));
        if (k_max && *k_max < k_min)
            throw InvalidConfig("k_max (" + std::to_string(*k_max) +
                                ") must be >= k_min (" + std::to_string(k_min) + ")");
        if (randomized) randomized->validate();
    }

    // Concrete upper clamp for a matrix with n_v token rows.
    int resolve_k_max(Eigen::Index n_v) const {
        const int resolved = k_max ? *k_max : static_cast<int>(n_v);
        if (resolved < k_min)
            throw InvalidConfig("resolved k_max (" + std::to_string(resolved) +
                                ") is below k_min (" + std::to_string(k_min) + ")");
        return resolved;
    }
};

} // namespace specbudget
