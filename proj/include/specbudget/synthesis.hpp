#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "specbudget/errors.hpp"
#include "specbudget/matrix.hpp"
#include "specbudget/rng.hpp"

// Matrices with prescribed singular spectra. Every spectral claim in the test
// suites is checked against ground truth produced here: a spectrum profile
// generates the exact singular values, random rotations embed them in a dense
// matrix, and the decomposition paths must recover them.

namespace specbudget {

enum class ProfileKind { PowerLaw, Exponential, Flat, LowRankPlusNoise };

struct SpectrumProfile {
    ProfileKind kind = ProfileKind::Flat;
    int n = 0;          // spectrum length
    double alpha = 1.0; // power-law: sigma_i = i^-alpha
    double ratio = 0.5; // exponential: sigma_i = ratio^(i-1)
    int rank = 1;       // low-rank+noise: sigma_i = 1 for i <= rank
    double noise = 0.0; // low-rank+noise: sigma_i = noise for i > rank

    static SpectrumProfile power_law(int n, double alpha) {
        SpectrumProfile p;
        p.kind = ProfileKind::PowerLaw;
        p.n = n;
        p.alpha = alpha;
        return p;
    }
    static SpectrumProfile exponential(int n, double ratio) {
        SpectrumProfile p;
        p.kind = ProfileKind::Exponential;
        p.n = n;
        p.ratio = ratio;
        return p;
    }
    static SpectrumProfile flat(int n) {
        SpectrumProfile p;
        p.kind = ProfileKind::Flat;
        p.n = n;
        return p;
    }
    static SpectrumProfile low_rank_plus_noise(int n, int rank, double noise) {
        SpectrumProfile p;
        p.kind = ProfileKind::LowRankPlusNoise;
        p.n = n;
        p.rank = rank;
        p.noise = noise;
        return p;
    }
};

inline const char* profile_kind_name(ProfileKind k) noexcept {
    switch (k) {
        case ProfileKind::PowerLaw: return "power_law";
        case ProfileKind::Exponential: return "exponential";
        case ProfileKind::Flat: return "flat";
        case ProfileKind::LowRankPlusNoise: return "low_rank_plus_noise";
    }
    return "unknown";
}

// Descending singular values for a profile.
inline std::vector<double> generate_spectrum(const SpectrumProfile& profile) {
    if (profile.n < 1)
        throw BadProfile("spectrum length must be >= 1, got " + std::to_string(profile.n));
    std::vector<double> values(static_cast<std::size_t>(profile.n));
    switch (profile.kind) {
        case ProfileKind::PowerLaw:
            if (!(profile.alpha > 0.0))
                throw BadProfile("power-law exponent must be > 0, got " + std::to_string(profile.alpha));
            for (int i = 0; i < profile.n; ++i)
                values[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i + 1), -profile.alpha);
            break;
        case ProfileKind::Exponential:
            if (!(profile.ratio > 0.0) || profile.ratio >= 1.0)
                throw BadProfile("exponential ratio must lie in (0, 1), got " + std::to_string(profile.ratio));
            for (int i = 0; i < profile.n; ++i)
                values[static_cast<std::size_t>(i)] = std::pow(profile.ratio, i);
            break;
        case ProfileKind::Flat:
            for (double& v : values) v = 1.0;
            break;
        case ProfileKind::LowRankPlusNoise:
            if (profile.rank < 1 || profile.rank > profile.n)
                throw BadProfile("low-rank profile needs 1 <= rank <= n, got rank=" +
                                 std::to_string(profile.rank) + " n=" + std::to_string(profile.n));
            if (profile.noise < 0.0 || profile.noise > 1.0)
                throw BadProfile("noise level must lie in [0, 1], got " + std::to_string(profile.noise));
            for (int i = 0; i < profile.n; ++i)
                values[static_cast<std::size_t>(i)] = i < profile.rank ? 1.0 : profile.noise;
            break;
    }
    return values;
}

namespace detail {

// Seeded random matrix with orthonormal columns: thin QR of a Gaussian draw,
// column signs fixed so the R factor has non-negative diagonal. The sign fix
// makes outputs a deterministic function of the seed alone.
inline Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Matrix g(rows, cols);
    rng::fill_standard_normal(g.data(), static_cast<std::uint64_t>(g.size()), seed);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const auto rdiag = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < cols; ++j)
        if (rdiag(j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

} // namespace detail

// Embed a descending non-negative spectrum into an n_v x d_v matrix through
// seeded random rotations: U diag(values) V^T with orthonormal U, V. The
// singular values of the result equal `values`. Set `normalize` to rescale
// the spectrum to sigma_1 = 1 first; budgets are scale-invariant either way.
inline FeatureMatrix matrix_from_spectrum(std::vector<double> values, Eigen::Index n_v,
                                          Eigen::Index d_v, std::uint64_t seed,
                                          bool normalize = false) {
    if (values.empty())
        throw BadProfile("spectrum is empty");
    if (static_cast<Eigen::Index>(values.size()) > std::min(n_v, d_v))
        throw BadDims("spectrum length " + std::to_string(values.size()) +
                      " exceeds min(n_v, d_v) = " + std::to_string(std::min(n_v, d_v)));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw BadProfile("spectrum values must be finite and non-negative");
        if (i > 0 && values[i] > values[i - 1])
            throw BadProfile("spectrum values must be descending");
    }
    if (normalize && values.front() > 0.0) {
        const double scale = 1.0 / values.front();
        for (double& v : values) v *= scale;
    }

    const Eigen::Index k = static_cast<Eigen::Index>(values.size());
    const Matrix u = detail::random_orthonormal(n_v, k, rng::derive(seed, 0));
    const Matrix v = detail::random_orthonormal(d_v, k, rng::derive(seed, 1));
    const Eigen::Map<const Eigen::VectorXd> sigma(values.data(), k);
    Matrix m = u * sigma.asDiagonal() * v.transpose();
    return FeatureMatrix(std::move(m));
}

// One matrix per profile; instance seeds derive deterministically from the
// master seed and index.
inline std::vector<FeatureMatrix> make_ensemble(const std::vector<SpectrumProfile>& profiles,
                                                Eigen::Index n_v, Eigen::Index d_v,
                                                std::uint64_t seed) {
    if (profiles.empty())
        throw EmptyInput("ensemble needs at least one spectrum profile");
    std::vector<FeatureMatrix> out;
    out.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i)
        out.push_back(matrix_from_spectrum(generate_spectrum(profiles[i]), n_v, d_v,
                                           rng::derive(seed, i)));
    return out;
}

// Built-in profile families for benchmarks and ensemble specs.
//
// "mixed": decay rates spanning budgets from a few dozen tokens to a few
// hundred at tau = 0.99 on 576-token inputs, standing in for a dataset of
// images of varying information density.
inline std::vector<SpectrumProfile> mixed_decay_profiles(int n, int count) {
    if (n < 1 || count < 1)
        throw BadProfile("profile family needs n >= 1 and count >= 1");
    std::vector<SpectrumProfile> base;
    for (double r : {0.984, 0.986, 0.988, 0.989, 0.990, 0.9905, 0.991, 0.9915})
        base.push_back(SpectrumProfile::exponential(n, r));
    for (double a : {1.0, 1.1, 1.2})
        base.push_back(SpectrumProfile::power_law(n, a));
    for (int r : {n / 12, n / 9, n / 6, n / 4})
        base.push_back(SpectrumProfile::low_rank_plus_noise(n, std::max(1, r), 0.02));
    std::vector<SpectrumProfile> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(base[static_cast<std::size_t>(i) % base.size()]);
    return out;
}

// "slow-decay": spectra whose energy spreads across hundreds of components.
// These are the inputs where skipping power iterations visibly inflates
// budgets, and where static budgets lose the most.
inline std::vector<SpectrumProfile> slow_decay_profiles(int n, int count) {
    if (n < 1 || count < 1)
        throw BadProfile("profile family needs n >= 1 and count >= 1");
    std::vector<SpectrumProfile> base;
    for (double r : {0.9875, 0.989, 0.990, 0.9905, 0.991, 0.9915})
        base.push_back(SpectrumProfile::exponential(n, r));
    for (int r : {n / 3, (2 * n) / 5})
        base.push_back(SpectrumProfile::low_rank_plus_noise(n, std::max(1, r), 0.02));
    std::vector<SpectrumProfile> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(base[static_cast<std::size_t>(i) % base.size()]);
    return out;
}

} // namespace specbudget
