#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specbudget/config.hpp"
#include "specbudget/errors.hpp"
#include "specbudget/matrix.hpp"
#include "specbudget/rng.hpp"
#include "specbudget/spectral.hpp"

// Randomized spectrum approximation: project onto a sketched range basis,
// read the singular values off the small projected matrix, and select the
// budget against the exact Frobenius energy of the input. Power iterations
// sharpen the basis toward the dominant subspace; without them flat spectra
// are under-captured and budgets inflate.

namespace specbudget {

// Orthonormal basis approximating the dominant column space of a matrix.
struct RangeBasis {
    Matrix basis; // n_v x k_sub, orthonormal columns
    int k_sub = 0;
};

// Reference energy ||m||_F^2; identical to the exact spectrum's total energy
// up to floating-point accumulation order.
inline double frobenius_energy(const FeatureMatrix& m) {
    return m.data().squaredNorm();
}

namespace detail {

// One Cholesky-QR pass: Y <- Y R^-1 with R^T R = Y^T Y. Level-3 throughout,
// several times faster than Householder at sketch sizes. Returns false when
// the Gram factorization is unreliable (breakdown or condition beyond ~1e8);
// callers then orthonormalize via Householder instead. Two consecutive
// passes bring the basis to machine-precision orthonormality.
inline bool cholqr_pass(Matrix& y) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(y.cols(), y.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) return false;
    const auto diag = llt.matrixLLT().diagonal();
    const double dmax = diag.maxCoeff();
    const double dmin = diag.minCoeff();
    if (!(dmin > 1e-8 * dmax)) return false;
    llt.matrixU().solveInPlace<Eigen::OnTheRight>(y);
    return true;
}

inline void householder_orth(Matrix& y) {
    Eigen::HouseholderQR<Matrix> qr(y);
    y = qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

inline void orthonormalize(Matrix& y) {
    if (!cholqr_pass(y)) householder_orth(y);
}

inline void check_sketch_columns(const Matrix& y) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        if (y.col(j).norm() < std::numeric_limits<double>::min())
            throw RankCollapse("sketch column " + std::to_string(j) +
                               " is numerically zero (zero or underflowed input)");
    }
}

} // namespace detail

// Range finder: Y = m * Omega with Omega a seeded standard-normal
// d_v x k_sub matrix, followed by q power iteration rounds
// Y <- m (m^T Y), each round orthonormalized. The returned basis is
// orthonormalized once more, including when q = 0, so singular values of the
// projected matrix are always valid underestimates of the true ones.
inline RangeBasis sketch_range(const FeatureMatrix& m, const SketchConfig& cfg) {
    cfg.validate();
    const Eigen::Index n_v = m.rows();
    const Eigen::Index d_v = m.cols();
    const Eigen::Index k_sub =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.t) + cfg.p, std::min(n_v, d_v));

    Matrix omega(d_v, k_sub);
    rng::fill_standard_normal(omega.data(), static_cast<std::uint64_t>(omega.size()), cfg.seed);

    Matrix y = m.data() * omega;
    detail::check_sketch_columns(y);

    if (cfg.q == 0) {
        // Two passes: a single Cholesky-QR pass of an ill-conditioned sample
        // can leave the basis off orthonormal by eps * cond(Y)^2.
        detail::orthonormalize(y);
        detail::orthonormalize(y);
        return {std::move(y), static_cast<int>(k_sub)};
    }

    // m (m^T Y) costs 4 n d k flops per round; precomputing the token Gram
    // m m^T turns each round into one 2 n^2 k product. Pick whichever is
    // cheaper for these dimensions.
    const double literal_flops = 4.0 * cfg.q * static_cast<double>(n_v) * static_cast<double>(d_v) * static_cast<double>(k_sub);
    const double gram_flops = static_cast<double>(n_v) * static_cast<double>(n_v) * static_cast<double>(d_v) +
                              2.0 * cfg.q * static_cast<double>(n_v) * static_cast<double>(n_v) * static_cast<double>(k_sub);
    if (gram_flops < literal_flops) {
        Eigen::MatrixXd gram_lower = Eigen::MatrixXd::Zero(n_v, n_v);
        gram_lower.selfadjointView<Eigen::Lower>().rankUpdate(m.data());
        const Eigen::MatrixXd gram = gram_lower.selfadjointView<Eigen::Lower>();
        for (int r = 0; r < cfg.q; ++r) {
            y = gram * y;
            detail::orthonormalize(y);
        }
    } else {
        Matrix z(d_v, k_sub);
        for (int r = 0; r < cfg.q; ++r) {
            z.noalias() = m.data().transpose() * y;
            y.noalias() = m.data() * z;
            detail::orthonormalize(y);
        }
    }
    detail::orthonormalize(y);
    return {std::move(y), static_cast<int>(k_sub)};
}

// Singular values of the projected matrix B = basis^T m, descending, with the
// Frobenius energy of m as the total-energy reference. Values are obtained as
// square roots of the eigenvalues of B B^T, which costs a fraction of a small
// SVD and keeps the estimates underestimates of the true spectrum.
inline SingularSpectrum approximate_spectrum(const FeatureMatrix& m, const RangeBasis& basis) {
    if (basis.basis.rows() != m.rows())
        throw BadDims("basis has " + std::to_string(basis.basis.rows()) +
                      " rows but matrix has " + std::to_string(m.rows()));
    if (basis.basis.cols() > std::min(m.rows(), m.cols()))
        throw BadDims("basis width " + std::to_string(basis.basis.cols()) +
                      " exceeds min dimension " + std::to_string(std::min(m.rows(), m.cols())));

    const Matrix b = basis.basis.transpose() * m.data();
    Eigen::MatrixXd bbt = Eigen::MatrixXd::Zero(b.rows(), b.rows());
    bbt.selfadjointView<Eigen::Lower>().rankUpdate(b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bbt, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw ConvergenceFailure("eigendecomposition of the projected Gram matrix failed");

    SingularSpectrum s;
    const auto& ev = eig.eigenvalues(); // ascending
    s.values.resize(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        s.values[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, ev(ev.size() - 1 - i)));
    detail::zero_trailing_noise(s.values);
    s.total_energy = frobenius_energy(m);
    return s;
}

// Randomized-path budget: sketch, project, select against the Frobenius
// reference, clamp. When the approximated cumulative energy never reaches
// tau within the k_sub available values, the budget saturates at k_sub
// (before clamping) and the result is flagged rather than failed: small
// sketches are an expected operating regime.
inline BudgetResult budget_randomized(const FeatureMatrix& m, const BudgetConfig& cfg) {
    cfg.validate();
    if (!cfg.randomized)
        throw InvalidConfig("budget_randomized requires cfg.randomized to be set");
    const detail::Stopwatch timer;
    const RangeBasis basis = sketch_range(m, *cfg.randomized);
    const SingularSpectrum s = approximate_spectrum(m, basis);
    return detail::budget_from_spectrum(s, cfg, m.rows(), Method::Randomized, timer);
}

// Budget through whichever path the config selects.
inline BudgetResult compute_budget(const FeatureMatrix& m, const BudgetConfig& cfg) {
    return cfg.randomized ? budget_randomized(m, cfg) : budget_exact(m, cfg);
}

} // namespace specbudget
