#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "specbudget/matrix.hpp"
#include "specbudget/rsvd.hpp"
#include "specbudget/spectral.hpp"
#include "specbudget/synthesis.hpp"

using namespace specbudget;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double orthonormality_defect(const RangeBasis& b) {
    return max_abs(b.basis.transpose() * b.basis -
                   Eigen::MatrixXd::Identity(b.k_sub, b.k_sub));
}

} // namespace

TEST_CASE("frobenius energy") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 2.0;
    d(2, 2) = 1.0;
    CHECK(frobenius_energy(FeatureMatrix(d)) == Catch::Approx(14.0).epsilon(1e-14));
    CHECK(frobenius_energy(FeatureMatrix(Matrix::Identity(4, 4))) == Catch::Approx(4.0).epsilon(1e-14));

    const FeatureMatrix m = FeatureMatrix::standard_normal(8, 5, 31);
    const SingularSpectrum exact = compute_singular_values(m);
    CHECK(frobenius_energy(m) == Catch::Approx(exact.total_energy).epsilon(1e-10));
}

TEST_CASE("sketch of a rank-1 matrix captures its range") {
    const FeatureMatrix m = matrix_from_spectrum({5.0}, 8, 6, 123);
    const RangeBasis b = sketch_range(m, SketchConfig{2, 1, 1, 9});
    REQUIRE(b.k_sub == 3);
    CHECK(orthonormality_defect(b) <= 1e-8);

    const Matrix residual = m.data() - b.basis * (b.basis.transpose() * m.data());
    CHECK(residual.norm() <= 1e-8 * m.data().norm());

    // The dominant left direction lies in the basis span; with one dominant
    // component it aligns with the first basis column.
    Eigen::VectorXd u = m.data() * m.data().transpose() * Eigen::VectorXd::Ones(8);
    u.normalize();
    CHECK(std::abs(u.dot(b.basis.col(0))) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("sketching is deterministic under a fixed seed") {
    const FeatureMatrix m = FeatureMatrix::standard_normal(24, 30, 5);
    const SketchConfig cfg{8, 4, 2, 77};
    const RangeBasis a = sketch_range(m, cfg);
    const RangeBasis b = sketch_range(m, cfg);
    REQUIRE(a.basis.rows() == b.basis.rows());
    REQUIRE(a.basis.cols() == b.basis.cols());
    CHECK((a.basis.array() == b.basis.array()).all());

    const SingularSpectrum sa = approximate_spectrum(m, a);
    const SingularSpectrum sb = approximate_spectrum(m, b);
    CHECK(sa.values == sb.values);

    BudgetConfig bc;
    bc.tau = 0.9;
    bc.randomized = cfg;
    CHECK(budget_randomized(m, bc).k_star == budget_randomized(m, bc).k_star);
}

TEST_CASE("prescribed 576x1024 decay is recovered to within one percent") {
    const int n = 576;
    std::vector<double> sigma(n);
    for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = std::pow(0.95, i + 1);
    const FeatureMatrix m = matrix_from_spectrum(sigma, 576, 1024, 2024);
    const RangeBasis b = sketch_range(m, SketchConfig{300, 10, 2, 1});
    const SingularSpectrum approx = approximate_spectrum(m, b);
    for (int i = 0; i < 100; ++i) {
        const double truth = sigma[static_cast<std::size_t>(i)];
        CHECK(std::abs(approx.values[static_cast<std::size_t>(i)] - truth) <= 0.01 * truth);
    }
}

TEST_CASE("projection through a full-width basis is lossless") {
    const FeatureMatrix m = matrix_from_spectrum({5.0, 4.0, 3.0, 2.0, 1.0}, 5, 5, 8);
    const RangeBasis b = sketch_range(m, SketchConfig{5, 0, 1, 3});
    REQUIRE(b.k_sub == 5);
    const SingularSpectrum approx = approximate_spectrum(m, b);
    const SingularSpectrum exact = compute_singular_values(m);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(std::abs(approx.values[i] - exact.values[i]) <= 1e-8 * exact.values[i]);
}

TEST_CASE("rank-1 matrix under a wider sketch yields one dominant value") {
    const FeatureMatrix m = matrix_from_spectrum({5.0}, 8, 6, 123);
    const RangeBasis b = sketch_range(m, SketchConfig{2, 1, 1, 9});
    const SingularSpectrum s = approximate_spectrum(m, b);
    REQUIRE(s.n() == 3);
    CHECK(s.values[0] == Catch::Approx(5.0).epsilon(1e-8));
    CHECK(s.values[1] <= 1e-7 * 5.0);
    CHECK(s.values[2] <= 1e-7 * 5.0);
}

TEST_CASE("approximated values interlace the exact spectrum") {
    const FeatureMatrix m = FeatureMatrix::standard_normal(64, 48, 91);
    const SingularSpectrum exact = compute_singular_values(m);
    const RangeBasis b = sketch_range(m, SketchConfig{20, 5, 2, 17});
    const SingularSpectrum approx = approximate_spectrum(m, b);
    for (std::size_t i = 0; i < approx.n(); ++i)
        CHECK(approx.values[i] <= exact.values[i] + 1e-8 * exact.values[0]);
}

TEST_CASE("budget_randomized") {
    SECTION("rank-1 input needs one token at any tau") {
        const FeatureMatrix m = matrix_from_spectrum({2.5}, 12, 9, 3);
        BudgetConfig cfg;
        cfg.tau = 0.999;
        cfg.randomized = SketchConfig{1, 0, 0, 5};
        const BudgetResult r = budget_randomized(m, cfg);
        CHECK(r.k_raw == 1);
        CHECK(r.method == Method::Randomized);
        CHECK_FALSE(r.saturated);
    }
    SECTION("narrow sketch of a flat spectrum saturates at k_sub") {
        const FeatureMatrix m = matrix_from_spectrum(std::vector<double>(64, 1.0), 64, 80, 7);
        BudgetConfig cfg;
        cfg.tau = 0.99;
        cfg.randomized = SketchConfig{16, 0, 1, 7};
        const BudgetResult r = budget_randomized(m, cfg);
        CHECK(r.saturated);
        CHECK(r.k_raw == 16);
        CHECK(r.k_star == 16);
        CHECK(r.achieved_ratio < 0.99);
    }
    SECTION("missing sketch parameters are rejected") {
        BudgetConfig cfg;
        CHECK_THROWS_AS(budget_randomized(FeatureMatrix(Matrix::Identity(4, 4)), cfg),
                        InvalidConfig);
    }
    SECTION("zero matrix collapses the sketch") {
        BudgetConfig cfg;
        cfg.randomized = SketchConfig{2, 0, 0, 1};
        CHECK_THROWS_AS(budget_randomized(FeatureMatrix(Matrix::Zero(6, 6)), cfg), RankCollapse);
    }
    SECTION("small mixed ensemble tracks the exact budgets") {
        std::vector<SpectrumProfile> profiles;
        for (double r : {0.85, 0.88, 0.9})
            profiles.push_back(SpectrumProfile::exponential(96, r));
        for (double a : {1.2, 1.5})
            profiles.push_back(SpectrumProfile::power_law(96, a));
        for (int r : {8, 16, 24})
            profiles.push_back(SpectrumProfile::low_rank_plus_noise(96, r, 0.02));
        const auto ensemble = make_ensemble(profiles, 96, 128, 55);
        BudgetConfig exact_cfg;
        exact_cfg.tau = 0.97;
        BudgetConfig rand_cfg = exact_cfg;
        rand_cfg.randomized = SketchConfig{32, 8, 2, 13};
        double mean_exact = 0.0, mean_rand = 0.0;
        for (const FeatureMatrix& m : ensemble) {
            mean_exact += budget_exact(m, exact_cfg).k_star;
            mean_rand += budget_randomized(m, rand_cfg).k_star;
        }
        mean_exact /= static_cast<double>(ensemble.size());
        mean_rand /= static_cast<double>(ensemble.size());
        CHECK(std::abs(mean_rand - mean_exact) <= 2.0);
    }
}

TEST_CASE("basis stays orthonormal across the parameter grid") {
    const FeatureMatrix dense = FeatureMatrix::standard_normal(40, 32, 2);
    const FeatureMatrix decaying =
        matrix_from_spectrum(generate_spectrum(SpectrumProfile::exponential(32, 0.7)), 40, 32, 2);
    for (const FeatureMatrix* m : {&dense, &decaying})
        for (int t : {4, 16, 40})
            for (int p : {0, 5})
                for (int q : {0, 1, 2}) {
                    const RangeBasis b = sketch_range(*m, SketchConfig{t, p, q, 101});
                    INFO("t=" << t << " p=" << p << " q=" << q);
                    CHECK(orthonormality_defect(b) <= 1e-8);
                }
}

TEST_CASE("captured energy never exceeds the Frobenius reference") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FeatureMatrix m = FeatureMatrix::standard_normal(30, 22, seed);
        const RangeBasis b = sketch_range(m, SketchConfig{8, 4, 1, seed});
        const SingularSpectrum s = approximate_spectrum(m, b);
        CHECK(detail::sum_of_squares(s.values) <= s.total_energy * (1.0 + 1e-12));
    }
}

TEST_CASE("captured energy is non-decreasing in the power iteration count") {
    for (std::uint64_t seed = 40; seed < 48; ++seed) {
        const FeatureMatrix m = matrix_from_spectrum(
            generate_spectrum(SpectrumProfile::exponential(48, 0.9)), 64, 48, seed);
        double prev = -1.0;
        for (int q = 0; q <= 3; ++q) {
            const RangeBasis b = sketch_range(m, SketchConfig{12, 4, q, seed});
            const double captured = detail::sum_of_squares(approximate_spectrum(m, b).values);
            CHECK(captured >= prev - 1e-12 * frobenius_energy(m));
            prev = captured;
        }
    }
}

TEST_CASE("full-width sketches reproduce exact budgets on small instances") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const int rows = 8 + static_cast<int>(rng::word_at(seed, 0) % 57);
        const int cols = 8 + static_cast<int>(rng::word_at(seed, 1) % 57);
        const FeatureMatrix m = FeatureMatrix::standard_normal(rows, cols, seed + 7);
        const int width = static_cast<int>(std::min(rows, cols));

        BudgetConfig exact_cfg;
        exact_cfg.tau = 0.95;
        BudgetConfig rand_cfg = exact_cfg;
        rand_cfg.randomized = SketchConfig{width, 0, 1, seed};

        CHECK(budget_randomized(m, rand_cfg).k_raw == budget_exact(m, exact_cfg).k_raw);
    }
}

TEST_CASE("budget cost grows with t like the sketch term, not worse") {
    // Work per call is dominated by n*d*t GEMM and t^2*d factorization terms.
    // Cubic-in-t behavior would blow far past the doubled formula ratio even
    // on a noisy machine; medians over repeats keep the measurement stable.
    const FeatureMatrix m = FeatureMatrix::standard_normal(384, 512, 3);
    const double n = 384, d = 512;
    auto formula = [&](int t) { return n * d * t + static_cast<double>(t) * t * d; };
    auto median_ms = [&](int t) {
        BudgetConfig cfg;
        cfg.tau = 0.95;
        cfg.randomized = SketchConfig{t, 8, 2, 5};
        (void)budget_randomized(m, cfg); // warm
        std::vector<double> runs;
        for (int r = 0; r < 5; ++r)
            runs.push_back(budget_randomized(m, cfg).elapsed_seconds);
        std::sort(runs.begin(), runs.end());
        return runs[2];
    };
    const double m32 = median_ms(32);
    const double m288 = median_ms(288);
    const double formula_ratio = formula(288) / formula(32);
    CHECK(m288 / m32 <= 2.5 * formula_ratio);
}

TEST_CASE("basis-matrix mismatches are rejected") {
    const FeatureMatrix m = FeatureMatrix::standard_normal(10, 8, 1);
    RangeBasis wrong_rows;
    wrong_rows.basis = Matrix::Identity(9, 3);
    wrong_rows.k_sub = 3;
    CHECK_THROWS_AS(approximate_spectrum(m, wrong_rows), BadDims);

    RangeBasis too_wide;
    too_wide.basis = Matrix::Identity(10, 9);
    too_wide.k_sub = 9;
    CHECK_THROWS_AS(approximate_spectrum(m, too_wide), BadDims);
}
