// Budgets two synthetic "images" of very different information density and
// prints what each decomposition path decides. A sharply decaying spectrum
// compresses to a handful of tokens; a flat one keeps most of them.

#include <cstdio>

#include "specbudget/rsvd.hpp"
#include "specbudget/spectral.hpp"
#include "specbudget/synthesis.hpp"

using namespace specbudget;

namespace {

void show(const char* label, const FeatureMatrix& m, const BudgetConfig& cfg) {
    const BudgetResult exact = budget_exact(m, cfg);
    BudgetConfig rnd = cfg;
    rnd.randomized = SketchConfig{}; // t=300, p=10, q=2
    const BudgetResult approx = budget_randomized(m, rnd);
    std::printf("%-14s exact: k*=%3d rho=%.3f (%.1f ms)   rsvd: k*=%3d rho=%.3f (%.1f ms)\n",
                label, exact.k_star, exact.rho, exact.elapsed_seconds * 1e3, approx.k_star,
                approx.rho, approx.elapsed_seconds * 1e3);
}

} // namespace

int main() {
    const int tokens = 576;
    const int dims = 1024;

    // A redundant scene: energy concentrates in a few components.
    const FeatureMatrix simple = matrix_from_spectrum(
        generate_spectrum(SpectrumProfile::exponential(tokens, 0.9)), tokens, dims, 1);

    // An information-dense scene: energy spreads across hundreds.
    const FeatureMatrix dense = matrix_from_spectrum(
        generate_spectrum(SpectrumProfile::exponential(tokens, 0.99)), tokens, dims, 2);

    BudgetConfig cfg;
    cfg.tau = 0.99;

    std::printf("tau = %.2f, %d tokens, %d feature dims\n\n", cfg.tau, tokens, dims);
    show("simple image", simple, cfg);
    show("dense image", dense, cfg);
    return 0;
}
