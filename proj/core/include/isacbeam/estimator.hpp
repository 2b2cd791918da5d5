// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo echo simulation and MAP angle estimation against the PCRB.
//
// The estimator marginalizes the reflection coefficient in closed form
// (linear-Gaussian model): with m(t) = vec(b(t) a^H(t) X) and y = vec(Y),
//
//   score(t) = ln p(t) - ln(1 + s|m|^2/sn) + s |m^H y|^2 / (sn (sn + s|m|^2))
//
// where s is the reflection variance and sn the noise power, maximized over a
// grid covering the prior +-6 sigma with one parabolic refinement.

#ifndef ISACBEAM_ESTIMATOR_HPP
#define ISACBEAM_ESTIMATOR_HPP

#include <cstdint>

#include "isacbeam/optimizer.hpp"
#include "isacbeam/priors.hpp"
#include "isacbeam/sensing.hpp"
#include "isacbeam/types.hpp"

namespace isacbeam {

struct EchoBatch {
    MatC observations;  // N_R x L
    MatC waveform;      // N_T x L, (1/L) X X^H equals the configured W
    double theta_true = 0.0;
    cxd alpha_true = 0.0;
    double noise_power = 1.0;  // sigma_S^2 used for the draw
    std::uint64_t seed = 0;
};

// X = sqrt(L) V diag(sqrt(lambda)) S^H with orthonormal constant-modulus S
// columns (DFT), so the sample covariance equals W exactly and a rank-one W
// yields constant per-symbol power. Requires L >= rank(W).
MatC synthesize_waveform(const MatC& w, int l_symbols);

// Y = alpha b(theta) a^H(theta) X + N, noise CN(0, sigma_S^2) per entry;
// sigma_S^2 = 0 gives the noiseless mode.
EchoBatch simulate_echo(const MatC& w, double theta_true, cxd alpha_true,
                        const SensingKernel& kernel, int l_symbols,
                        std::uint64_t seed);

double map_estimate(const EchoBatch& batch, const AngularPrior& prior,
                    const ReflectionPrior& reflection, int grid_points);

struct MseReport {
    double mse = 0.0;             // radians^2
    int trials = 0;
    double ci95_halfwidth = 0.0;  // radians^2
    double pcrb_reference = 0.0;
};

// theta and alpha truths drawn from their priors per trial; trial seeds are
// derived from the base seed so accumulation order never matters.
MseReport monte_carlo_mse(const MatC& w, const ProblemSpec& spec, int trials,
                          std::uint64_t seed, int grid_points = 4001);

}  // namespace isacbeam

#endif
