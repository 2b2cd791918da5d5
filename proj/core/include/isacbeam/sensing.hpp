// SPDX-License-Identifier: Apache-2.0
//
// Sensing kernel (A1, A2, gamma) assembled by prior-weighted quadrature,
// the posterior Fisher information blocks, and the PCRB on the target angle.
//
//   PCRB_theta(W) = 1 / (prior_fisher + (2 L gamma / sigma_S^2) tr(A1 W))
//
// with A1 = int Mdot^H(t) Mdot(t) p(t) dt and A2 = int M^H(t) M(t) p(t) dt.

#ifndef ISACBEAM_SENSING_HPP
#define ISACBEAM_SENSING_HPP

#include <vector>

#include "isacbeam/geometry.hpp"
#include "isacbeam/priors.hpp"
#include "isacbeam/types.hpp"

namespace isacbeam {

struct SensingKernel {
    MatC a1;              // N_T x N_T, Hermitian PSD
    MatC a2;              // N_T x N_T, Hermitian PSD
    double gamma = 0.0;   // E|alpha|^2
    double prior_fisher = 0.0;
    int l_symbols = 1;
    double noise_power = 1.0;  // sigma_S^2
    ArrayConfig config;
    AngularPrior prior;
};

// The grid must have been built from the same prior (checked via its
// normalized mass); gamma equals the reflection variance for the zero-mean
// circular Gaussian case. Pass gamma_override >= 0 to use another zero-mean
// reflection law's second moment.
SensingKernel build_kernel(const AngularPrior& prior, const QuadratureGrid& grid,
                           const ArrayConfig& cfg, const ReflectionPrior& reflection,
                           int l_symbols, double noise_power,
                           double gamma_override = -1.0);

double pcrb_theta(const SensingKernel& kernel, const MatC& w);

// Equals pcrb_theta at the slot average of w_slots.
double pcrb_theta_multislot(const SensingKernel& kernel, const std::vector<MatC>& w_slots);

struct Pfim {
    double f_theta_theta = 0.0;
    Eigen::Matrix2d f_alpha_alpha;
    Eigen::Vector2d cross_block;  // identically zero
};

Pfim assemble_pfim(const SensingKernel& kernel, const MatC& w);

// Shared PSD gate: rejects min eigenvalue < -1e-8 * max(lambda_max, 0).
void require_psd(const MatC& w, const char* what);

}  // namespace isacbeam

#endif
