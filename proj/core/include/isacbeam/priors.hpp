// SPDX-License-Identifier: Apache-2.0
//
// Gaussian angular prior for the target, the discretized Gaussian PMF for
// user locations, prior-weighted quadrature grids, and Gaussian KLD.

#ifndef ISACBEAM_PRIORS_HPP
#define ISACBEAM_PRIORS_HPP

#include "isacbeam/types.hpp"

namespace isacbeam {

struct AngularPrior {
    double mean = 0.0;      // radians, in [-pi/2, pi/2)
    double variance = 1.0;  // radians^2, > 0
};

void validate(const AngularPrior& prior);
double pdf(const AngularPrior& prior, double theta);
double log_pdf(const AngularPrior& prior, double theta);

// Fisher information of the prior alone: E[(d ln p / d theta)^2] = 1/variance.
double prior_fisher(const AngularPrior& prior);

// Gauss-Legendre nodes/weights on [mean - 6 sigma, mean + 6 sigma] clipped to
// [-pi/2, pi/2); weights rescaled so sum_i w_i p(x_i) is exactly 1.
struct QuadratureGrid {
    VecD nodes;
    VecD weights;
};

QuadratureGrid quadrature_grid(const AngularPrior& prior, int n_nodes);

// Discretized Gaussian over K equal-width intervals partitioning the support;
// masses are interval integrals renormalized to sum to 1, angles are centers.
struct UserPMF {
    VecD angles;  // strictly increasing
    VecD masses;  // nonnegative, sums to 1
    double source_mean = 0.0;
    double source_variance = 1.0;
};

UserPMF discretize_user_pmf(double mean, double variance, int k,
                            double support_lo, double support_hi);

// [mean - 6 sigma, mean + 6 sigma] clipped to [-pi/2, pi/2)
std::pair<double, double> default_user_support(double mean, double variance);

// Zero-mean circularly symmetric complex Gaussian reflection coefficient.
struct ReflectionPrior {
    double variance = 1.0;  // s = E|alpha|^2, > 0
};

void validate(const ReflectionPrior& prior);

// KL(p || q) in nats, closed Gaussian form.
double kld_gaussian(const AngularPrior& p, const AngularPrior& q);

}  // namespace isacbeam

#endif
