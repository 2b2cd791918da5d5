// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/priors.hpp"

#include <cmath>

namespace isacbeam {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, VecD& nodes, VecD& weights) {
    nodes.resize(n);
    weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence up to degree n
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes(i) = -x;
        nodes(n - 1 - i) = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights(i) = w;
        weights(n - 1 - i) = w;
    }
}

double gaussian_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

}  // namespace

void validate(const AngularPrior& prior) {
    if (!(prior.variance > 0.0))
        throw std::invalid_argument("AngularPrior: variance must be > 0");
    if (!(prior.mean >= -kHalfPi && prior.mean < kHalfPi))
        throw std::invalid_argument("AngularPrior: mean must lie in [-pi/2, pi/2)");
}

void validate(const ReflectionPrior& prior) {
    if (!(prior.variance > 0.0))
        throw std::invalid_argument("ReflectionPrior: variance must be > 0");
}

double pdf(const AngularPrior& prior, double theta) {
    const double z = theta - prior.mean;
    return std::exp(-0.5 * z * z / prior.variance) /
           std::sqrt(2.0 * M_PI * prior.variance);
}

double log_pdf(const AngularPrior& prior, double theta) {
    const double z = theta - prior.mean;
    return -0.5 * z * z / prior.variance - 0.5 * (kLog2Pi + std::log(prior.variance));
}

double prior_fisher(const AngularPrior& prior) {
    validate(prior);
    return 1.0 / prior.variance;
}

QuadratureGrid quadrature_grid(const AngularPrior& prior, int n_nodes) {
    validate(prior);
    if (n_nodes < 16)
        throw std::invalid_argument("quadrature_grid: need at least 16 nodes");
    const double sd = std::sqrt(prior.variance);
    const double lo = std::max(prior.mean - 6.0 * sd, -kHalfPi);
    const double hi = std::min(prior.mean + 6.0 * sd, kHalfPi);
    if (!(lo < hi))
        throw std::invalid_argument("quadrature_grid: clipped support is empty");

    QuadratureGrid grid;
    gauss_legendre(n_nodes, grid.nodes, grid.weights);
    const double mid = 0.5 * (lo + hi);
    const double halfw = 0.5 * (hi - lo);
    for (int i = 0; i < n_nodes; ++i) {
        grid.nodes(i) = mid + halfw * grid.nodes(i);
        grid.weights(i) *= halfw;
    }
    double mass = 0.0;
    for (int i = 0; i < n_nodes; ++i) mass += grid.weights(i) * pdf(prior, grid.nodes(i));
    if (!(mass > 0.0))
        throw std::invalid_argument("quadrature_grid: prior mass on grid vanished");
    grid.weights *= 1.0 / mass;
    return grid;
}

UserPMF discretize_user_pmf(double mean, double variance, int k,
                            double support_lo, double support_hi) {
    if (k < 1) throw std::invalid_argument("discretize_user_pmf: K must be >= 1");
    if (!(variance > 0.0))
        throw std::invalid_argument("discretize_user_pmf: variance must be > 0");
    if (!(support_lo >= -kHalfPi && support_hi <= kHalfPi))
        throw std::invalid_argument(
            "discretize_user_pmf: support must lie inside [-pi/2, pi/2)");
    if (!(support_hi > support_lo))
        throw std::invalid_argument("discretize_user_pmf: zero-width support");

    const double sd = std::sqrt(variance);
    const double width = (support_hi - support_lo) / k;
    UserPMF pmf;
    pmf.angles.resize(k);
    pmf.masses.resize(k);
    pmf.source_mean = mean;
    pmf.source_variance = variance;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        const double e0 = support_lo + i * width;
        const double e1 = support_lo + (i + 1) * width;
        pmf.angles(i) = 0.5 * (e0 + e1);
        pmf.masses(i) = gaussian_cdf(e1, mean, sd) - gaussian_cdf(e0, mean, sd);
        total += pmf.masses(i);
    }
    if (!(total > 0.0))
        throw std::invalid_argument("discretize_user_pmf: support carries no mass");
    pmf.masses *= 1.0 / total;
    return pmf;
}

std::pair<double, double> default_user_support(double mean, double variance) {
    const double sd = std::sqrt(variance);
    return {std::max(mean - 6.0 * sd, -kHalfPi), std::min(mean + 6.0 * sd, kHalfPi)};
}

double kld_gaussian(const AngularPrior& p, const AngularPrior& q) {
    validate(p);
    validate(q);
    const double dm = p.mean - q.mean;
    return 0.5 * std::log(q.variance / p.variance) +
           (p.variance + dm * dm) / (2.0 * q.variance) - 0.5;
}

}  // namespace isacbeam
