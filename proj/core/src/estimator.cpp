// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/estimator.hpp"

#include <cmath>

#include "isacbeam/geometry.hpp"
#include "isacbeam/rng.hpp"

namespace isacbeam {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

double clamp_angle(double theta) {
    return std::clamp(theta, -kHalfPi, kHalfPi - 1e-12);
}

}  // namespace

MatC synthesize_waveform(const MatC& w, int l_symbols) {
    if (l_symbols < 1)
        throw std::invalid_argument("synthesize_waveform: L must be >= 1");
    require_psd(w, "synthesize_waveform");
    const int n = static_cast<int>(w.rows());
    Eigen::SelfAdjointEigenSolver<MatC> es(MatC(0.5 * (w + w.adjoint())));
    const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);

    std::vector<int> active;
    for (int i = n - 1; i >= 0; --i)
        if (es.eigenvalues()(i) > 1e-12 * lam_max && es.eigenvalues()(i) > 0.0)
            active.push_back(i);
    const int rank = static_cast<int>(active.size());
    if (rank > l_symbols)
        throw std::invalid_argument("synthesize_waveform: L smaller than rank(W)");

    MatC x = MatC::Zero(n, l_symbols);
    const double scale = std::sqrt(static_cast<double>(l_symbols));
    for (int c = 0; c < rank; ++c) {
        const int idx = active[c];
        const double amp = scale * std::sqrt(es.eigenvalues()(idx));
        // c-th DFT column of length L, entries of modulus 1/sqrt(L)
        for (int l = 0; l < l_symbols; ++l) {
            const double phase = -2.0 * M_PI * l * c / l_symbols;
            const cxd s(std::cos(phase) / scale, std::sin(phase) / scale);
            x.col(l) += amp * std::conj(s) * es.eigenvectors().col(idx);
        }
    }
    return x;
}

EchoBatch simulate_echo(const MatC& w, double theta_true, cxd alpha_true,
                        const SensingKernel& kernel, int l_symbols,
                        std::uint64_t seed) {
    EchoBatch batch;
    batch.waveform = synthesize_waveform(w, l_symbols);
    batch.theta_true = theta_true;
    batch.alpha_true = alpha_true;
    batch.noise_power = kernel.noise_power;
    batch.seed = seed;

    const ResponsePair rp = response_pair(theta_true, kernel.config);
    batch.observations = alpha_true * (rp.m * batch.waveform);
    if (kernel.noise_power > 0.0) {
        Rng rng(seed);
        for (int l = 0; l < batch.observations.cols(); ++l)
            for (int r = 0; r < batch.observations.rows(); ++r)
                batch.observations(r, l) += rng.cnormal(kernel.noise_power);
    }
    return batch;
}

double map_estimate(const EchoBatch& batch, const AngularPrior& prior,
                    const ReflectionPrior& reflection, int grid_points) {
    validate(prior);
    validate(reflection);
    if (grid_points < 3)
        throw std::invalid_argument("map_estimate: grid needs at least 3 points");
    const double sd = std::sqrt(prior.variance);
    const double lo = clamp_angle(prior.mean - 6.0 * sd);
    const double hi = clamp_angle(prior.mean + 6.0 * sd);
    const double h = (hi - lo) / (grid_points - 1);
    const double s = reflection.variance;
    const double sn = batch.noise_power;
    const int n_rx = static_cast<int>(batch.observations.rows());
    const int n_tx = static_cast<int>(batch.waveform.rows());
    ArrayConfig cfg;
    cfg.n_rx = n_rx;
    cfg.n_tx = n_tx;

    auto score_at = [&](double theta) {
        const VecC a = steering(SteeringKind::tx, theta, cfg).entries;
        const VecC b = steering(SteeringKind::rx, theta, cfg).entries;
        // m = vec(b v) with v = a^H X; ||m||^2 = ||v||^2 ||b||^2,
        // m^H y = b^H Y v^H (entrywise collapsed)
        const Eigen::RowVectorXcd v = a.adjoint() * batch.waveform;
        const double m_norm2 = v.squaredNorm() * static_cast<double>(n_rx);
        const cxd mhy = (b.adjoint() * batch.observations * v.adjoint())(0, 0);
        if (sn <= 0.0) {
            // noiseless limit: match energy exactly, prior breaks ties
            return log_pdf(prior, theta) +
                   (m_norm2 > 0.0 ? std::norm(mhy) / m_norm2 : 0.0);
        }
        return log_pdf(prior, theta) - std::log(1.0 + s * m_norm2 / sn) +
               s * std::norm(mhy) / (sn * (sn + s * m_norm2));
    };

    VecD scores(grid_points);
    int best = 0;
    for (int i = 0; i < grid_points; ++i) {
        scores(i) = score_at(lo + i * h);
        if (scores(i) > scores(best)) best = i;
    }
    double theta_hat = lo + best * h;
    if (best > 0 && best + 1 < grid_points) {
        const double s0 = scores(best - 1), s1 = scores(best), s2 = scores(best + 1);
        const double den = s0 - 2.0 * s1 + s2;
        if (den < 0.0) theta_hat += 0.5 * h * (s0 - s2) / den;
    }
    return theta_hat;
}

MseReport monte_carlo_mse(const MatC& w, const ProblemSpec& spec, int trials,
                          std::uint64_t seed, int grid_points) {
    if (trials < 50)
        throw std::invalid_argument("monte_carlo_mse: need at least 50 trials");
    const SensingKernel& kernel = spec.kernel;
    const AngularPrior& prior = kernel.prior;
    const ReflectionPrior reflection{kernel.gamma};

    // Kahan-compensated sums keep accumulation order-independent to ~1e-12.
    double sum = 0.0, comp = 0.0;
    double sum_sq = 0.0, comp_sq = 0.0;
    auto add = [](double& acc, double& c, double v) {
        const double y = v - c;
        const double t = acc + y;
        c = (t - acc) - y;
        acc = t;
    };

    for (int t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
        const double theta_true =
            clamp_angle(prior.mean + std::sqrt(prior.variance) * rng.normal());
        const cxd alpha_true = rng.cnormal(kernel.gamma);
        const EchoBatch batch =
            simulate_echo(w, theta_true, alpha_true, kernel, kernel.l_symbols,
                          rng.next_u64());
        const double theta_hat = map_estimate(batch, prior, reflection, grid_points);
        const double err = theta_hat - theta_true;
        add(sum, comp, err * err);
        add(sum_sq, comp_sq, err * err * err * err);
    }

    MseReport report;
    report.trials = trials;
    report.mse = sum / trials;
    const double var_sq = std::max(sum_sq / trials - report.mse * report.mse, 0.0);
    report.ci95_halfwidth = 1.96 * std::sqrt(var_sq / trials);
    report.pcrb_reference = pcrb_theta(kernel, w);
    return report;
}

}  // namespace isacbeam
