// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "isacbeam/estimator.hpp"
#include "isacbeam/geometry.hpp"
#include "isacbeam/rng.hpp"

using namespace isacbeam;

namespace {

const ArrayConfig kArray{10, 12, 8};

SensingKernel make_kernel(double noise_power, double target_mean = -0.3,
                          double target_var = 1e-3) {
    const AngularPrior prior{target_mean, target_var};
    SensingKernel kernel =
        build_kernel(prior, quadrature_grid(prior, 128), kArray,
                     ReflectionPrior{2e-14}, 25, std::max(noise_power, 1e-300));
    kernel.noise_power = noise_power;  // 0 selects the noiseless mode
    return kernel;
}

MatC random_psd(int n, Rng& rng, double trace_scale) {
    MatC x(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = cxd(rng.normal(), rng.normal());
    MatC w = x * x.adjoint();
    return w * (trace_scale / w.trace().real());
}

MatC beam_covariance(const SensingKernel& kernel, double power) {
    Eigen::SelfAdjointEigenSolver<MatC> es(kernel.a1);
    const VecC q1 = es.eigenvectors().col(es.eigenvalues().size() - 1);
    return power * (q1 * q1.adjoint());
}

}  // namespace

TEST_CASE("isotropic waveform reproduces the covariance exactly") {
    const MatC w = 0.1 * MatC::Identity(10, 10);
    const MatC x = synthesize_waveform(w, 10);
    CHECK(((x * x.adjoint() / 10.0) - w).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rank-one waveform beams every symbol with constant power") {
    const SensingKernel kernel = make_kernel(1e-12);
    const MatC w = beam_covariance(kernel, 1.0);
    const MatC x = synthesize_waveform(w, 25);
    CHECK(((x * x.adjoint() / 25.0) - w).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatC> es(w);
    const VecC q1 = es.eigenvectors().col(9);
    for (int l = 0; l < 25; ++l) {
        CHECK(x.col(l).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
        const double overlap = std::abs(q1.dot(x.col(l).normalized()));
        CHECK(overlap == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("random covariances synthesize exactly at L = 25") {
    Rng rng(31);
    for (int t = 0; t < 5; ++t) {
        const MatC w = random_psd(10, rng, 1.0);
        const MatC x = synthesize_waveform(w, 25);
        CHECK(((x * x.adjoint() / 25.0) - w).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("waveform synthesis rejects L below the rank") {
    Rng rng(32);
    const MatC w = random_psd(10, rng, 1.0);  // full rank
    CHECK_THROWS_AS(synthesize_waveform(w, 8), std::invalid_argument);
}

TEST_CASE("noiseless echo is the exact rank-one response") {
    const SensingKernel kernel = make_kernel(0.0, 0.0);
    const MatC w = 0.1 * MatC::Identity(10, 10);
    const EchoBatch batch = simulate_echo(w, 0.0, cxd(1.0, 0.0), kernel, 10, 7);
    const MatC expected = MatC::Ones(12, 10) * batch.waveform;
    CHECK((batch.observations - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("echo noise variance matches sigma_S^2") {
    const SensingKernel kernel = make_kernel(1e-12);
    const MatC w = MatC::Zero(10, 10);  // pure-noise observations
    double acc = 0.0;
    int count = 0;
    for (int d = 0; d < 40; ++d) {
        const EchoBatch batch =
            simulate_echo(w, -0.3, cxd(0.0, 0.0), kernel, 25, 900 + d);
        acc += batch.observations.squaredNorm();
        count += 12 * 25;
    }
    CHECK(acc / count == doctest::Approx(1e-12).epsilon(0.05));
}

TEST_CASE("echoes replay bit-identically per seed") {
    const SensingKernel kernel = make_kernel(1e-12);
    Rng rng(33);
    const MatC w = random_psd(10, rng, 1.0);
    const EchoBatch a = simulate_echo(w, -0.31, cxd(1e-7, -2e-7), kernel, 25, 424242);
    const EchoBatch b = simulate_echo(w, -0.31, cxd(1e-7, -2e-7), kernel, 25, 424242);
    CHECK(a.observations == b.observations);
}

TEST_CASE("noise-free MAP estimates land within twice the grid spacing") {
    const SensingKernel kernel = make_kernel(0.0);
    const MatC w = beam_covariance(kernel, 1.0);
    const double sd = std::sqrt(1e-3);
    const int grid_points = 38001;  // ~1e-5 spacing over +-6 sigma
    const double spacing = 12.0 * sd / (grid_points - 1);
    Rng rng(34);
    for (int t = 0; t < 5; ++t) {
        const double theta_true = -0.3 + sd * rng.normal();
        const EchoBatch batch =
            simulate_echo(w, theta_true, cxd(1e3, 5e2), kernel, 25, 100 + t);
        const double theta_hat =
            map_estimate(batch, kernel.prior, ReflectionPrior{2e-14}, grid_points);
        CHECK(std::abs(theta_hat - theta_true) < 2.0 * spacing);
    }
}

TEST_CASE("zero-information observations collapse to the prior mean") {
    const SensingKernel kernel = make_kernel(1e-12);
    const MatC w = MatC::Zero(10, 10);
    const EchoBatch batch = simulate_echo(w, -0.25, cxd(1e-7, 0.0), kernel, 25, 5);
    const double theta_hat =
        map_estimate(batch, kernel.prior, ReflectionPrior{2e-14}, 4001);
    CHECK(theta_hat == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("marginalized score matches numeric 2-D integration over alpha") {
    // small synthetic instance in normalized units
    ArrayConfig cfg{3, 2, 1};
    SensingKernel kernel;
    kernel.config = cfg;
    kernel.prior = {0.1, 0.02};
    kernel.noise_power = 1.0;
    kernel.gamma = 2.0;
    kernel.l_symbols = 4;
    kernel.a1 = MatC::Identity(3, 3);
    kernel.a2 = MatC::Identity(3, 3);

    const MatC w = 0.5 * MatC::Identity(3, 3);
    const EchoBatch batch = simulate_echo(w, 0.12, cxd(0.8, -0.6), kernel, 4, 77);

    auto closed_score = [&](double theta) {
        const VecC a = steering(SteeringKind::tx, theta, cfg).entries;
        const VecC b = steering(SteeringKind::rx, theta, cfg).entries;
        const MatC mm = (b * a.adjoint()) * batch.waveform;
        const double m2 = mm.squaredNorm();
        const cxd mhy = (mm.conjugate().cwiseProduct(batch.observations)).sum();
        return log_pdf(kernel.prior, theta) - std::log(1.0 + 2.0 * m2) +
               2.0 * std::norm(mhy) / (1.0 * (1.0 + 2.0 * m2));
    };
    auto numeric_score = [&](double theta) {
        const VecC a = steering(SteeringKind::tx, theta, cfg).entries;
        const VecC b = steering(SteeringKind::rx, theta, cfg).entries;
        const MatC mm = (b * a.adjoint()) * batch.waveform;
        // integrate p(y | theta, alpha) p(alpha) over a fine alpha grid
        const int n = 241;
        const double span = 6.0;  // per-component sd = sqrt(s/2) = 1
        double acc = 0.0;
        const double h = 2.0 * span / (n - 1);
        for (int ir = 0; ir < n; ++ir)
            for (int ii = 0; ii < n; ++ii) {
                const cxd alpha(-span + ir * h, -span + ii * h);
                const double resid = (batch.observations - alpha * mm).squaredNorm();
                const double lp_alpha = -std::norm(alpha) / 2.0;
                acc += std::exp(-resid + lp_alpha) * h * h;
            }
        return log_pdf(kernel.prior, theta) + std::log(acc);
    };

    // additive constants cancel in score differences
    const double t0 = 0.10, t1 = 0.13, t2 = 0.16;
    const double closed_d1 = closed_score(t1) - closed_score(t0);
    const double closed_d2 = closed_score(t2) - closed_score(t0);
    const double numeric_d1 = numeric_score(t1) - numeric_score(t0);
    const double numeric_d2 = numeric_score(t2) - numeric_score(t0);
    CHECK(closed_d1 == doctest::Approx(numeric_d1).epsilon(1e-3));
    CHECK(closed_d2 == doctest::Approx(numeric_d2).epsilon(1e-3));
}

TEST_CASE("monte-carlo report carries the matching PCRB reference") {
    const SensingKernel kernel = make_kernel(1e-12);
    ProblemSpec spec;
    spec.kernel = kernel;
    spec.power_budget = 10.0;
    const MatC w = beam_covariance(kernel, 10.0);
    spec.ensemble.pmf = discretize_user_pmf(-0.3, 1e-3, 1, -0.4, -0.2);
    spec.ensemble.channels = {MatC::Zero(8, 10)};
    const MseReport report = monte_carlo_mse(w, spec, 50, 11, 1001);
    CHECK(report.pcrb_reference == doctest::Approx(pcrb_theta(kernel, w)));
    CHECK(report.trials == 50);
    CHECK(report.mse >= 0.0);
}

TEST_CASE("monte-carlo MSE stays above 0.9 PCRB at the high-power point") {
    const SensingKernel kernel = make_kernel(1e-12, -0.5);
    ProblemSpec spec;
    spec.kernel = kernel;
    spec.power_budget = 10.0;
    spec.ensemble.pmf = discretize_user_pmf(-0.3, 1e-3, 1, -0.4, -0.2);
    spec.ensemble.channels = {MatC::Zero(8, 10)};
    const MatC w = beam_covariance(kernel, 10.0);
    const MseReport report = monte_carlo_mse(w, spec, 200, 21);
    CHECK(report.mse >= 0.9 * report.pcrb_reference);
}

TEST_CASE("MSE and PCRB both fall when the covariance is scaled up") {
    const SensingKernel kernel = make_kernel(1e-12, -0.5);
    ProblemSpec spec;
    spec.kernel = kernel;
    spec.power_budget = 40.0;
    spec.ensemble.pmf = discretize_user_pmf(-0.3, 1e-3, 1, -0.4, -0.2);
    spec.ensemble.channels = {MatC::Zero(8, 10)};
    const MatC w = beam_covariance(kernel, 10.0);
    const MseReport at1 = monte_carlo_mse(w, spec, 150, 31);
    const MseReport at4 = monte_carlo_mse(MatC(4.0 * w), spec, 150, 31);
    CHECK(at4.pcrb_reference < at1.pcrb_reference);
    CHECK(at4.mse <= at1.mse);
}

TEST_CASE("confidence halfwidth shrinks like one over sqrt(trials)") {
    // prior-dominated regime: squared errors are a clean chi-square draw
    const SensingKernel kernel = make_kernel(1e-12, -0.5);
    ProblemSpec spec;
    spec.kernel = kernel;
    spec.power_budget = 10.0;
    spec.ensemble.pmf = discretize_user_pmf(-0.3, 1e-3, 1, -0.4, -0.2);
    spec.ensemble.channels = {MatC::Zero(8, 10)};
    const MatC w = MatC::Zero(10, 10);
    const MseReport small = monte_carlo_mse(w, spec, 400, 41, 801);
    const MseReport big = monte_carlo_mse(w, spec, 800, 41, 801);
    const double ratio = big.ci95_halfwidth / small.ci95_halfwidth;
    CHECK(ratio > 0.707 * 0.8);
    CHECK(ratio < 0.707 * 1.2);
}

TEST_CASE("monte-carlo rejects too few trials") {
    const SensingKernel kernel = make_kernel(1e-12);
    ProblemSpec spec;
    spec.kernel = kernel;
    spec.ensemble.pmf = discretize_user_pmf(-0.3, 1e-3, 1, -0.4, -0.2);
    spec.ensemble.channels = {MatC::Zero(8, 10)};
    const MatC w = MatC::Zero(10, 10);
    CHECK_THROWS_AS(monte_carlo_mse(w, spec, 10, 1), std::invalid_argument);
}
