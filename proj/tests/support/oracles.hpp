// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used by the test suites. These stay
// deliberately brute-force and share no code path with the solver.

#ifndef ISACBEAM_TESTS_ORACLES_HPP
#define ISACBEAM_TESTS_ORACLES_HPP

#include <cmath>
#include <vector>

#include "isacbeam/channel.hpp"
#include "isacbeam/optimizer.hpp"
#include "isacbeam/priors.hpp"
#include "isacbeam/rng.hpp"
#include "isacbeam/sensing.hpp"

namespace isacbeam::testing {

// Exhaustive grid search of max tr(A1 W) over the 2x2 PSD trace ball subject
// to the expected-rate constraint, single-antenna user. The Hermitian W is
// parameterized by (w11, w22, |w12|, arg w12) with |w12|^2 <= w11 w22; a
// coarse full cover is refined around the incumbent.
inline double brute_force_objective_2x2(const MatC& a1,
                                        const std::vector<Eigen::RowVectorXcd>& rows,
                                        const VecD& masses, double noise,
                                        double power, double rate_target) {
    const double a11 = a1(0, 0).real();
    const double a22 = a1(1, 1).real();
    const cxd a12 = a1(0, 1);

    auto rate_of = [&](double w11, double w22, cxd w12) {
        double rate = 0.0;
        for (int k = 0; k < masses.size(); ++k) {
            const cxd h1 = rows[k](0), h2 = rows[k](1);
            const double q = std::norm(h1) * w11 + std::norm(h2) * w22 +
                             2.0 * std::real(h1 * w12 * std::conj(h2));
            rate += masses(k) * std::log2(1.0 + std::max(q, 0.0) / noise);
        }
        return rate;
    };
    auto objective_of = [&](double w11, double w22, cxd w12) {
        return a11 * w11 + a22 * w22 + 2.0 * std::real(std::conj(a12) * w12);
    };

    struct Box {
        double t0, t1, u0, u1, r0, r1, p0, p1;
    };
    constexpr double kTwoPi = 6.2831853071795864769;
    Box box{0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, kTwoPi};
    double best = -1e300;
    const int nt = 13, nu = 33, nr = 25, np = 48;
    for (int stage = 0; stage < 5; ++stage) {
        double arg_t = 1.0, arg_u = 0.5, arg_r = 0.5, arg_p = 0.0;
        for (int it = 0; it < nt; ++it) {
            const double t = box.t0 + (box.t1 - box.t0) * it / (nt - 1.0);
            for (int iu = 0; iu < nu; ++iu) {
                const double u = box.u0 + (box.u1 - box.u0) * iu / (nu - 1.0);
                const double w11 = power * t * u;
                const double w22 = power * t * (1.0 - u);
                const double cmax = std::sqrt(w11 * w22);
                for (int ir = 0; ir < nr; ++ir) {
                    const double rho = box.r0 + (box.r1 - box.r0) * ir / (nr - 1.0);
                    for (int ip = 0; ip < np; ++ip) {
                        const double phi = box.p0 + (box.p1 - box.p0) * ip / np;
                        const cxd w12 =
                            rho * cmax * cxd(std::cos(phi), std::sin(phi));
                        if (rate_of(w11, w22, w12) < rate_target) continue;
                        const double obj = objective_of(w11, w22, w12);
                        if (obj > best) {
                            best = obj;
                            arg_t = t;
                            arg_u = u;
                            arg_r = rho;
                            arg_p = phi;
                        }
                    }
                }
            }
        }
        // shrink around the incumbent, clamped to the valid ranges
        auto shrink = [](double c, double lo, double hi, double f) {
            const double half = 0.5 * f * (hi - lo);
            return std::pair<double, double>{std::max(lo, c - half),
                                             std::min(hi, c + half)};
        };
        std::tie(box.t0, box.t1) = shrink(arg_t, box.t0, box.t1, 0.25);
        std::tie(box.u0, box.u1) = shrink(arg_u, box.u0, box.u1, 0.25);
        std::tie(box.r0, box.r1) = shrink(arg_r, box.r0, box.r1, 0.25);
        std::tie(box.p0, box.p1) = shrink(arg_p, box.p0, box.p1, 0.25);
    }
    return best;
}

// Classical water-filling rate over the eigenmodes of H^H H.
inline double water_filling_rate(const MatC& h, double noise, double power) {
    Eigen::SelfAdjointEigenSolver<MatC> es(MatC(h.adjoint() * h),
                                           Eigen::EigenvaluesOnly);
    std::vector<double> gains;
    for (int i = es.eigenvalues().size() - 1; i >= 0; --i)
        if (es.eigenvalues()(i) > 1e-18) gains.push_back(es.eigenvalues()(i) / noise);
    double rate = 0.0;
    for (int active = static_cast<int>(gains.size()); active >= 1; --active) {
        double inv_sum = 0.0;
        for (int i = 0; i < active; ++i) inv_sum += 1.0 / gains[i];
        const double level = (power + inv_sum) / active;
        if (level - 1.0 / gains[active - 1] <= 0.0) continue;
        rate = 0.0;
        for (int i = 0; i < active; ++i)
            rate += std::log2(1.0 + (level - 1.0 / gains[i]) * gains[i]);
        break;
    }
    return rate;
}

// Small random problem with tunable ranks; rate target placed strictly
// between the power-only rate and the rate cap so the constraint is active.
struct SmallInstance {
    ProblemSpec spec;
    double rate_cap = 0.0;
    double case1_rate = 0.0;
};

inline SmallInstance random_active_instance(std::uint64_t seed, int n_tx, int n_rx,
                                            int n_user, int k, int n_scatter,
                                            double fraction) {
    Rng rng(seed);
    const ArrayConfig array{n_tx, n_rx, n_user};
    const AngularPrior target{rng.uniform(-0.6, 0.4), std::exp(rng.uniform(-7.5, -4.5))};
    const AngularPrior user{rng.uniform(-0.6, 0.4), std::exp(rng.uniform(-7.5, -4.5))};
    ChannelParams channel;
    channel.n_scatter = n_scatter;
    SmallInstance inst;
    inst.spec.kernel = build_kernel(target, quadrature_grid(target, 96), array,
                                    ReflectionPrior{2e-14}, 25, 1e-12);
    const auto support = default_user_support(user.mean, user.variance);
    inst.spec.ensemble = generate_ensemble(
        discretize_user_pmf(user.mean, user.variance, k, support.first, support.second),
        array, channel, rng.next_u64());
    inst.spec.power_budget = 1.0;
    inst.spec.rate_target = 0.0;
    inst.case1_rate =
        expected_rate(case1_candidate(inst.spec.kernel, 1.0), inst.spec.ensemble);
    inst.rate_cap = max_rate(inst.spec).rate;
    inst.spec.rate_target =
        inst.case1_rate + fraction * (inst.rate_cap - inst.case1_rate);
    return inst;
}

}  // namespace isacbeam::testing

#endif
