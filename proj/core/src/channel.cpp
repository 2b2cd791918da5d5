// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/channel.hpp"

#include <cmath>

#include "isacbeam/geometry.hpp"
#include "isacbeam/rng.hpp"
#include "isacbeam/sensing.hpp"

namespace isacbeam {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

// rate without re-validating W; callers have already gated PSD-ness
double rate_unchecked(const MatC& w, const MatC& h, double noise_power) {
    const MatC s = h * w * h.adjoint() / noise_power;
    Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (s + s.adjoint()),
                                           Eigen::EigenvaluesOnly);
    double rate = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        rate += std::log2(1.0 + std::max(es.eigenvalues()(i), 0.0));
    return rate;
}

}  // namespace

void validate(const ChannelParams& params) {
    if (!(params.user_distance_m > 0.0))
        throw std::invalid_argument("ChannelParams: distance must be > 0");
    if (params.n_scatter < 0)
        throw std::invalid_argument("ChannelParams: n_scatter must be >= 0");
    if (!(params.noise_power > 0.0))
        throw std::invalid_argument("ChannelParams: noise power must be > 0");
}

double los_gain(const ChannelParams& params) {
    return db_to_linear(params.ref_gain_db) *
           std::pow(params.user_distance_m, -params.pathloss_exp);
}

UserEnsemble generate_ensemble(const UserPMF& pmf, const ArrayConfig& cfg,
                               const ChannelParams& params, std::uint64_t seed) {
    validate(cfg);
    validate(params);
    const int k = static_cast<int>(pmf.angles.size());
    if (k < 1 || pmf.masses.size() != k)
        throw std::invalid_argument("generate_ensemble: malformed PMF");

    const double beta_c = los_gain(params);
    const double path_var =
        params.n_scatter > 0
            ? beta_c / (db_to_linear(params.los_nlos_ratio_db) * params.n_scatter)
            : 0.0;

    UserEnsemble ensemble;
    ensemble.pmf = pmf;
    ensemble.noise_power = params.noise_power;
    ensemble.seed = seed;
    ensemble.channels.reserve(k);
    for (int i = 0; i < k; ++i) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(i)));
        const VecC bu = steering(SteeringKind::user, pmf.angles(i), cfg).entries;
        const VecC a = steering(SteeringKind::tx, pmf.angles(i), cfg).entries;
        MatC h = std::sqrt(beta_c) * (bu * a.adjoint());
        for (int n = 0; n < params.n_scatter; ++n) {
            const double phi_u = rng.uniform(-kHalfPi, kHalfPi);
            const double phi_t = rng.uniform(-kHalfPi, kHalfPi);
            const cxd eta = rng.cnormal(path_var);
            const VecC bs = steering(SteeringKind::user, phi_u, cfg).entries;
            const VecC as = steering(SteeringKind::tx, phi_t, cfg).entries;
            h.noalias() += eta * (bs * as.adjoint());
        }
        ensemble.channels.push_back(std::move(h));
    }
    return ensemble;
}

double rate_at(const MatC& w, const MatC& h, double noise_power) {
    if (!(noise_power > 0.0))
        throw std::invalid_argument("rate_at: noise power must be > 0");
    if (h.cols() != w.rows())
        throw std::invalid_argument("rate_at: dimension mismatch");
    require_psd(w, "rate_at");
    return rate_unchecked(w, h, noise_power);
}

double expected_rate(const MatC& w, const UserEnsemble& ensemble) {
    if (ensemble.channels.empty())
        throw std::invalid_argument("expected_rate: empty ensemble");
    require_psd(w, "expected_rate");
    double rate = 0.0;
    for (std::size_t i = 0; i < ensemble.channels.size(); ++i)
        rate += ensemble.pmf.masses(static_cast<int>(i)) *
                rate_unchecked(w, ensemble.channels[i], ensemble.noise_power);
    return rate;
}

}  // namespace isacbeam
