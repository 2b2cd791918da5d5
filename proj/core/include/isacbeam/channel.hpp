// SPDX-License-Identifier: Apache-2.0
//
// Geometric LoS + NLoS user channel ensemble over the K candidate locations,
// per-location achievable rate, and the PMF-weighted expected rate.

#ifndef ISACBEAM_CHANNEL_HPP
#define ISACBEAM_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "isacbeam/priors.hpp"
#include "isacbeam/types.hpp"

namespace isacbeam {

struct ChannelParams {
    double ref_gain_db = -30.0;      // beta_0, channel power at 1 m
    double user_distance_m = 500.0;  // r_U
    double pathloss_exp = 3.2;
    int n_scatter = 8;               // N_sc NLoS paths
    double los_nlos_ratio_db = 0.8;  // Lambda_C, LoS over total NLoS power
    double noise_power = 1e-12;      // sigma_C^2, watts
};

void validate(const ChannelParams& params);

// beta_C = beta_0 / r_U^pathloss_exp, linear scale
double los_gain(const ChannelParams& params);

struct UserEnsemble {
    UserPMF pmf;
    std::vector<MatC> channels;  // K matrices, N_U x N_T
    double noise_power = 1e-12;
    std::uint64_t seed = 0;
};

// H_k = sqrt(beta_C) b_U(theta_k) a^H(theta_k) + sum_n eta_n b_U(phi_U) a^H(phi_T)
// with eta_n ~ CN(0, beta_C / (Lambda_C_linear * N_sc)) and AoA/AoD i.i.d.
// uniform on [-pi/2, pi/2); NLoS draws independent per location, reproducible
// per seed.
UserEnsemble generate_ensemble(const UserPMF& pmf, const ArrayConfig& cfg,
                               const ChannelParams& params, std::uint64_t seed);

// log2 det(I + H W H^H / noise), via clipped Hermitian eigenvalues
double rate_at(const MatC& w, const MatC& h, double noise_power);

double expected_rate(const MatC& w, const UserEnsemble& ensemble);

}  // namespace isacbeam

#endif
