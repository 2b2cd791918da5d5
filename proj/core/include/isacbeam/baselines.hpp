// SPDX-License-Identifier: Apache-2.0
//
// Pilot-based two-phase baseline schemes: LS channel estimation on L_CE
// symbols, then a known-channel covariance design over the remaining L_ISAC
// symbols. Scheme 2 additionally counts the pilot echoes toward the sensing
// information; scheme 1 does not.

#ifndef ISACBEAM_BASELINES_HPP
#define ISACBEAM_BASELINES_HPP

#include <cstdint>

#include "isacbeam/optimizer.hpp"
#include "isacbeam/types.hpp"

namespace isacbeam {

struct PilotPlan {
    int l_ce = 0;
    int l_isac = 0;
    MatC pilot;  // N_T x L_CE; pilot pilot^H = (P L_CE / N_T) I for L_CE >= N_T
};

// Deterministic scaled partial-DFT pilot with per-symbol power equal to the
// budget; rows orthogonal with equal power whenever L_CE >= N_T.
PilotPlan make_pilot_plan(int l_ce, int l_total, double power_budget,
                          const ArrayConfig& cfg);

struct LsEstimate {
    MatC h_hat;  // N_U x N_T
    bool under_determined = false;
};

// H_hat = Y pilot^H (pilot pilot^H)^{-1}; pseudo-inverse with a flag when
// L_CE < N_T leaves the system under-determined.
LsEstimate ls_estimate(const PilotPlan& plan, const MatC& observation,
                       double noise_power);

struct SchemeReport {
    int scheme = 1;
    int realized_location = 0;  // index drawn from the user PMF
    MatC estimated_channel;     // N_U x N_T
    double pcrb = 0.0;          // with the true A1; scheme 2 adds pilot-echo information
    double achieved_rate = 0.0; // at the true realized channel
    SolveReport design;         // underlying known-channel solve (K = 1)
};

SchemeReport run_scheme1(const ProblemSpec& spec, const PilotPlan& plan,
                         std::uint64_t seed, bool noiseless_pilots = false);

SchemeReport run_scheme2(const ProblemSpec& spec, const PilotPlan& plan,
                         std::uint64_t seed, bool noiseless_pilots = false);

}  // namespace isacbeam

#endif
