// SPDX-License-Identifier: Apache-2.0
//
// Transmit-covariance design: maximize tr(A1 W) over the PSD trace ball
// subject to the expected-rate constraint, via dual bisection on the rate
// multiplier with a projected-gradient inner solver.
//
// The inner solver works on the lambda1(A1)-normalized objective
//   f(W) = tr(A1 W)/lambda1 + beta_n * expected_rate(W)
// with Barzilai-Borwein steps, backtracking line search, and projection onto
// {W PSD, tr W <= P}. Duals are rescaled back to the original problem on
// report. The multi-slot path returns the static solution; in verification
// mode it additionally solves the slotted problem by block projected gradient
// and records the relative objective gap.

#ifndef ISACBEAM_OPTIMIZER_HPP
#define ISACBEAM_OPTIMIZER_HPP

#include <vector>

#include "isacbeam/channel.hpp"
#include "isacbeam/sensing.hpp"
#include "isacbeam/types.hpp"

namespace isacbeam {

struct SolveTolerances {
    double feasibility = 1e-4;     // bps/Hz slack tolerated on the rate target
    double duality_gap = 1e-6;     // relative certified-gap stop for the bisection
    double bisection = 1e-5;       // bps/Hz bracket width stop
    double inner_gradient = 1e-7;  // gradient-mapping norm, scaled by max(1, lambda1(A1))
    int max_inner_iterations = 20000;
    int max_bisection_iterations = 200;
};

struct ProblemSpec {
    SensingKernel kernel;
    UserEnsemble ensemble;
    double power_budget = 1.0;  // watts
    double rate_target = 0.0;   // bps/Hz
    SolveTolerances tolerances;
};

void validate(const ProblemSpec& spec);

enum class RateCase { inactive_rate, active_rate };

// Residuals are reported on the lambda1(A1)-normalized Lagrangian so that
// "converged" means the same magnitude across power/antenna scales.
struct KktResiduals {
    double stationarity = 0.0;
    double complementarity = 0.0;
    double feasibility = 0.0;
};

struct SolveReport {
    MatC w_opt;                // optimal single-slot covariance
    std::vector<MatC> w_slots; // filled by solve_p2 (static replicate)
    double beta = 0.0;         // dual of the rate constraint
    double mu = 0.0;           // dual of the power constraint
    RateCase rate_case = RateCase::inactive_rate;
    double achieved_rate = 0.0;
    double pcrb = 0.0;
    double objective = 0.0;    // tr(A1 W) (per-slot average for P2)
    KktResiduals kkt;
    int rank = 0;
    int iterations = 0;        // accumulated inner iterations
    double duality_gap = 0.0;  // certified relative gap
    double multislot_gap = 0.0;  // |obj_P2 - obj_P1| / obj_P1, verification mode only
};

// Power-only optimum P q1 q1^H; degenerate if A1 is numerically zero.
MatC case1_candidate(const SensingKernel& kernel, double power_budget);

// Frobenius projection onto {W PSD, tr W <= P}: eigenvalues clipped at zero,
// then water-shifted if their sum exceeds the budget; eigenvectors preserved.
MatC project_psd_trace(const MatC& x, double power_budget);

struct InnerResult {
    MatC w;
    double objective = 0.0;      // tr(A1 W) + beta * expected_rate (original scale)
    double sense_term = 0.0;     // tr(A1 W)
    double rate = 0.0;           // expected rate at w
    double mu = 0.0;             // recovered trace-cap multiplier (original scale)
    int iterations = 0;
    std::vector<double> objective_history;
};

// Maximize tr(A1 W) + beta * expected_rate(W) over the trace ball.
InnerResult inner_max(const ProblemSpec& spec, double beta,
                      const MatC* warm_start = nullptr);

// Expected-rate maximization alone (the beta-dominant limit); used for
// feasibility detection and water-filling cross-checks.
InnerResult max_rate(const ProblemSpec& spec, const MatC* warm_start = nullptr);

SolveReport solve_p1(const ProblemSpec& spec);

// Static solution replicated across n_slots per the averaging argument;
// verify additionally runs the independent block solve and fills multislot_gap.
SolveReport solve_p2(const ProblemSpec& spec, int n_slots, bool verify = false);

struct Diagnostics {
    KktResiduals kkt;
    int rank = 0;
    bool lemma1_ok = true;       // mu >= lambda1(A1) up to tolerance when beta > 0
    double mu_minus_lambda1 = 0.0;
};

Diagnostics diagnostics(const ProblemSpec& spec, const SolveReport& report);

// Eigenvalue count above 1e-8 * lambda_max.
int numeric_rank(const MatC& w);

}  // namespace isacbeam

#endif
