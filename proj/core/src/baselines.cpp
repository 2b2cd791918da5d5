// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/baselines.hpp"

#include <cmath>

#include "isacbeam/rng.hpp"

namespace isacbeam {

namespace {

int draw_location(const UserPMF& pmf, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int i = 0; i < pmf.masses.size(); ++i) {
        acc += pmf.masses(i);
        if (u < acc) return i;
    }
    return static_cast<int>(pmf.masses.size()) - 1;
}

SchemeReport run_scheme(const ProblemSpec& spec, const PilotPlan& plan,
                        std::uint64_t seed, bool noiseless_pilots, int scheme) {
    validate(spec);
    if (plan.l_ce + plan.l_isac != spec.kernel.l_symbols)
        throw std::invalid_argument("run_scheme: pilot plan does not cover L symbols");

    Rng rng(seed);
    SchemeReport report;
    report.scheme = scheme;
    report.realized_location = draw_location(spec.ensemble.pmf, rng);
    const MatC& h_true = spec.ensemble.channels[report.realized_location];

    // phase 1: pilots and LS estimation
    MatC observation = h_true * plan.pilot;
    if (!noiseless_pilots) {
        for (int c = 0; c < observation.cols(); ++c)
            for (int r = 0; r < observation.rows(); ++r)
                observation(r, c) += rng.cnormal(spec.ensemble.noise_power);
    }
    const LsEstimate ls = ls_estimate(plan, observation, spec.ensemble.noise_power);
    report.estimated_channel = ls.h_hat;

    // phase 2: known-channel design over the ISAC symbols (K = 1 ensemble)
    ProblemSpec known = spec;
    known.kernel.l_symbols = plan.l_isac;
    known.ensemble.channels.assign(1, ls.h_hat);
    known.ensemble.pmf.angles = VecD::Constant(1, spec.ensemble.pmf.angles(
                                                      report.realized_location));
    known.ensemble.pmf.masses = VecD::Constant(1, 1.0);
    report.design = solve_p1(known);

    report.achieved_rate =
        rate_at(report.design.w_opt, h_true, spec.ensemble.noise_power);

    const double coeff = 2.0 * spec.kernel.gamma / spec.kernel.noise_power;
    double info = spec.kernel.prior_fisher +
                  coeff * plan.l_isac *
                      (spec.kernel.a1 * report.design.w_opt).trace().real();
    if (scheme == 2) {
        const MatC w_pilot = plan.pilot * plan.pilot.adjoint() / plan.l_ce;
        info += coeff * plan.l_ce * (spec.kernel.a1 * w_pilot).trace().real();
    }
    report.pcrb = 1.0 / info;
    return report;
}

}  // namespace

PilotPlan make_pilot_plan(int l_ce, int l_total, double power_budget,
                          const ArrayConfig& cfg) {
    validate(cfg);
    if (l_ce < 1 || l_ce >= l_total)
        throw std::invalid_argument("make_pilot_plan: need 0 < L_CE < L");
    if (!(power_budget > 0.0))
        throw std::invalid_argument("make_pilot_plan: power budget must be > 0");

    PilotPlan plan;
    plan.l_ce = l_ce;
    plan.l_isac = l_total - l_ce;
    plan.pilot.resize(cfg.n_tx, l_ce);
    // rows of the L_CE-point DFT (recycled if N_T > L_CE), scaled so each
    // symbol carries the full power budget
    const double amp = std::sqrt(power_budget / cfg.n_tx);
    for (int r = 0; r < cfg.n_tx; ++r)
        for (int c = 0; c < l_ce; ++c) {
            const double phase = -2.0 * M_PI * static_cast<double>(r) * c / l_ce;
            plan.pilot(r, c) = amp * cxd(std::cos(phase), std::sin(phase));
        }
    return plan;
}

LsEstimate ls_estimate(const PilotPlan& plan, const MatC& observation,
                       double /*noise_power*/) {
    if (observation.cols() != plan.pilot.cols())
        throw std::invalid_argument("ls_estimate: observation/pilot length mismatch");
    LsEstimate out;
    out.under_determined = plan.pilot.cols() < plan.pilot.rows();
    if (out.under_determined) {
        // minimum-norm solution via the pseudo-inverse
        out.h_hat = observation *
                    plan.pilot.completeOrthogonalDecomposition().pseudoInverse();
    } else {
        const MatC gram = plan.pilot * plan.pilot.adjoint();
        out.h_hat = observation * plan.pilot.adjoint() * gram.inverse();
    }
    return out;
}

SchemeReport run_scheme1(const ProblemSpec& spec, const PilotPlan& plan,
                         std::uint64_t seed, bool noiseless_pilots) {
    return run_scheme(spec, plan, seed, noiseless_pilots, 1);
}

SchemeReport run_scheme2(const ProblemSpec& spec, const PilotPlan& plan,
                         std::uint64_t seed, bool noiseless_pilots) {
    return run_scheme(spec, plan, seed, noiseless_pilots, 2);
}

}  // namespace isacbeam
