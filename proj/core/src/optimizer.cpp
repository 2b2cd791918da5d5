// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isacbeam {

namespace {

double real_inner(const MatC& a, const MatC& b) {
    return (a.adjoint() * b).trace().real();
}

double slots_inner(const std::vector<MatC>& a, const std::vector<MatC>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += real_inner(a[i], b[i]);
    return s;
}

double slots_norm(const std::vector<MatC>& a) {
    return std::sqrt(std::max(slots_inner(a, a), 0.0));
}

// water shift tau so that sum_i max(lam_i - tau, 0) equals the budget
double water_shift(std::vector<double> lam, double budget) {
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        cumsum += lam[i];
        const double cand = (cumsum - budget) / static_cast<double>(i + 1);
        if (i + 1 == lam.size() || lam[i + 1] <= cand) {
            tau = cand;
            break;
        }
    }
    return std::max(tau, 0.0);
}

struct SlotProjection {
    std::vector<MatC> w;
    double shift = 0.0;
};

// joint projection of all slots onto {W_m PSD, sum_m tr(W_m) <= budget}
SlotProjection project_slots(const std::vector<MatC>& xs, double budget) {
    std::vector<Eigen::SelfAdjointEigenSolver<MatC>> eigs;
    eigs.reserve(xs.size());
    std::vector<double> lam;
    double total = 0.0;
    for (const MatC& x : xs) {
        eigs.emplace_back(MatC(0.5 * (x + x.adjoint())));
        for (int i = 0; i < eigs.back().eigenvalues().size(); ++i) {
            const double v = std::max(eigs.back().eigenvalues()(i), 0.0);
            lam.push_back(v);
            total += v;
        }
    }
    SlotProjection out;
    out.shift = total > budget ? water_shift(lam, budget) : 0.0;
    out.w.reserve(xs.size());
    for (const auto& es : eigs) {
        VecD d = es.eigenvalues();
        for (int i = 0; i < d.size(); ++i)
            d(i) = std::max(std::max(d(i), 0.0) - out.shift, 0.0);
        out.w.push_back(es.eigenvectors() * d.asDiagonal() *
                        es.eigenvectors().adjoint());
    }
    return out;
}

// log2 det(I + H W H^H / sigma^2) via Cholesky; the argument is >= I
double rate_fast(const MatC& w, const MatC& h, double noise) {
    MatC g = h * w * h.adjoint() / noise;
    g = 0.5 * (g + g.adjoint()).eval();
    g += MatC::Identity(g.rows(), g.cols());
    Eigen::LLT<MatC> llt(g);
    if (llt.info() != Eigen::Success) {
        // fall back to eigenvalues if round-off pushed g off the cone
        Eigen::SelfAdjointEigenSolver<MatC> es(g, Eigen::EigenvaluesOnly);
        double r = 0.0;
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            r += std::log2(std::max(es.eigenvalues()(i), 1.0));
        return r;
    }
    double r = 0.0;
    for (int i = 0; i < g.rows(); ++i)
        r += 2.0 * std::log2(llt.matrixLLT()(i, i).real());
    return r;
}

double erate_fast(const MatC& w, const UserEnsemble& ens) {
    double r = 0.0;
    for (std::size_t k = 0; k < ens.channels.size(); ++k)
        r += ens.pmf.masses(static_cast<int>(k)) *
             rate_fast(w, ens.channels[k], ens.noise_power);
    return r;
}

MatC erate_gradient(const MatC& w, const UserEnsemble& ens) {
    const int n = static_cast<int>(w.rows());
    MatC g = MatC::Zero(n, n);
    const double c0 = 1.0 / (std::log(2.0) * ens.noise_power);
    for (std::size_t k = 0; k < ens.channels.size(); ++k) {
        const MatC& h = ens.channels[k];
        MatC inner = h * w * h.adjoint() / ens.noise_power;
        inner = 0.5 * (inner + inner.adjoint()).eval();
        inner += MatC::Identity(inner.rows(), inner.cols());
        const MatC solved = inner.llt().solve(h);  // inner^{-1} H
        g.noalias() +=
            (ens.pmf.masses(static_cast<int>(k)) * c0) * (h.adjoint() * solved);
    }
    return 0.5 * (g + g.adjoint()).eval();
}

double lambda_max(const MatC& a) {
    Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (a + a.adjoint()),
                                           Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

struct EngineSetup {
    MatC a1n;            // normalized sensing matrix (may be zero)
    bool has_sense = true;
    double beta_n = 0.0; // rate weight on the normalized objective
    int n_slots = 1;
    double map_tol = 1e-7;
};

struct EngineOut {
    std::vector<MatC> w;
    double value = 0.0;    // normalized objective
    double sense_n = 0.0;  // sum_m tr(a1n W_m)
    double rate_mts = 0.0; // (1/M) sum_m expected rate
    double mu_n = 0.0;     // trace multiplier on the normalized objective
    int iterations = 0;
    std::vector<double> history;
};

// Projected gradient ascent with BB steps and backtracking on
//   f(W_1..W_M) = sum_m tr(a1n W_m) + (beta_n/M) sum_m erate(W_m)
// over {W_m PSD, sum_m tr(W_m) <= M * P}.
EngineOut run_pga(const EngineSetup& setup, const UserEnsemble& ens, double power,
                  const SolveTolerances& tol, const std::vector<MatC>* warm) {
    const int n = static_cast<int>(setup.a1n.rows());
    const int m = setup.n_slots;
    const double budget = power * m;
    const double inv_m = 1.0 / static_cast<double>(m);

    auto value_of = [&](const std::vector<MatC>& w) {
        double v = 0.0;
        for (const MatC& wi : w) {
            if (setup.has_sense) v += real_inner(setup.a1n, wi);
            if (setup.beta_n != 0.0) v += setup.beta_n * inv_m * erate_fast(wi, ens);
        }
        return v;
    };
    auto grad_of = [&](const std::vector<MatC>& w) {
        std::vector<MatC> g(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            g[i] = setup.has_sense ? setup.a1n : MatC::Zero(n, n);
            if (setup.beta_n != 0.0)
                g[i] += (setup.beta_n * inv_m) * erate_gradient(w[i], ens);
        }
        return g;
    };

    std::vector<MatC> w;
    if (warm && static_cast<int>(warm->size()) == m) {
        w = project_slots(*warm, budget).w;
    } else {
        w.assign(m, MatC::Identity(n, n) * (power / n));
    }

    EngineOut out;
    double value = value_of(w);
    std::vector<MatC> grad = grad_of(w);
    out.history.push_back(value);

    // gradient mapping ||proj(W + t g) - W|| / t at the method's own step scale
    auto residual_at = [&](double t_probe, double& shift) {
        std::vector<MatC> probe_in(m);
        for (int i = 0; i < m; ++i) probe_in[i] = w[i] + t_probe * grad[i];
        SlotProjection probe = project_slots(probe_in, budget);
        shift = probe.shift / t_probe;
        double nrm2 = 0.0;
        for (int i = 0; i < m; ++i) nrm2 += (probe.w[i] - w[i]).squaredNorm();
        return std::sqrt(nrm2) / t_probe;
    };

    double step = 1.0;
    std::vector<MatC> w_prev, g_prev;
    const int ls_max = 60;
    for (int it = 0; it < tol.max_inner_iterations; ++it) {
        const double t_probe = std::clamp(step, 1e-8, 1.0);
        double shift = 0.0;
        const double res = residual_at(t_probe, shift);
        if (res <= setup.map_tol) {
            out.mu_n = shift;
            break;
        }

        // BB step from the previous displacement pair
        if (!w_prev.empty()) {
            std::vector<MatC> s(m), y(m);
            for (int i = 0; i < m; ++i) {
                s[i] = w[i] - w_prev[i];
                y[i] = grad[i] - g_prev[i];
            }
            const double sy = slots_inner(s, y);
            const double ss = slots_inner(s, s);
            step = sy < -1e-300 ? -ss / sy : step * 2.0;
        }
        step = std::clamp(step, 1e-12, 1e9);

        w_prev = w;
        g_prev = grad;
        bool accepted = false;
        double t = step;
        const double fuzz = 1e-13 * (1.0 + std::abs(value));
        for (int ls = 0; ls < ls_max; ++ls) {
            std::vector<MatC> trial_in(m);
            for (int i = 0; i < m; ++i) trial_in[i] = w[i] + t * grad[i];
            SlotProjection proj = project_slots(trial_in, budget);
            std::vector<MatC> dw(m);
            for (int i = 0; i < m; ++i) dw[i] = proj.w[i] - w[i];
            const double ascent = slots_inner(grad, dw);
            const double trial_value = value_of(proj.w);
            // Armijo ascent, or a round-off-neutral move once the predicted
            // gain falls below the objective's floating-point resolution
            const bool armijo = trial_value >= value + 1e-4 * ascent;
            const bool neutral = ascent <= 1e-11 * (1.0 + std::abs(value)) &&
                                 trial_value >= value - fuzz;
            if (armijo || neutral) {
                w = std::move(proj.w);
                value = trial_value;
                step = t;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        out.iterations = it + 1;
        if (!accepted) {
            double shift2 = 0.0;
            const double res2 = residual_at(std::clamp(t, 1e-8, 1.0), shift2);
            if (res2 <= 10.0 * setup.map_tol) {
                out.mu_n = shift2;
                break;
            }
            MatC avg = MatC::Zero(n, n);
            for (const MatC& wi : w) avg += wi * inv_m;
            throw NonconvergenceError("inner solver stalled before reaching tolerance",
                                      avg, res2);
        }
        if (value < out.history.back() - 1e-12 * (1.0 + std::abs(value)))
            throw std::logic_error("inner solver objective decreased");
        out.history.push_back(value);
        grad = grad_of(w);
        if (it + 1 == tol.max_inner_iterations) {
            double shift3 = 0.0;
            const double res3 = residual_at(std::clamp(step, 1e-8, 1.0), shift3);
            MatC avg = MatC::Zero(n, n);
            for (const MatC& wi : w) avg += wi * inv_m;
            throw NonconvergenceError("inner solver iteration cap exceeded", avg, res3);
        }
    }

    out.w = std::move(w);
    out.value = value;
    out.sense_n = 0.0;
    out.rate_mts = 0.0;
    for (const MatC& wi : out.w) {
        if (setup.has_sense) out.sense_n += real_inner(setup.a1n, wi);
        out.rate_mts += inv_m * erate_fast(wi, ens);
    }
    return out;
}

struct CoreResult {
    std::vector<MatC> w;
    double beta = 0.0;  // original scale
    double mu = 0.0;
    RateCase rate_case = RateCase::inactive_rate;
    double rate = 0.0;       // (1/M) sum_m expected rate
    double objective = 0.0;  // (1/M) sum_m tr(A1 W_m)
    int iterations = 0;
    double rel_gap = 0.0;
};

// Case split + dual bisection shared by the single- and multi-slot paths.
CoreResult solve_core(const ProblemSpec& spec, int n_slots) {
    validate(spec);
    const SolveTolerances& tol = spec.tolerances;
    const double lam1 = lambda_max(spec.kernel.a1);
    if (!(lam1 > 0.0))
        throw std::invalid_argument("solve: A1 is numerically zero");
    const double norm = lam1;
    const double inv_m = 1.0 / static_cast<double>(n_slots);

    EngineSetup setup;
    setup.a1n = spec.kernel.a1 / norm;
    setup.n_slots = n_slots;
    setup.map_tol = tol.inner_gradient * std::max(1.0, lam1) / lam1;

    CoreResult res;
    const MatC w_c = case1_candidate(spec.kernel, spec.power_budget);
    const double rate_c = expected_rate(w_c, spec.ensemble);
    if (rate_c >= spec.rate_target) {
        res.w.assign(n_slots, w_c);
        res.beta = 0.0;
        res.mu = lam1;
        res.rate_case = RateCase::inactive_rate;
        res.rate = rate_c;
        res.objective = (spec.kernel.a1 * w_c).trace().real();
        res.rel_gap = 0.0;
        return res;
    }

    // feasibility gate: the beta-dominant (rate-only) optimum must reach the target
    {
        EngineSetup rate_only = setup;
        rate_only.has_sense = false;
        rate_only.beta_n = 1.0;
        rate_only.map_tol = tol.inner_gradient;
        EngineOut ro = run_pga(rate_only, spec.ensemble, spec.power_budget, tol, nullptr);
        res.iterations += ro.iterations;
        if (ro.rate_mts < spec.rate_target - tol.feasibility)
            throw InfeasibleError("rate target exceeds the achievable expected rate",
                                  ro.rate_mts, spec.rate_target);
    }

    // bracket: double beta until the inner solution meets the target
    double beta_lo = 0.0;
    double beta_hi = 1.0;
    std::vector<MatC> warm(n_slots, w_c);
    EngineOut hi;
    double rate_lo = rate_c;
    bool bracketed = false;
    for (int d = 0; d < 70; ++d) {
        setup.beta_n = beta_hi;
        hi = run_pga(setup, spec.ensemble, spec.power_budget, tol, &warm);
        res.iterations += hi.iterations;
        warm = hi.w;
        if (hi.rate_mts >= spec.rate_target) {
            bracketed = true;
            break;
        }
        beta_lo = beta_hi;
        rate_lo = hi.rate_mts;
        beta_hi *= 2.0;
    }
    if (!bracketed && hi.rate_mts < spec.rate_target - tol.feasibility)
        throw InfeasibleError("rate target not bracketed within the dual search",
                              hi.rate_mts, spec.rate_target);

    for (int it = 0; bracketed && it < tol.max_bisection_iterations; ++it) {
        const double obj_hi = hi.sense_n * norm * inv_m;
        const double gap = beta_hi * norm * (hi.rate_mts - spec.rate_target) * inv_m;
        if (hi.rate_mts - rate_lo <= tol.bisection) break;
        if (gap <= tol.duality_gap * std::max(std::abs(obj_hi), 1e-30)) break;
        const double beta_mid = 0.5 * (beta_lo + beta_hi);
        setup.beta_n = beta_mid;
        EngineOut mid = run_pga(setup, spec.ensemble, spec.power_budget, tol, &warm);
        res.iterations += mid.iterations;
        warm = mid.w;
        if (mid.rate_mts >= spec.rate_target) {
            beta_hi = beta_mid;
            hi = std::move(mid);
        } else {
            beta_lo = beta_mid;
            rate_lo = mid.rate_mts;
        }
    }

    res.w = hi.w;
    res.beta = beta_hi * norm;
    res.mu = hi.mu_n * norm;
    res.rate_case = RateCase::active_rate;
    res.rate = hi.rate_mts;
    res.objective = hi.sense_n * norm * inv_m;
    res.rel_gap = beta_hi * norm * (hi.rate_mts - spec.rate_target) * inv_m /
                  std::max(std::abs(res.objective), 1e-30);
    return res;
}

KktResiduals compute_kkt(const ProblemSpec& spec, const MatC& w, double beta,
                         double mu, double rate) {
    const double lam1 = lambda_max(spec.kernel.a1);
    const double norm = std::max(lam1, 1e-300);
    KktResiduals kkt;

    MatC grad_l = spec.kernel.a1 / norm;
    if (beta != 0.0) grad_l += (beta / norm) * erate_gradient(w, spec.ensemble);
    grad_l -= (mu / norm) * MatC::Identity(w.rows(), w.cols());
    // stationarity: distance of W from the PSD-cone fixed point of W + grad(L)
    Eigen::SelfAdjointEigenSolver<MatC> es(MatC(0.5 * ((w + grad_l) +
                                                       (w + grad_l).adjoint())));
    VecD d = es.eigenvalues().cwiseMax(0.0);
    const MatC proj = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    kkt.stationarity = (proj - w).norm();

    kkt.complementarity =
        std::abs(beta / norm) * std::abs(rate - spec.rate_target) +
        std::abs(mu / norm) * std::abs(w.trace().real() - spec.power_budget);

    Eigen::SelfAdjointEigenSolver<MatC> ew(MatC(0.5 * (w + w.adjoint())),
                                           Eigen::EigenvaluesOnly);
    const double neg = std::max(-ew.eigenvalues().minCoeff(), 0.0);
    const double over_power = std::max(w.trace().real() - spec.power_budget, 0.0);
    const double under_rate =
        beta > 0.0 ? std::max(spec.rate_target - rate, 0.0) : 0.0;
    kkt.feasibility = std::max({neg, over_power, under_rate});
    return kkt;
}

}  // namespace

void validate(const ProblemSpec& spec) {
    if (!(spec.power_budget > 0.0))
        throw std::invalid_argument("ProblemSpec: power budget must be > 0");
    if (!(spec.rate_target >= 0.0))
        throw std::invalid_argument("ProblemSpec: rate target must be >= 0");
    if (spec.ensemble.channels.empty())
        throw std::invalid_argument("ProblemSpec: empty user ensemble");
    if (spec.ensemble.channels.front().cols() != spec.kernel.a1.rows())
        throw std::invalid_argument("ProblemSpec: kernel/ensemble dimension mismatch");
}

MatC case1_candidate(const SensingKernel& kernel, double power_budget) {
    if (!(power_budget > 0.0))
        throw std::invalid_argument("case1_candidate: power budget must be > 0");
    Eigen::SelfAdjointEigenSolver<MatC> es(
        MatC(0.5 * (kernel.a1 + kernel.a1.adjoint())));
    const int n = static_cast<int>(kernel.a1.rows());
    const double lam1 = es.eigenvalues()(n - 1);
    if (!(lam1 > 0.0))
        throw std::invalid_argument("case1_candidate: A1 is numerically zero");
    const VecC q1 = es.eigenvectors().col(n - 1);
    return power_budget * (q1 * q1.adjoint());
}

MatC project_psd_trace(const MatC& x, double power_budget) {
    if (x.rows() != x.cols())
        throw std::invalid_argument("project_psd_trace: matrix must be square");
    if (!(power_budget > 0.0))
        throw std::invalid_argument("project_psd_trace: power budget must be > 0");
    std::vector<MatC> xs{x};
    return project_slots(xs, power_budget).w.front();
}

InnerResult inner_max(const ProblemSpec& spec, double beta, const MatC* warm_start) {
    validate(spec);
    if (!(beta >= 0.0)) throw std::invalid_argument("inner_max: beta must be >= 0");
    const double lam1 = lambda_max(spec.kernel.a1);
    const double norm = lam1 > 0.0 ? lam1 : 1.0;

    EngineSetup setup;
    setup.a1n = spec.kernel.a1 / norm;
    setup.beta_n = beta / norm;
    setup.n_slots = 1;
    setup.map_tol = spec.tolerances.inner_gradient * std::max(1.0, lam1) / norm;

    std::vector<MatC> warm;
    if (warm_start) warm.push_back(*warm_start);
    EngineOut out = run_pga(setup, spec.ensemble, spec.power_budget,
                            spec.tolerances, warm_start ? &warm : nullptr);
    InnerResult res;
    res.w = out.w.front();
    res.sense_term = (spec.kernel.a1 * res.w).trace().real();
    res.rate = out.rate_mts;
    res.objective = res.sense_term + beta * res.rate;
    res.mu = out.mu_n * norm;
    res.iterations = out.iterations;
    res.objective_history = std::move(out.history);
    for (double& v : res.objective_history) v *= norm;
    return res;
}

InnerResult max_rate(const ProblemSpec& spec, const MatC* warm_start) {
    validate(spec);
    EngineSetup setup;
    const int n = static_cast<int>(spec.kernel.a1.rows());
    setup.a1n = MatC::Zero(n, n);
    setup.has_sense = false;
    setup.beta_n = 1.0;
    setup.n_slots = 1;
    setup.map_tol = spec.tolerances.inner_gradient;

    std::vector<MatC> warm;
    if (warm_start) warm.push_back(*warm_start);
    EngineOut out = run_pga(setup, spec.ensemble, spec.power_budget,
                            spec.tolerances, warm_start ? &warm : nullptr);
    InnerResult res;
    res.w = out.w.front();
    res.sense_term = (spec.kernel.a1 * res.w).trace().real();
    res.rate = out.rate_mts;
    res.objective = res.rate;
    res.mu = out.mu_n;
    res.iterations = out.iterations;
    res.objective_history = std::move(out.history);
    return res;
}

SolveReport solve_p1(const ProblemSpec& spec) {
    CoreResult core = solve_core(spec, 1);
    SolveReport report;
    report.w_opt = core.w.front();
    report.beta = core.beta;
    report.mu = core.mu;
    report.rate_case = core.rate_case;
    report.achieved_rate = expected_rate(report.w_opt, spec.ensemble);
    report.pcrb = pcrb_theta(spec.kernel, report.w_opt);
    report.objective = core.objective;
    report.iterations = core.iterations;
    report.duality_gap = core.rel_gap;
    report.rank = numeric_rank(report.w_opt);
    report.kkt = compute_kkt(spec, report.w_opt, report.beta, report.mu,
                             report.achieved_rate);
    return report;
}

SolveReport solve_p2(const ProblemSpec& spec, int n_slots, bool verify) {
    if (n_slots < 1)
        throw std::invalid_argument("solve_p2: slot count must be >= 1");
    SolveReport report = solve_p1(spec);
    report.w_slots.assign(n_slots, report.w_opt);
    report.pcrb = pcrb_theta_multislot(spec.kernel, report.w_slots);
    if (verify) {
        CoreResult block = solve_core(spec, n_slots);
        report.iterations += block.iterations;
        report.multislot_gap = std::abs(block.objective - report.objective) /
                               std::max(std::abs(report.objective), 1e-30);
    }
    return report;
}

Diagnostics diagnostics(const ProblemSpec& spec, const SolveReport& report) {
    Diagnostics diag;
    diag.kkt = compute_kkt(spec, report.w_opt, report.beta, report.mu,
                           report.achieved_rate);
    diag.rank = numeric_rank(report.w_opt);
    const double lam1 = lambda_max(spec.kernel.a1);
    diag.mu_minus_lambda1 = report.mu - lam1;
    diag.lemma1_ok = report.beta > 0.0
                         ? report.mu >= lam1 * (1.0 - 1e-6)
                         : true;
    return diag;
}

int numeric_rank(const MatC& w) {
    Eigen::SelfAdjointEigenSolver<MatC> es(MatC(0.5 * (w + w.adjoint())),
                                           Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0)) return 0;
    int rank = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 1e-8 * hi) ++rank;
    return rank;
}

}  // namespace isacbeam
