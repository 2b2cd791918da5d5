// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/sensing.hpp"

#include <cmath>

namespace isacbeam {

void require_psd(const MatC& w, const char* what) {
    if (w.rows() != w.cols())
        throw std::invalid_argument(std::string(what) + ": matrix must be square");
    Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (w + w.adjoint()),
                                           Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < -1e-8 * std::max(hi, 0.0))
        throw std::invalid_argument(std::string(what) + ": matrix is not PSD");
}

SensingKernel build_kernel(const AngularPrior& prior, const QuadratureGrid& grid,
                           const ArrayConfig& cfg, const ReflectionPrior& reflection,
                           int l_symbols, double noise_power, double gamma_override) {
    validate(prior);
    validate(reflection);
    validate(cfg);
    if (l_symbols < 1)
        throw std::invalid_argument("build_kernel: L must be >= 1");
    if (!(noise_power > 0.0))
        throw std::invalid_argument("build_kernel: noise power must be > 0");
    if (grid.nodes.size() != grid.weights.size() || grid.nodes.size() == 0)
        throw std::invalid_argument("build_kernel: malformed quadrature grid");

    // A grid built from this prior carries unit normalized mass.
    double mass = 0.0;
    for (int i = 0; i < grid.nodes.size(); ++i)
        mass += grid.weights(i) * pdf(prior, grid.nodes(i));
    if (std::abs(mass - 1.0) > 1e-6)
        throw std::invalid_argument("build_kernel: quadrature grid does not match prior");

    SensingKernel kernel;
    kernel.config = cfg;
    kernel.prior = prior;
    kernel.a1 = MatC::Zero(cfg.n_tx, cfg.n_tx);
    kernel.a2 = MatC::Zero(cfg.n_tx, cfg.n_tx);
    for (int i = 0; i < grid.nodes.size(); ++i) {
        const double c = grid.weights(i) * pdf(prior, grid.nodes(i));
        if (c == 0.0) continue;
        const ResponsePair rp = response_pair(grid.nodes(i), cfg);
        kernel.a1.noalias() += c * (rp.m_dot.adjoint() * rp.m_dot);
        kernel.a2.noalias() += c * (rp.m.adjoint() * rp.m);
    }
    kernel.a1 = 0.5 * (kernel.a1 + kernel.a1.adjoint()).eval();
    kernel.a2 = 0.5 * (kernel.a2 + kernel.a2.adjoint()).eval();
    kernel.gamma = gamma_override >= 0.0 ? gamma_override : reflection.variance;
    kernel.prior_fisher = prior_fisher(prior);
    kernel.l_symbols = l_symbols;
    kernel.noise_power = noise_power;
    return kernel;
}

double pcrb_theta(const SensingKernel& kernel, const MatC& w) {
    if (w.rows() != kernel.a1.rows() || w.cols() != kernel.a1.cols())
        throw std::invalid_argument("pcrb_theta: W dimension mismatch");
    require_psd(w, "pcrb_theta");
    const double t = (kernel.a1 * w).trace().real();
    const double coeff = 2.0 * kernel.l_symbols * kernel.gamma / kernel.noise_power;
    return 1.0 / (kernel.prior_fisher + coeff * t);
}

double pcrb_theta_multislot(const SensingKernel& kernel, const std::vector<MatC>& w_slots) {
    if (w_slots.empty())
        throw std::invalid_argument("pcrb_theta_multislot: need at least one slot");
    double sum = 0.0;
    for (const MatC& w : w_slots) {
        if (w.rows() != kernel.a1.rows() || w.cols() != kernel.a1.cols())
            throw std::invalid_argument("pcrb_theta_multislot: W dimension mismatch");
        require_psd(w, "pcrb_theta_multislot");
        sum += (kernel.a1 * w).trace().real();
    }
    const double m = static_cast<double>(w_slots.size());
    const double coeff = 2.0 * kernel.l_symbols * kernel.gamma / (kernel.noise_power * m);
    return 1.0 / (kernel.prior_fisher + coeff * sum);
}

Pfim assemble_pfim(const SensingKernel& kernel, const MatC& w) {
    require_psd(w, "assemble_pfim");
    const double coeff = 2.0 * kernel.l_symbols / kernel.noise_power;
    Pfim pfim;
    pfim.f_theta_theta =
        kernel.prior_fisher + coeff * kernel.gamma * (kernel.a1 * w).trace().real();
    const double obs_alpha = coeff * (kernel.a2 * w).trace().real();
    const double prior_alpha = 2.0 / kernel.gamma;  // circular Gaussian score variance
    pfim.f_alpha_alpha = (obs_alpha + prior_alpha) * Eigen::Matrix2d::Identity();
    pfim.cross_block = Eigen::Vector2d::Zero();
    return pfim;
}

}  // namespace isacbeam
