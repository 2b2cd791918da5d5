// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/geometry.hpp"

#include <cmath>

namespace isacbeam {

namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

int element_count(SteeringKind kind, const ArrayConfig& cfg) {
    switch (kind) {
        case SteeringKind::tx: return cfg.n_tx;
        case SteeringKind::rx: return cfg.n_rx;
        case SteeringKind::user: return cfg.n_user;
    }
    throw std::invalid_argument("steering: unknown kind");
}

void check_theta(double theta) {
    if (!(theta >= -kHalfPi && theta < kHalfPi))
        throw std::domain_error("steering: theta must lie in [-pi/2, pi/2)");
}

}  // namespace

SteeringVector steering(SteeringKind kind, double theta, const ArrayConfig& cfg) {
    validate(cfg);
    check_theta(theta);
    const int n = element_count(kind, cfg);
    const double st = std::sin(theta);
    VecC v(n);
    for (int i = 0; i < n; ++i) {
        const double d = 0.5 * (2 * i - n + 1);
        const double phase = M_PI * d * st;
        v(i) = cxd(std::cos(phase), std::sin(phase));
    }
    return {std::move(v), kind};
}

VecC steering_derivative(SteeringKind kind, double theta, const ArrayConfig& cfg) {
    validate(cfg);
    check_theta(theta);
    const int n = element_count(kind, cfg);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    VecC v(n);
    for (int i = 0; i < n; ++i) {
        const double d = 0.5 * (2 * i - n + 1);
        const double phase = M_PI * d * st;
        const cxd entry(std::cos(phase), std::sin(phase));
        v(i) = entry * cxd(0.0, M_PI * d * ct);
    }
    return v;
}

ResponsePair response_pair(double theta, const ArrayConfig& cfg) {
    const VecC a = steering(SteeringKind::tx, theta, cfg).entries;
    const VecC b = steering(SteeringKind::rx, theta, cfg).entries;
    const VecC a_dot = steering_derivative(SteeringKind::tx, theta, cfg);
    const VecC b_dot = steering_derivative(SteeringKind::rx, theta, cfg);
    ResponsePair rp;
    rp.m = b * a.adjoint();
    rp.m_dot = b_dot * a.adjoint() + b * a_dot.adjoint();
    return rp;
}

}  // namespace isacbeam
