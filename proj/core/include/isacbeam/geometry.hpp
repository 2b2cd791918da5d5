// SPDX-License-Identifier: Apache-2.0
//
// Half-wavelength ULA steering vectors, their angle derivatives, and the
// rank-one target response M(theta) = b(theta) a^H(theta) with derivative.
//
// Element n of an N-element array responds with exp(j*pi*d_n*sin(theta)),
// d_n = (2n - N + 1)/2, i.e. phase referenced to the array center with
// symmetric offsets -(N-1)/2 ... +(N-1)/2.

#ifndef ISACBEAM_GEOMETRY_HPP
#define ISACBEAM_GEOMETRY_HPP

#include "isacbeam/types.hpp"

namespace isacbeam {

enum class SteeringKind { tx, rx, user };

struct SteeringVector {
    VecC entries;  // unit-modulus
    SteeringKind kind;
};

struct ResponsePair {
    MatC m;      // b a^H, N_R x N_T, rank 1
    MatC m_dot;  // db a^H + b da^H
};

// Angles are radians in [-pi/2, pi/2); anything else is a domain error.
SteeringVector steering(SteeringKind kind, double theta, const ArrayConfig& cfg);

// Elementwise derivative of the steering vector: entry_n * j*pi*d_n*cos(theta).
VecC steering_derivative(SteeringKind kind, double theta, const ArrayConfig& cfg);

ResponsePair response_pair(double theta, const ArrayConfig& cfg);

}  // namespace isacbeam

#endif
