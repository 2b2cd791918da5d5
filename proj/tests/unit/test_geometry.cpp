// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "isacbeam/geometry.hpp"

using namespace isacbeam;

namespace {

const ArrayConfig kDefault{10, 12, 8};

MatC finite_difference_m(double theta, const ArrayConfig& cfg, double h) {
    const MatC hi = response_pair(theta + h, cfg).m;
    const MatC lo = response_pair(theta - h, cfg).m;
    return (hi - lo) / (2.0 * h);
}

}  // namespace

TEST_CASE("steering at broadside is all ones") {
    const SteeringVector sv = steering(SteeringKind::tx, 0.0, kDefault);
    REQUIRE(sv.entries.size() == 10);
    for (int i = 0; i < 10; ++i) {
        CHECK(sv.entries(i).real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(sv.entries(i).imag() == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("steering entries are unit modulus, squared norm = element count") {
    const SteeringVector sv = steering(SteeringKind::tx, 0.37, kDefault);
    CHECK(sv.entries.squaredNorm() == doctest::Approx(10.0).epsilon(1e-14));
    for (int i = 0; i < sv.entries.size(); ++i)
        CHECK(std::abs(sv.entries(i)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rx steering entry matches the element formula") {
    // entry 0 of a 12-element array: d_0 = -11/2
    const SteeringVector sv = steering(SteeringKind::rx, -0.3, kDefault);
    const cxd expected = std::exp(cxd(0.0, M_PI * (-11.0 / 2.0) * std::sin(-0.3)));
    CHECK(std::abs(sv.entries(0) - expected) < 1e-14);
}

TEST_CASE("steering rejects angles outside [-pi/2, pi/2)") {
    CHECK_THROWS_AS(steering(SteeringKind::tx, M_PI / 2.0, kDefault), std::domain_error);
    CHECK_THROWS_AS(steering(SteeringKind::tx, 1.7, kDefault), std::domain_error);
    CHECK_THROWS_AS(steering(SteeringKind::tx, -1.6, kDefault), std::domain_error);
    CHECK_NOTHROW(steering(SteeringKind::tx, -M_PI / 2.0, kDefault));
}

TEST_CASE("steering derivative of a 2-element array at broadside") {
    ArrayConfig cfg{2, 2, 2};
    const VecC d = steering_derivative(SteeringKind::tx, 0.0, cfg);
    CHECK(std::abs(d(0) - cxd(0.0, -M_PI / 2.0)) < 1e-15);
    CHECK(std::abs(d(1) - cxd(0.0, M_PI / 2.0)) < 1e-15);
}

TEST_CASE("steering derivative matches central finite differences") {
    const double h = 1e-6;
    for (double theta : {-1.2, -0.3, 0.0, 0.41, 1.3}) {
        const VecC d = steering_derivative(SteeringKind::rx, theta, kDefault);
        const VecC fd = (steering(SteeringKind::rx, theta + h, kDefault).entries -
                         steering(SteeringKind::rx, theta - h, kDefault).entries) /
                        (2.0 * h);
        CHECK((d - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("steering derivative magnitude vanishes toward endfire") {
    const double theta = M_PI / 2.0 - 1e-9;
    const VecC d = steering_derivative(SteeringKind::tx, theta, kDefault);
    CHECK(d.cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("response pair at broadside is the all-ones matrix") {
    const ResponsePair rp = response_pair(0.0, kDefault);
    REQUIRE(rp.m.rows() == 12);
    REQUIRE(rp.m.cols() == 10);
    CHECK((rp.m - MatC::Ones(12, 10)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("response energy tr(M^H M) = N_R * N_T at any angle") {
    for (double theta : {-0.9, -0.3, 0.2, 1.1}) {
        const ResponsePair rp = response_pair(theta, kDefault);
        CHECK((rp.m.adjoint() * rp.m).trace().real() ==
              doctest::Approx(120.0).epsilon(1e-13));
    }
}

TEST_CASE("M^H M equals N_R a a^H entrywise") {
    for (double theta : {-0.6, 0.15}) {
        const ResponsePair rp = response_pair(theta, kDefault);
        const VecC a = steering(SteeringKind::tx, theta, kDefault).entries;
        const MatC lhs = rp.m.adjoint() * rp.m;
        const MatC rhs = 12.0 * (a * a.adjoint());
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("M dot matches central finite differences of M") {
    const ResponsePair rp = response_pair(0.2, kDefault);
    const MatC fd = finite_difference_m(0.2, kDefault, 1e-6);
    CHECK((rp.m_dot - fd).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("conjugate symmetry: steering(-theta) = conj(steering(theta))") {
    for (double theta : {0.1, 0.45, 1.2}) {
        const VecC pos = steering(SteeringKind::user, theta, kDefault).entries;
        const VecC neg = steering(SteeringKind::user, -theta, kDefault).entries;
        CHECK((neg - pos.conjugate()).cwiseAbs().maxCoeff() < 1e-15);
    }
}
