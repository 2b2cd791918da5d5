// SPDX-License-Identifier: Apache-2.0

#ifndef ISACBEAM_TYPES_HPP
#define ISACBEAM_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace isacbeam {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;
using MatD = Eigen::MatrixXd;

// Antenna counts of the BS transmit/receive arrays and the user array.
struct ArrayConfig {
    int n_tx = 1;
    int n_rx = 1;
    int n_user = 1;
};

inline void validate(const ArrayConfig& cfg) {
    if (cfg.n_tx < 1 || cfg.n_rx < 1 || cfg.n_user < 1)
        throw std::invalid_argument("ArrayConfig: all antenna counts must be >= 1");
}

// Rate-constrained solve cannot reach the requested target.
class InfeasibleError : public std::runtime_error {
  public:
    InfeasibleError(const std::string& msg, double rate_cap, double rate_target)
        : std::runtime_error(msg), rate_cap(rate_cap), rate_target(rate_target) {}
    double rate_cap;     // best achievable expected rate under the power budget
    double rate_target;
};

// Iteration cap hit before the gradient-mapping tolerance; carries the best iterate.
class NonconvergenceError : public std::runtime_error {
  public:
    NonconvergenceError(const std::string& msg, MatC best_iterate, double residual)
        : std::runtime_error(msg), best_iterate(std::move(best_iterate)), residual(residual) {}
    MatC best_iterate;
    double residual;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace isacbeam

#endif
