// SPDX-License-Identifier: Apache-2.0
//
// Multi-cell BS-user/-target pairing: KLD cost matrix, exact minimum-cost
// assignment (Hungarian), and network-average PCRB under an assignment.

#ifndef ISACBEAM_ASSOCIATION_HPP
#define ISACBEAM_ASSOCIATION_HPP

#include <cstdint>
#include <vector>

#include "isacbeam/channel.hpp"
#include "isacbeam/optimizer.hpp"
#include "isacbeam/priors.hpp"
#include "isacbeam/types.hpp"

namespace isacbeam {

// Everything a single cell's solve needs besides its user/target priors.
struct CellTemplate {
    ArrayConfig array;
    ChannelParams channel;
    double power_budget = 1.0;
    double rate_target = 0.0;
    int l_symbols = 25;
    double sensing_noise = 1e-12;
    double reflection_variance = 2e-14;
    int k_user_locations = 8;
    int quadrature_nodes = 200;
    SolveTolerances tolerances;
};

struct NetworkScenario {
    int n_cells = 2;
    std::vector<AngularPrior> user_priors;
    std::vector<AngularPrior> target_priors;
    CellTemplate cell;
    std::uint64_t seed = 0;
};

void validate(const NetworkScenario& scenario);

struct Assignment {
    std::vector<int> pairing;  // target index assigned to each user index
    double total_cost = 0.0;   // nats
};

// entry (i, j) = KL(user_i || target_j)
MatD build_cost_matrix(const NetworkScenario& scenario);

// Exact minimum-cost perfect matching on a square nonnegative matrix.
Assignment assign_min_cost(const MatD& cost);

// Solves each cell's covariance design under the given pairing and averages
// the per-cell PCRBs. Per-cell ensembles depend only on the cell index and
// scenario seed, so assignments are compared on identical channel draws.
double evaluate_network(const NetworkScenario& scenario, const Assignment& assignment);

}  // namespace isacbeam

#endif
