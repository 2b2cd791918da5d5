// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/association.hpp"

#include <cmath>
#include <limits>

#include "isacbeam/rng.hpp"

namespace isacbeam {

void validate(const NetworkScenario& scenario) {
    if (scenario.n_cells < 2)
        throw std::invalid_argument("NetworkScenario: need at least 2 cells");
    if (static_cast<int>(scenario.user_priors.size()) != scenario.n_cells ||
        static_cast<int>(scenario.target_priors.size()) != scenario.n_cells)
        throw std::invalid_argument("NetworkScenario: prior count != n_cells");
    for (const AngularPrior& p : scenario.user_priors) validate(p);
    for (const AngularPrior& p : scenario.target_priors) validate(p);
}

MatD build_cost_matrix(const NetworkScenario& scenario) {
    validate(scenario);
    MatD cost(scenario.n_cells, scenario.n_cells);
    for (int i = 0; i < scenario.n_cells; ++i)
        for (int j = 0; j < scenario.n_cells; ++j)
            cost(i, j) = kld_gaussian(scenario.user_priors[i], scenario.target_priors[j]);
    return cost;
}

// Hungarian algorithm with row/column potentials, O(N^3).
Assignment assign_min_cost(const MatD& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n || n < 1)
        throw std::invalid_argument("assign_min_cost: cost matrix must be square");
    if (cost.minCoeff() < 0.0)
        throw std::invalid_argument("assign_min_cost: cost matrix must be nonnegative");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j (1-based)
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    Assignment out;
    out.pairing.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] >= 1) out.pairing[match[j] - 1] = j - 1;
    out.total_cost = 0.0;
    for (int i = 0; i < n; ++i) out.total_cost += cost(i, out.pairing[i]);
    return out;
}

double evaluate_network(const NetworkScenario& scenario, const Assignment& assignment) {
    validate(scenario);
    if (static_cast<int>(assignment.pairing.size()) != scenario.n_cells)
        throw std::invalid_argument("evaluate_network: pairing size != n_cells");
    std::vector<char> seen(scenario.n_cells, false);
    for (int t : assignment.pairing) {
        if (t < 0 || t >= scenario.n_cells || seen[t])
            throw std::invalid_argument("evaluate_network: pairing is not a bijection");
        seen[t] = true;
    }

    const CellTemplate& cell = scenario.cell;
    double total = 0.0;
    for (int i = 0; i < scenario.n_cells; ++i) {
        const AngularPrior& user = scenario.user_priors[i];
        const AngularPrior& target = scenario.target_priors[assignment.pairing[i]];
        try {
            const auto support = default_user_support(user.mean, user.variance);
            const UserPMF pmf =
                discretize_user_pmf(user.mean, user.variance, cell.k_user_locations,
                                    support.first, support.second);
            ProblemSpec spec;
            spec.kernel = build_kernel(target, quadrature_grid(target, cell.quadrature_nodes),
                                       cell.array, ReflectionPrior{cell.reflection_variance},
                                       cell.l_symbols, cell.sensing_noise);
            spec.ensemble = generate_ensemble(
                pmf, cell.array, cell.channel,
                Rng::derive(scenario.seed, static_cast<std::uint64_t>(i)));
            spec.power_budget = cell.power_budget;
            spec.rate_target = cell.rate_target;
            spec.tolerances = cell.tolerances;
            total += solve_p1(spec).pcrb;
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("cell " + std::to_string(i) + ": " + e.what(),
                                  e.rate_cap, e.rate_target);
        }
    }
    return total / scenario.n_cells;
}

}  // namespace isacbeam
