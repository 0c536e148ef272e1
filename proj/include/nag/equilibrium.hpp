// SPDX-License-Identifier: Apache-2.0
#ifndef NAG_EQUILIBRIUM_HPP
#define NAG_EQUILIBRIUM_HPP

#include <utility>
#include <vector>

#include "nag/game.hpp"

namespace nag {

enum class EquilibriumMode {
    NA,  // deviation against sum_j P^nu_ij x^j, self-weight P^nu_ii
    MF   // deviation against the population average, self-weight 1/N
};

struct NashCertificate {
    std::vector<double> per_agent_eps;  // J(played) - J(best deviation)
    double max_eps = 0.0;
    EquilibriumMode mode = EquilibriumMode::NA;
    int nu = 0;
};

struct NonconvexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Best unilateral deviation of agent i against the fixed strategies of the
/// others. The deviation variable also enters the aggregate through the
/// self-weight, so the problem is solved by projected gradient; with zero
/// self-weight it reduces to the optimal response.
std::pair<VectorXd, double> best_deviation(
    const GameSpec& game, int i, const std::vector<VectorXd>& profile,
    EquilibriumMode mode);

NashCertificate certify_nash(const GameSpec& game,
                             const std::vector<VectorXd>& profile,
                             EquilibriumMode mode);

/// Grid oracle: best-response iteration on a shared 1-d grid with cycle
/// detection. Restricted to n = 1, N <= 4, box sets.
std::vector<VectorXd> brute_force_nash(const GameSpec& game,
                                       double grid_resolution);

/// (consensus_error(P, nu), sqrt(N) * mu^nu); requires a symmetric doubly
/// stochastic primitive network and asserts the bound.
std::pair<double, double> corollary1_pieces(const Network& net, int nu);

}  // namespace nag

#endif
