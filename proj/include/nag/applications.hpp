// SPDX-License-Identifier: Apache-2.0
#ifndef NAG_APPLICATIONS_HPP
#define NAG_APPLICATIONS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "nag/equilibrium.hpp"
#include "nag/game.hpp"
#include "nag/iterations.hpp"

namespace nag {

// ---------------------------------------------------------------------------
// Opinion dynamics
// ---------------------------------------------------------------------------

enum class AgentKind { FullyStubborn, Follower, PartiallyStubborn };

/// Multi-topic opinion game. Agent i pays (1+theta_i)||x||^2 - 2 sigma'x
/// - 2 theta_i x0_i'x, i.e. it trades off agreement with its neighborhood
/// average against attachment to its initial opinion.
struct OpinionConfig {
    int n_agents = 0;
    int n = 1;  // topics per agent
    std::vector<double> theta;
    std::vector<VectorXd> x0;  // initial opinions in [0,1]^n
    std::vector<AgentKind> kinds;
    // Optional coupling between the first two topics: (x_1 - x_2)^2 <= delta,
    // imposed on every non-follower. Requires n >= 2.
    std::optional<double> delta;
    Topology topology;
    std::uint64_t seed = 0;
};

struct OpinionGame {
    GameSpec game;
    StackedSignal z0;  // stacked initial opinions, projected to feasibility
};

/// Zero-diagonal row-stochastic network for the requested topology, so a
/// single communication excludes every agent's own strategy from its
/// aggregate.
Network opinion_network(const Topology& topology, int n, std::uint64_t seed);

OpinionGame build_opinion_game(const OpinionConfig& cfg);

/// Random opinion population: opinions uniform in [0,1]^n, stubborn agents
/// (theta = 1) or followers (theta = 0) according to the kind list.
OpinionConfig sample_opinion_config(int n_agents, int n,
                                    const std::vector<AgentKind>& kinds,
                                    std::optional<double> delta,
                                    Topology topology, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Demand response
// ---------------------------------------------------------------------------

/// Curtailment scheduling over a T-hour horizon under the affine price
/// p(sigma) = lambda * sigma + p0. Agent i pays
///   rho_i ||u - uhat_i||^2 + p(sigma)'u   (up to constants)
/// which is the quadratic game with q_i = rho_i, Q = I_T, C = (lambda/2) I_T
/// and c_i = p0/2 - rho_i uhat_i.
struct DemandResponseConfig {
    int n_agents = 0;
    int horizon = 24;
    double lambda_price = 2.0;
    std::vector<double> rho;   // curtailment weights, > 0
    VectorXd p0;               // baseline price, length T
    std::vector<VectorXd> uhat;  // nominal profiles, length T each
    std::vector<std::pair<int, int>> windows;  // [start, end], 1-based
    int m = 5;   // groups of the hierarchical network
    int b = 1;   // agents per group, N = M*B
    int nu = 2;  // communication rounds of the built game
    std::uint64_t seed = 0;
};

struct DemandResponseGame {
    GameSpec game;
    StackedSignal z0;  // stacked nominal profiles
};

DemandResponseGame build_demand_response_game(const DemandResponseConfig& cfg);

/// Synthetic smooth day/night baseline consumption over T hours, scaled to
/// [0.1, 1]. This is bundled stand-in data, not measured load.
VectorXd synthetic_sigma0(int horizon);

/// Random instance in the style of the replication experiment: uhat uniform
/// in [0,1]^T, windows with start in {1..T-1} and end in {start+1..T},
/// rho_i = 0.1, p0 = lambda * sigma0, M-ring group network.
DemandResponseConfig sample_demand_response(int m, int b, int horizon,
                                            const VectorXd& sigma0,
                                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Replication experiments
// ---------------------------------------------------------------------------

struct OpinionSweepCell {
    int n_agents = 0;
    TopologyKind topology = TopologyKind::CompleteNoSelf;
    bool mixed = false;  // half followers (Krasnoselskij) vs all stubborn
    int runs = 0;
    int converged = 0;
    double mean_iterations = 0.0;
    double q05_iterations = 0.0;
    double q95_iterations = 0.0;
};

/// Iteration-count sweep over population sizes and topologies. All-stubborn
/// populations (theta = 1) run Picard-Banach; mixed populations replace half
/// the agents by followers and run Krasnoselskij with lambda = 1/2. Two
/// topics per agent, coupling delta = 0.3, tolerance 1e-5.
std::vector<OpinionSweepCell> run_fig3_experiment(
    const std::vector<int>& populations,
    const std::vector<TopologyKind>& topologies, bool mixed, int n_seeds,
    std::uint64_t base_seed);

struct DemandSweepCell {
    int n_agents = 0;
    int nu = 0;
    int runs = 0;
    int converged = 0;
    double mean_iterations = 0.0;
    double mean_eps = 0.0;          // realized mean-field max_eps
    double mean_central_eps = 0.0;  // baseline on the exact averaging matrix
};

/// Communication-count sweep for the demand-response game: Mann scheme with
/// the nu/2 + nu/2 split, fixed-point-gap stopping at 1e-3, mean-field
/// epsilon certification, plus a centrally coordinated baseline where the
/// network is replaced by (1/N)11'.
std::vector<DemandSweepCell> run_fig5_experiment(
    const std::vector<int>& b_list, const std::vector<int>& nu_list, int m,
    int n_seeds, const VectorXd& sigma0, std::uint64_t base_seed);

}  // namespace nag

#endif
