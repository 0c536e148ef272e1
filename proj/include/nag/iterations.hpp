// SPDX-License-Identifier: Apache-2.0
#ifndef NAG_ITERATIONS_HPP
#define NAG_ITERATIONS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "nag/game.hpp"

namespace nag {

struct PicardBanach {};
struct Krasnoselskij {
    double lambda = 0.5;  // in (0,1)
};
struct Mann {
    // alpha_k in (0,1), alpha_k -> 0, sum alpha_k = inf. The loop starts
    // the counter at k0 = 2 so the default 1/k stays strictly below 1.
    std::function<double(long)> alpha = [](long k) { return 1.0 / double(k); };
    long k0 = 2;
};
using FeedbackScheme = std::variant<PicardBanach, Krasnoselskij, Mann>;

struct SplitCounts {
    int nu1 = 0;
    int nu2 = 0;
};

enum class ResidualKind { SignalDelta, FixedPointGap };

struct StoppingRule {
    double tol = 1e-5;
    ResidualKind kind = ResidualKind::SignalDelta;
    long max_iter = 10000;
};

struct RunResult {
    long iterations = 0;
    bool converged = false;
    StackedSignal final_z;
    std::vector<VectorXd> final_strategies;  // what the agents actually play
    std::vector<double> residual_history;
    std::optional<std::vector<StackedSignal>> trajectory;
};

/// One update z -> Phi_k(z, A_{nu1,nu2}(z)). The counter k only matters
/// for the Mann schedule.
StackedSignal step(const GameSpec& game, const FeedbackScheme& scheme,
                   SplitCounts split, const StackedSignal& z, long k = 1);

RunResult run(const GameSpec& game, const FeedbackScheme& scheme,
              SplitCounts split, const StoppingRule& stop, StackedSignal z0,
              bool record_trajectory = false);

/// Sampled checks of the operator-regularity inequalities for the update
/// mapping A_{nu1,nu2}, each in the metric its convergence case prescribes:
/// I kron Q for contraction/nonexpansiveness, I kron (-C) for firm
/// nonexpansiveness, I kron C for the monotonicity behind the strictly
/// pseudo-contractive case. Margins are minima over sampled pairs; a
/// property whose metric is not positive definite reports NaN.
struct RegularityReport {
    double contraction_factor = 0.0;  // max ||f(r)-f(s)||_S / ||r-s||_S
    double ne_margin = 0.0;           // min ||r-s||_S - ||f(r)-f(s)||_S
    double fne_margin = 0.0;  // min (r-s)'S df - ||df||_S^2, S = I kron -C
    double mon_margin = 0.0;  // min (-df)'S(r-s), S = I kron C
    double spc_rho = 0.0;     // max (||df||^2-||r-s||^2)/||df-(r-s)||^2 in S
    int samples = 0;
};

RegularityReport certify_regularity(const GameSpec& game, SplitCounts split,
                                    int n_samples, std::uint64_t seed);

/// Uniform draw inside the stacked bounding box.
StackedSignal sample_stacked(const GameSpec& game, std::uint64_t seed);

}  // namespace nag

#endif
