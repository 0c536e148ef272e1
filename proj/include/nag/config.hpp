// SPDX-License-Identifier: Apache-2.0
#ifndef NAG_CONFIG_HPP
#define NAG_CONFIG_HPP

#include <json.hpp>
#include <string>

#include "nag/applications.hpp"
#include "nag/equilibrium.hpp"
#include "nag/iterations.hpp"

namespace nag {

using nlohmann::json;

/// Parsed experiment description. The JSON schema is documented in the
/// README; unknown keys are rejected so typos fail loudly.
struct ExperimentConfig {
    json game;      // {"kind": "opinion"|"demand_response"|"raw", ...}
    json network;   // {"source": "generate"|"csv", ...}, raw games and netgen
    json scheme;    // {"kind", "lambda", "k0", "nu1", "nu2"}
    json stopping;  // {"tol", "residual", "max_iter"}
    json sweep;     // {"preset": "fig3"|"fig5", ...}
    json output;    // {"dir"}
};

ExperimentConfig load_config(const std::string& path);

struct BuiltExperiment {
    GameSpec game;
    StackedSignal z0;
};

/// Instantiates the configured game. The seed override (from --seed)
/// replaces any seed in the file when nonnegative.
BuiltExperiment build_game(const ExperimentConfig& cfg, long long seed_override);

Network build_network(const json& network, int n, std::uint64_t seed);

FeedbackScheme make_scheme(const json& scheme);
SplitCounts make_split(const json& scheme, int nu);
StoppingRule make_stopping(const json& stopping);

json to_json(const SpectralReport& report);
json to_json(const ConditionReport& report);
json to_json(const NashCertificate& cert);
json to_json(const RegularityReport& report);

void save_residuals_csv(const std::string& path, const RunResult& result);
void save_trajectory_csv(const std::string& path, const RunResult& result,
                         int n);
void save_strategies_csv(const std::string& path,
                         const std::vector<VectorXd>& strategies);
VectorXd load_vector_csv(const std::string& path);

}  // namespace nag

#endif
