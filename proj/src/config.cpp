// SPDX-License-Identifier: Apache-2.0
#include "nag/config.hpp"

#include <fstream>
#include <sstream>

namespace nag {

namespace {

void require_keys(const json& j, const char* section,
                  std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) known = known || it.key() == key;
        if (!known) {
            throw std::runtime_error(std::string("unknown key \"") + it.key() +
                                     "\" in section \"" + section + "\"");
        }
    }
}

VectorXd parse_vector(const json& j) {
    VectorXd v(j.size());
    for (size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
    return v;
}

MatrixXd parse_matrix(const json& j) {
    const size_t rows = j.size();
    if (rows == 0) throw std::runtime_error("empty matrix in config");
    const size_t cols = j[0].size();
    MatrixXd m(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) {
            throw std::runtime_error("ragged matrix in config");
        }
        for (size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

PrimitiveSet parse_primitive(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "box") {
        return Box{parse_vector(j.at("lo")), parse_vector(j.at("hi"))};
    }
    if (type == "halfspace") {
        return Halfspace{parse_vector(j.at("a")), j.at("b").get<double>()};
    }
    if (type == "ball") {
        return Ball{parse_vector(j.at("center")),
                    j.at("radius").get<double>()};
    }
    if (type == "affine") {
        return AffineSubspace{parse_matrix(j.at("A")), parse_vector(j.at("b"))};
    }
    throw std::runtime_error("unknown primitive type: " + type);
}

TopologyKind parse_topology(const std::string& name) {
    if (name == "complete_no_self") return TopologyKind::CompleteNoSelf;
    if (name == "directed_ring") return TopologyKind::DirectedRing;
    if (name == "undirected_ring") return TopologyKind::UndirectedRing;
    if (name == "small_world") return TopologyKind::SmallWorld;
    throw std::runtime_error("unknown topology: " + name);
}

AgentKind parse_kind(const std::string& name) {
    if (name == "fully_stubborn") return AgentKind::FullyStubborn;
    if (name == "follower") return AgentKind::Follower;
    if (name == "partially_stubborn") return AgentKind::PartiallyStubborn;
    throw std::runtime_error("unknown agent kind: " + name);
}

std::uint64_t effective_seed(const json& section, long long seed_override) {
    if (seed_override >= 0) return static_cast<std::uint64_t>(seed_override);
    return section.value("seed", std::uint64_t{0});
}

BuiltExperiment build_opinion(const json& game, long long seed_override) {
    require_keys(game, "game",
                 {"kind", "n_agents", "n", "theta", "delta", "kinds",
                  "mixture", "topology", "p_shortcut", "seed"});
    OpinionConfig cfg;
    cfg.n_agents = game.at("n_agents").get<int>();
    cfg.n = game.value("n", 1);
    cfg.topology.kind =
        parse_topology(game.value("topology", std::string("complete_no_self")));
    cfg.topology.p_shortcut = game.value("p_shortcut", 0.3);
    cfg.seed = effective_seed(game, seed_override);
    if (game.contains("delta")) cfg.delta = game.at("delta").get<double>();

    std::vector<AgentKind> kinds;
    if (game.contains("kinds")) {
        for (const auto& k : game.at("kinds")) {
            kinds.push_back(parse_kind(k.get<std::string>()));
        }
    } else {
        const std::string mixture =
            game.value("mixture", std::string("all_stubborn"));
        for (int i = 0; i < cfg.n_agents; ++i) {
            if (mixture == "all_stubborn") {
                kinds.push_back(AgentKind::PartiallyStubborn);
            } else if (mixture == "all_followers") {
                kinds.push_back(AgentKind::Follower);
            } else if (mixture == "half_followers") {
                kinds.push_back(i % 2 == 0 ? AgentKind::Follower
                                           : AgentKind::PartiallyStubborn);
            } else {
                throw std::runtime_error("unknown mixture: " + mixture);
            }
        }
    }

    OpinionConfig sampled = sample_opinion_config(
        cfg.n_agents, cfg.n, kinds, cfg.delta, cfg.topology, cfg.seed);
    if (game.contains("theta")) {
        const json& theta = game.at("theta");
        for (int i = 0; i < cfg.n_agents; ++i) {
            if (kinds[i] == AgentKind::Follower) continue;
            sampled.theta[i] =
                theta.is_number() ? theta.get<double>()
                                  : theta.at(i).get<double>();
        }
    }
    OpinionGame built = build_opinion_game(sampled);
    return BuiltExperiment{std::move(built.game), std::move(built.z0)};
}

BuiltExperiment build_demand(const json& game, long long seed_override) {
    require_keys(game, "game",
                 {"kind", "m", "b", "horizon", "nu", "rho", "lambda_price",
                  "sigma0_csv", "seed"});
    const int m = game.value("m", 5);
    const int b = game.value("b", 1);
    const int horizon = game.value("horizon", 24);
    VectorXd sigma0 = game.contains("sigma0_csv")
                          ? load_vector_csv(game.at("sigma0_csv"))
                          : synthetic_sigma0(horizon);
    if (sigma0.size() != horizon) {
        throw std::runtime_error("sigma0 length does not match the horizon");
    }
    DemandResponseConfig cfg = sample_demand_response(
        m, b, horizon, sigma0, effective_seed(game, seed_override));
    cfg.nu = game.value("nu", 2);
    if (game.contains("lambda_price")) {
        cfg.lambda_price = game.at("lambda_price").get<double>();
        cfg.p0 = cfg.lambda_price * sigma0;
    }
    if (game.contains("rho")) {
        cfg.rho.assign(cfg.n_agents, game.at("rho").get<double>());
    }
    DemandResponseGame built = build_demand_response_game(cfg);
    return BuiltExperiment{std::move(built.game), std::move(built.z0)};
}

BuiltExperiment build_raw(const json& game, const json& network,
                          long long seed_override) {
    require_keys(game, "game",
                 {"kind", "n", "nu", "Q", "C", "q", "c", "sets", "z0"});
    const int n = game.at("n").get<int>();
    CostParams costs{SpdMatrix(parse_matrix(game.at("Q"))),
                     parse_matrix(game.at("C")),
                     game.at("q").get<std::vector<double>>(),
                     {}};
    for (const auto& ci : game.at("c")) costs.c.push_back(parse_vector(ci));

    std::vector<ConvexSet> sets;
    for (const auto& s : game.at("sets")) {
        std::vector<PrimitiveSet> prims;
        for (const auto& p : s.at("primitives")) {
            prims.push_back(parse_primitive(p));
        }
        sets.emplace_back(std::move(prims), s.value("bounded", true));
    }
    const int n_agents = static_cast<int>(sets.size());
    Network net = build_network(network, n_agents,
                                effective_seed(network, seed_override));
    GameSpec spec(n, std::move(costs), std::move(sets), std::move(net),
                  game.value("nu", 1));
    StackedSignal z0;
    if (game.contains("z0")) {
        z0 = parse_vector(game.at("z0"));
        if (z0.size() != n_agents * n) {
            throw std::runtime_error("z0 length must be N*n");
        }
    } else {
        z0 = StackedSignal::Zero(n_agents * n);
        for (int i = 0; i < n_agents; ++i) {
            z0.segment(i * n, n) = spec.set(i).feasible_point();
        }
    }
    return BuiltExperiment{std::move(spec), std::move(z0)};
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json root = json::parse(in);
    require_keys(root, "config",
                 {"game", "network", "scheme", "stopping", "sweep", "output"});
    ExperimentConfig cfg;
    cfg.game = root.value("game", json::object());
    cfg.network = root.value("network", json::object());
    cfg.scheme = root.value("scheme", json::object());
    cfg.stopping = root.value("stopping", json::object());
    cfg.sweep = root.value("sweep", json::object());
    cfg.output = root.value("output", json::object());
    return cfg;
}

Network build_network(const json& network, int n, std::uint64_t seed) {
    require_keys(network, "network",
                 {"source", "topology", "p_shortcut", "path", "zero_diagonal",
                  "seed"});
    const std::string source =
        network.value("source", std::string("generate"));
    if (source == "csv") {
        return load_network_csv(network.at("path").get<std::string>());
    }
    if (source != "generate") {
        throw std::runtime_error("unknown network source: " + source);
    }
    Topology topology;
    topology.kind =
        parse_topology(network.value("topology", std::string("complete_no_self")));
    topology.p_shortcut = network.value("p_shortcut", 0.3);
    if (network.value("zero_diagonal", false)) {
        return opinion_network(topology, n, seed);
    }
    return generate(topology, n, seed);
}

BuiltExperiment build_game(const ExperimentConfig& cfg,
                           long long seed_override) {
    const std::string kind = cfg.game.value("kind", std::string(""));
    if (kind == "opinion") return build_opinion(cfg.game, seed_override);
    if (kind == "demand_response") return build_demand(cfg.game, seed_override);
    if (kind == "raw") return build_raw(cfg.game, cfg.network, seed_override);
    throw std::runtime_error("game.kind must be opinion, demand_response or raw");
}

FeedbackScheme make_scheme(const json& scheme) {
    require_keys(scheme, "scheme", {"kind", "lambda", "k0", "nu1", "nu2"});
    const std::string kind =
        scheme.value("kind", std::string("picard_banach"));
    if (kind == "picard_banach") return PicardBanach{};
    if (kind == "krasnoselskij") {
        return Krasnoselskij{scheme.value("lambda", 0.5)};
    }
    if (kind == "mann") {
        Mann mann;
        mann.k0 = scheme.value("k0", long{2});
        return mann;
    }
    throw std::runtime_error("unknown scheme kind: " + kind);
}

SplitCounts make_split(const json& scheme, int nu) {
    if (scheme.contains("nu1") || scheme.contains("nu2")) {
        SplitCounts split{scheme.value("nu1", 0), scheme.value("nu2", 0)};
        if (split.nu1 + split.nu2 != nu) {
            throw std::runtime_error("scheme.nu1 + scheme.nu2 must equal nu");
        }
        return split;
    }
    return SplitCounts{0, nu};
}

StoppingRule make_stopping(const json& stopping) {
    require_keys(stopping, "stopping", {"tol", "residual", "max_iter"});
    StoppingRule rule;
    const std::string residual =
        stopping.value("residual", std::string("signal_delta"));
    if (residual == "signal_delta") {
        rule.kind = ResidualKind::SignalDelta;
        rule.tol = stopping.value("tol", 1e-5);
    } else if (residual == "fixed_point_gap") {
        rule.kind = ResidualKind::FixedPointGap;
        rule.tol = stopping.value("tol", 1e-3);
    } else {
        throw std::runtime_error("unknown residual kind: " + residual);
    }
    rule.max_iter = stopping.value("max_iter", long{10000});
    return rule;
}

json to_json(const SpectralReport& report) {
    return json{{"operator_norm", report.operator_norm},
                {"mu", report.mu},
                {"symmetric", report.symmetric},
                {"doubly_stochastic", report.doubly_stochastic},
                {"primitive", report.primitive}};
}

json to_json(const ConditionReport& report) {
    return json{{"all_pd", report.all_pd},
                {"all_psd", report.all_psd},
                {"c_sandwich", report.c_sandwich},
                {"c_pd", report.c_pd},
                {"margin_pd", report.margin_pd},
                {"margin_psd", report.margin_psd},
                {"margin_sandwich", report.margin_sandwich},
                {"margin_c_pd", report.margin_c_pd},
                {"min_eig", report.min_eig}};
}

json to_json(const NashCertificate& cert) {
    return json{{"mode", cert.mode == EquilibriumMode::NA ? "NA" : "MF"},
                {"nu", cert.nu},
                {"per_agent_eps", cert.per_agent_eps},
                {"max_eps", cert.max_eps}};
}

json to_json(const RegularityReport& report) {
    return json{{"contraction_factor", report.contraction_factor},
                {"ne_margin", report.ne_margin},
                {"fne_margin", report.fne_margin},
                {"mon_margin", report.mon_margin},
                {"spc_rho", report.spc_rho},
                {"samples", report.samples}};
}

void save_residuals_csv(const std::string& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "iteration,residual\n";
    for (size_t k = 0; k < result.residual_history.size(); ++k) {
        out << (k + 1) << ',' << result.residual_history[k] << '\n';
    }
}

void save_trajectory_csv(const std::string& path, const RunResult& result,
                         int n) {
    if (!result.trajectory) {
        throw std::runtime_error("run did not record a trajectory");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (const StackedSignal& z : *result.trajectory) {
        for (Eigen::Index k = 0; k < z.size(); ++k) {
            out << z[k] << (k + 1 == z.size() ? '\n' : ',');
        }
    }
    (void)n;
}

void save_strategies_csv(const std::string& path,
                         const std::vector<VectorXd>& strategies) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    for (const VectorXd& x : strategies) {
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            out << x[k] << (k + 1 == x.size() ? '\n' : ',');
        }
    }
}

VectorXd load_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    }
    VectorXd v(values.size());
    for (size_t k = 0; k < values.size(); ++k) v[k] = values[k];
    return v;
}

}  // namespace nag
