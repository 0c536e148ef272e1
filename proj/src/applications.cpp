// SPDX-License-Identifier: Apache-2.0
#include "nag/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nag {

// ---------------------------------------------------------------------------
// Opinion dynamics
// ---------------------------------------------------------------------------

Network opinion_network(const Topology& topology, int n, std::uint64_t seed) {
    switch (topology.kind) {
        case TopologyKind::CompleteNoSelf:
        case TopologyKind::DirectedRing:
            return generate(topology, n, seed);  // zero diagonal already
        case TopologyKind::UndirectedRing: {
            MatrixXd p = MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) {
                p(i, (i + 1) % n) += 0.5;
                p(i, (i + n - 1) % n) += 0.5;
            }
            return Network(p);
        }
        case TopologyKind::SmallWorld:
            return generate_small_world_zero_diag(n, topology.p_shortcut, seed);
    }
    throw std::invalid_argument("opinion_network: unknown topology");
}

OpinionGame build_opinion_game(const OpinionConfig& cfg) {
    const int n_agents = cfg.n_agents;
    const int n = cfg.n;
    if (n_agents < 2 || n < 1) {
        throw std::invalid_argument("build_opinion_game: need N >= 2, n >= 1");
    }
    if (static_cast<int>(cfg.theta.size()) != n_agents ||
        static_cast<int>(cfg.x0.size()) != n_agents ||
        static_cast<int>(cfg.kinds.size()) != n_agents) {
        throw DimensionError("build_opinion_game: per-agent lists mismatch N");
    }
    if (cfg.delta) {
        if (n < 2) {
            throw std::invalid_argument(
                "build_opinion_game: topic coupling needs n >= 2");
        }
        if (*cfg.delta <= 0.0) {
            throw std::invalid_argument("build_opinion_game: delta must be > 0");
        }
    }

    std::vector<ConvexSet> sets;
    std::vector<double> q(n_agents);
    std::vector<VectorXd> c(n_agents);
    StackedSignal z0(n_agents * n);
    const SpdMatrix euclid = SpdMatrix::identity(n);

    for (int i = 0; i < n_agents; ++i) {
        const double theta = cfg.theta[i];
        if (theta < 0.0) {
            throw std::invalid_argument("build_opinion_game: theta_i < 0");
        }
        if (cfg.kinds[i] == AgentKind::Follower && theta != 0.0) {
            throw std::invalid_argument(
                "build_opinion_game: a follower must have theta_i = 0");
        }
        if (cfg.x0[i].size() != n) {
            throw DimensionError("build_opinion_game: x0 dimension mismatch");
        }

        VectorXd x0 = cfg.x0[i];
        if (cfg.kinds[i] == AgentKind::FullyStubborn) {
            sets.push_back(ConvexSet::singleton(x0));
        } else {
            std::vector<PrimitiveSet> prims;
            prims.push_back(Box{VectorXd::Zero(n), VectorXd::Ones(n)});
            if (cfg.delta) {
                VectorXd a = VectorXd::Zero(n);
                a[0] = 1.0;
                a[1] = -1.0;
                const double bound = std::sqrt(*cfg.delta);
                prims.push_back(Halfspace{a, bound});
                prims.push_back(Halfspace{-a, bound});
            }
            sets.emplace_back(std::move(prims), /*bounded=*/true);
            x0 = sets.back().project(euclid, x0);  // feasible starting opinion
        }
        q[i] = 1.0 + theta;
        c[i] = -theta * x0;
        z0.segment(i * n, n) = x0;
    }

    CostParams costs{SpdMatrix::identity(n), -MatrixXd::Identity(n, n),
                     std::move(q), std::move(c)};
    Network net = opinion_network(cfg.topology, n_agents, cfg.seed);
    GameSpec game(n, std::move(costs), std::move(sets), std::move(net), 1);
    return OpinionGame{std::move(game), std::move(z0)};
}

OpinionConfig sample_opinion_config(int n_agents, int n,
                                    const std::vector<AgentKind>& kinds,
                                    std::optional<double> delta,
                                    Topology topology, std::uint64_t seed) {
    if (static_cast<int>(kinds.size()) != n_agents) {
        throw DimensionError("sample_opinion_config: kind list mismatch N");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OpinionConfig cfg;
    cfg.n_agents = n_agents;
    cfg.n = n;
    cfg.kinds = kinds;
    cfg.delta = delta;
    cfg.topology = topology;
    cfg.seed = seed;
    for (int i = 0; i < n_agents; ++i) {
        cfg.theta.push_back(kinds[i] == AgentKind::Follower ? 0.0 : 1.0);
        VectorXd x0(n);
        for (int t = 0; t < n; ++t) x0[t] = unit(rng);
        cfg.x0.push_back(std::move(x0));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Demand response
// ---------------------------------------------------------------------------

DemandResponseGame build_demand_response_game(const DemandResponseConfig& cfg) {
    const int n_agents = cfg.n_agents;
    const int t_len = cfg.horizon;
    if (n_agents < 1 || t_len < 1) {
        throw std::invalid_argument("build_demand_response_game: empty instance");
    }
    if (n_agents != cfg.m * cfg.b) {
        throw std::invalid_argument("build_demand_response_game: N != M*B");
    }
    if (cfg.lambda_price <= 0.0) {
        throw std::invalid_argument("build_demand_response_game: lambda <= 0");
    }
    if (static_cast<int>(cfg.rho.size()) != n_agents ||
        static_cast<int>(cfg.uhat.size()) != n_agents ||
        static_cast<int>(cfg.windows.size()) != n_agents ||
        cfg.p0.size() != t_len) {
        throw DimensionError("build_demand_response_game: field size mismatch");
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<ConvexSet> sets;
    std::vector<double> q(n_agents);
    std::vector<VectorXd> c(n_agents);
    StackedSignal z0(n_agents * t_len);

    for (int i = 0; i < n_agents; ++i) {
        if (cfg.rho[i] <= 0.0) {
            throw std::invalid_argument("build_demand_response_game: rho_i <= 0");
        }
        if (cfg.uhat[i].size() != t_len) {
            throw DimensionError("build_demand_response_game: uhat length");
        }
        auto [start, end] = cfg.windows[i];
        if (start < 1 || end > t_len || start > end) {
            throw std::invalid_argument("build_demand_response_game: empty window");
        }
        // Nonnegative curtailment inside the window, zero outside, same total
        // energy as the nominal profile.
        VectorXd lo = VectorXd::Zero(t_len), hi = VectorXd::Zero(t_len);
        for (int t = start - 1; t < end; ++t) hi[t] = inf;
        MatrixXd ones_row = MatrixXd::Ones(1, t_len);
        VectorXd total(1);
        total[0] = cfg.uhat[i].sum();
        std::vector<PrimitiveSet> prims;
        prims.push_back(Box{std::move(lo), std::move(hi)});
        prims.push_back(AffineSubspace{std::move(ones_row), std::move(total)});
        sets.emplace_back(std::move(prims), /*bounded=*/false);

        q[i] = cfg.rho[i];
        c[i] = 0.5 * cfg.p0 - cfg.rho[i] * cfg.uhat[i];
        z0.segment(i * t_len, t_len) = cfg.uhat[i];
    }

    CostParams costs{SpdMatrix::identity(t_len),
                     0.5 * cfg.lambda_price * MatrixXd::Identity(t_len, t_len),
                     std::move(q), std::move(c)};
    Network group_net =
        cfg.m == 1 ? Network(MatrixXd::Ones(1, 1))
                   : generate({TopologyKind::UndirectedRing}, cfg.m, cfg.seed);
    Network net = hierarchical(group_net, cfg.b);
    GameSpec game(t_len, std::move(costs), std::move(sets), std::move(net),
                  cfg.nu);
    return DemandResponseGame{std::move(game), std::move(z0)};
}

VectorXd synthetic_sigma0(int horizon) {
    // Synthetic stand-in baseline: a smooth day/night curve with its minimum
    // at the start of the horizon (night) and peak mid-afternoon, scaled to
    // [0.1, 1]. Not measured consumption data.
    const double pi = std::acos(-1.0);
    VectorXd sigma0(horizon);
    for (int t = 0; t < horizon; ++t) {
        sigma0[t] =
            0.55 - 0.45 * std::cos(2.0 * pi * (t + 0.5) / double(horizon));
    }
    return sigma0;
}

DemandResponseConfig sample_demand_response(int m, int b, int horizon,
                                            const VectorXd& sigma0,
                                            std::uint64_t seed) {
    if (sigma0.size() != horizon) {
        throw DimensionError("sample_demand_response: sigma0 length mismatch");
    }
    if (horizon < 2) {
        throw std::invalid_argument("sample_demand_response: horizon < 2");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DemandResponseConfig cfg;
    cfg.n_agents = m * b;
    cfg.horizon = horizon;
    cfg.lambda_price = 2.0;
    cfg.p0 = cfg.lambda_price * sigma0;
    cfg.m = m;
    cfg.b = b;
    cfg.seed = seed;
    for (int i = 0; i < cfg.n_agents; ++i) {
        cfg.rho.push_back(0.1);
        VectorXd uhat(horizon);
        for (int t = 0; t < horizon; ++t) uhat[t] = unit(rng);
        cfg.uhat.push_back(std::move(uhat));
        std::uniform_int_distribution<int> start_pick(1, horizon - 1);
        int start = start_pick(rng);
        std::uniform_int_distribution<int> end_pick(start + 1, horizon);
        cfg.windows.emplace_back(start, end_pick(rng));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Replication experiments
// ---------------------------------------------------------------------------

namespace {

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c) {
    std::uint64_t h = base;
    for (std::uint64_t v : {a, b, c}) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double idx = p * double(values.size() - 1);
    auto lo = static_cast<size_t>(std::floor(idx));
    auto hi = static_cast<size_t>(std::ceil(idx));
    double frac = idx - double(lo);
    return (1.0 - frac) * values[lo] + frac * values[hi];
}

}  // namespace

std::vector<OpinionSweepCell> run_fig3_experiment(
    const std::vector<int>& populations,
    const std::vector<TopologyKind>& topologies, bool mixed, int n_seeds,
    std::uint64_t base_seed) {
    std::vector<OpinionSweepCell> table;
    for (int n_agents : populations) {
        for (TopologyKind kind : topologies) {
            OpinionSweepCell cell;
            cell.n_agents = n_agents;
            cell.topology = kind;
            cell.mixed = mixed;
            std::vector<double> iteration_counts;
            for (int s = 0; s < n_seeds; ++s) {
                std::vector<AgentKind> kinds(n_agents,
                                             AgentKind::PartiallyStubborn);
                if (mixed) {
                    for (int i = 0; i < n_agents; i += 2) {
                        kinds[i] = AgentKind::Follower;
                    }
                }
                OpinionConfig cfg = sample_opinion_config(
                    n_agents, 2, kinds, 0.3, Topology{kind},
                    cell_seed(base_seed, n_agents, static_cast<int>(kind), s));
                OpinionGame built = build_opinion_game(cfg);
                FeedbackScheme scheme =
                    mixed ? FeedbackScheme(Krasnoselskij{0.5})
                          : FeedbackScheme(PicardBanach{});
                RunResult result =
                    run(built.game, scheme, SplitCounts{0, 1},
                        StoppingRule{1e-5, ResidualKind::SignalDelta, 10000},
                        built.z0);
                ++cell.runs;
                if (result.converged) {
                    ++cell.converged;
                    iteration_counts.push_back(double(result.iterations));
                }
            }
            if (!iteration_counts.empty()) {
                double sum = 0.0;
                for (double v : iteration_counts) sum += v;
                cell.mean_iterations = sum / double(iteration_counts.size());
                cell.q05_iterations = quantile(iteration_counts, 0.05);
                cell.q95_iterations = quantile(iteration_counts, 0.95);
            }
            table.push_back(cell);
        }
    }
    return table;
}

std::vector<DemandSweepCell> run_fig5_experiment(
    const std::vector<int>& b_list, const std::vector<int>& nu_list, int m,
    int n_seeds, const VectorXd& sigma0, std::uint64_t base_seed) {
    std::vector<DemandSweepCell> table;
    for (int b : b_list) {
        for (int nu : nu_list) {
            if (nu < 2 || nu % 2 != 0) {
                throw std::invalid_argument(
                    "run_fig5_experiment: nu must be even and >= 2");
            }
            DemandSweepCell cell;
            cell.n_agents = m * b;
            cell.nu = nu;
            double sum_iters = 0.0, sum_eps = 0.0, sum_central = 0.0;
            for (int s = 0; s < n_seeds; ++s) {
                DemandResponseConfig cfg = sample_demand_response(
                    m, b, static_cast<int>(sigma0.size()), sigma0,
                    cell_seed(base_seed, b, 0, s));
                cfg.nu = nu;
                DemandResponseGame built = build_demand_response_game(cfg);
                const SplitCounts split{nu / 2, nu / 2};
                const StoppingRule stop{1e-3, ResidualKind::FixedPointGap,
                                        10000};
                RunResult result =
                    run(built.game, Mann{}, split, stop, built.z0);
                ++cell.runs;
                if (result.converged) ++cell.converged;
                sum_iters += double(result.iterations);
                sum_eps += certify_nash(built.game, result.final_strategies,
                                        EquilibriumMode::MF)
                               .max_eps;

                GameSpec central = with_averaging_network(built.game);
                RunResult central_run =
                    run(central, Mann{}, split, stop, built.z0);
                sum_central +=
                    certify_nash(central, central_run.final_strategies,
                                 EquilibriumMode::MF)
                        .max_eps;
            }
            cell.mean_iterations = sum_iters / double(n_seeds);
            cell.mean_eps = sum_eps / double(n_seeds);
            cell.mean_central_eps = sum_central / double(n_seeds);
            table.push_back(cell);
        }
    }
    return table;
}

}  // namespace nag
