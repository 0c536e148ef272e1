// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Each test case covers one criterion and
// prints exactly one PASS/FAIL line; doctest assertions carry the details.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "nag/applications.hpp"
#include "nag/config.hpp"
#include "nag/equilibrium.hpp"
#include "nag/iterations.hpp"

using namespace nag;

namespace {

struct Criterion {
    int id;
    const char* title;
    bool ok = true;
    ~Criterion() {
        std::printf("[ACCEPTANCE] %2d %-52s %s\n", id, title,
                    ok ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
    void require(bool condition) { ok = ok && condition; }
};

GameSpec two_agent_game() {
    MatrixXd swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    CostParams costs{SpdMatrix::identity(1), MatrixXd::Constant(1, 1, 0.5),
                     {1.0, 1.0},
                     {VectorXd::Constant(1, -0.5), VectorXd::Constant(1, -0.5)}};
    std::vector<ConvexSet> sets{ConvexSet::unit_box(1), ConvexSet::unit_box(1)};
    return GameSpec(1, costs, sets, Network(swap), 1);
}

MatrixXd random_spd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    return a * a.transpose() + 0.3 * MatrixXd::Identity(n, n);
}

double spectral_norm(const MatrixXd& m) {
    return Eigen::BDCSVD<MatrixXd>(m).singularValues()(0);
}

}  // namespace

TEST_CASE("criterion 1: derived two-agent game") {
    Criterion c{1, "two-agent fixed point, certificate and grid oracle"};
    GameSpec game = two_agent_game();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 10; ++trial) {
        StackedSignal z0(2);
        z0 << unit(rng), unit(rng);
        RunResult result =
            run(game, PicardBanach{}, {0, 1},
                StoppingRule{1e-7, ResidualKind::SignalDelta, 100}, z0);
        CHECK(result.converged);
        c.require(result.converged);
        c.require(result.iterations <= 100);
        c.require(std::abs(result.final_z[0] - 1.0 / 3.0) <= 1e-6);
        c.require(std::abs(result.final_z[1] - 1.0 / 3.0) <= 1e-6);
        NashCertificate cert =
            certify_nash(game, result.final_strategies, EquilibriumMode::NA);
        CHECK(cert.max_eps <= 1e-6);
        c.require(cert.max_eps <= 1e-6);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    CHECK(seconds < 1.0);
    c.require(seconds < 1.0);

    std::vector<VectorXd> grid = brute_force_nash(game, 1e-4);
    CHECK(std::abs(grid[0][0] - 1.0 / 3.0) <= 2e-4);
    c.require(std::abs(grid[0][0] - 1.0 / 3.0) <= 2e-4);
    c.require(std::abs(grid[1][0] - 1.0 / 3.0) <= 2e-4);
}

TEST_CASE("criterion 2: opinion iteration sweep at desk scale") {
    Criterion c{2, "opinion sweep converges, mild population dependence"};
    const std::vector<int> populations{10, 50, 100};
    const std::vector<TopologyKind> topologies{TopologyKind::CompleteNoSelf,
                                               TopologyKind::DirectedRing,
                                               TopologyKind::SmallWorld};
    for (bool mixed : {false, true}) {
        auto table =
            run_fig3_experiment(populations, topologies, mixed, 20, 2024);
        for (TopologyKind kind : topologies) {
            double lo = 1e100, hi = 0.0;
            for (const OpinionSweepCell& cell : table) {
                if (cell.topology != kind) continue;
                CHECK(cell.converged == cell.runs);
                c.require(cell.converged == cell.runs);
                lo = std::min(lo, cell.mean_iterations);
                hi = std::max(hi, cell.mean_iterations);
            }
            CHECK(hi < 2.0 * lo);
            c.require(hi < 2.0 * lo);
        }
    }
}

TEST_CASE("criterion 3: follower cycle on the directed ring") {
    Criterion c{3, "pure-follower ring cycles; averaging scheme settles"};
    std::vector<AgentKind> kinds(3, AgentKind::Follower);
    OpinionConfig cfg = sample_opinion_config(
        3, 1, kinds, std::nullopt, Topology{TopologyKind::DirectedRing}, 9);
    cfg.x0 = {VectorXd::Constant(1, 0.9), VectorXd::Constant(1, 0.5),
              VectorXd::Constant(1, 0.1)};
    OpinionGame built = build_opinion_game(cfg);

    RunResult pb = run(built.game, PicardBanach{}, {0, 1},
                       StoppingRule{1e-5, ResidualKind::SignalDelta, 500},
                       built.z0);
    CHECK_FALSE(pb.converged);
    c.require(!pb.converged);
    // Period-3 rotation: late residuals repeat with period three.
    const auto& res = pb.residual_history;
    for (size_t k = res.size() - 30; k + 3 < res.size(); ++k) {
        c.require(std::abs(res[k] - res[k + 3]) <= 1e-12);
    }

    RunResult kr = run(built.game, Krasnoselskij{0.5}, {0, 1},
                       StoppingRule{1e-5, ResidualKind::SignalDelta, 10000},
                       built.z0);
    CHECK(kr.converged);
    c.require(kr.converged);
}

TEST_CASE("criterion 4: converged runs are near-exact equilibria") {
    Criterion c{4, "random contractive games: eps <= 100 * tol"};
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double tol = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const int n_agents = 2 + int(rng() % 9);
        const int n = 1 + int(rng() % 3);
        SpdMatrix q{random_spd(n, rng)};
        std::vector<double> qs;
        for (int i = 0; i < n_agents; ++i) qs.push_back(0.5 + 1.5 * unit(rng));
        MatrixXd c_raw(n, n);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c_raw(i, j) = gauss(rng);
        const double min_q = *std::min_element(qs.begin(), qs.end());
        MatrixXd c_mat = c_raw * (0.5 * min_q * q.min_eigenvalue() /
                                  spectral_norm(c_raw));

        std::vector<ConvexSet> sets;
        std::vector<VectorXd> offsets;
        for (int i = 0; i < n_agents; ++i) {
            VectorXd lo(n), hi(n);
            for (int k = 0; k < n; ++k) {
                lo[k] = -1.0 + unit(rng);
                hi[k] = lo[k] + 0.3 + unit(rng);
            }
            sets.push_back(ConvexSet::box(lo, hi));
            VectorXd ci(n);
            for (int k = 0; k < n; ++k) ci[k] = unit(rng) - 0.5;
            offsets.push_back(ci);
        }
        Network net = generate({TopologyKind::CompleteNoSelf}, n_agents, 0);
        GameSpec game(n, CostParams{q, c_mat, qs, offsets}, sets, net, 1);

        c.require(game.condition_matrices().all_pd);
        c.require(game.net().check_no_cycles(1));

        RunResult result =
            run(game, PicardBanach{}, {0, 1},
                StoppingRule{tol, ResidualKind::SignalDelta, 10000},
                sample_stacked(game, rng()));
        CHECK(result.converged);
        c.require(result.converged);
        NashCertificate cert =
            certify_nash(game, result.final_strategies, EquilibriumMode::NA);
        CHECK(cert.max_eps <= 100.0 * tol);
        c.require(cert.max_eps <= 100.0 * tol);
        c.require(cert.max_eps >= -1e-9);
    }
}

TEST_CASE("criterion 5: spectral consensus bound and decay rate") {
    Criterion c{5, "consensus error bounded by sqrt(N) mu^nu, log-linear"};
    for (int n : {8, 16, 32}) {
        for (auto kind : {TopologyKind::UndirectedRing, TopologyKind::SmallWorld}) {
            Network net = generate({kind, 0.3}, n, 505 + n);
            const double mu = net.certify().mu;
            std::vector<double> log_err;
            std::vector<double> nus;
            for (int nu = 1; nu <= 50; ++nu) {
                double err = net.consensus_error(nu);
                double bound = std::sqrt(double(n)) * std::pow(mu, nu);
                CHECK(err <= bound + 1e-9);
                c.require(err <= bound + 1e-9);
                if (err > 1e-12) {
                    log_err.push_back(std::log(err));
                    nus.push_back(double(nu));
                }
            }
            // Least-squares slope of log(err) against nu.
            double mean_x = 0.0, mean_y = 0.0;
            for (size_t k = 0; k < nus.size(); ++k) {
                mean_x += nus[k];
                mean_y += log_err[k];
            }
            mean_x /= double(nus.size());
            mean_y /= double(nus.size());
            double num = 0.0, den = 0.0;
            for (size_t k = 0; k < nus.size(); ++k) {
                num += (nus[k] - mean_x) * (log_err[k] - mean_y);
                den += (nus[k] - mean_x) * (nus[k] - mean_x);
            }
            const double slope = num / den;
            CHECK(slope <= std::log(mu) + 0.05);
            c.require(slope <= std::log(mu) + 0.05);
        }
    }
}

TEST_CASE("criterion 6: demand-response epsilon trends") {
    Criterion c{6, "mean-field eps falls with communications and size"};
    VectorXd sigma0 = synthetic_sigma0(24);
    auto table = run_fig5_experiment({2, 4, 8}, {2, 10, 50}, 5, 5, sigma0, 606);
    auto eps_at = [&](int n_agents, int nu) {
        for (const DemandSweepCell& cell : table) {
            if (cell.n_agents == n_agents && cell.nu == nu) {
                return cell.mean_eps;
            }
        }
        return -1.0;
    };
    for (const DemandSweepCell& cell : table) {
        CHECK(cell.converged == cell.runs);
        c.require(cell.converged == cell.runs);
    }
    // More communications help up to the mean-field floor: the bar is the
    // strict drop from the fewest to the most communications; the middle
    // point may only tie within solver noise.
    for (int n_agents : {10, 20, 40}) {
        CHECK(eps_at(n_agents, 2) > eps_at(n_agents, 50));
        c.require(eps_at(n_agents, 2) > eps_at(n_agents, 50));
        CHECK(eps_at(n_agents, 2) >= eps_at(n_agents, 10));
        c.require(eps_at(n_agents, 2) >= eps_at(n_agents, 10));
    }
    CHECK(eps_at(10, 50) > eps_at(20, 50));
    CHECK(eps_at(20, 50) > eps_at(40, 50));
    c.require(eps_at(10, 50) > eps_at(20, 50));
    c.require(eps_at(20, 50) > eps_at(40, 50));
}

TEST_CASE("criterion 7: distributed nu-bar equals the centralized minimum") {
    Criterion c{7, "nu-bar emulation matches; swap reports no convergence"};
    std::mt19937_64 rng(707);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + int(rng() % 17);
        Network net = generate({TopologyKind::SmallWorld, 0.35}, n, rng());
        c.require(net.certify().primitive);
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            const int nu_bar = net.precompute_nu_bar(eps, 20000);
            int centralized = -1;
            for (int nu = 1; nu <= 20000; ++nu) {
                if (net.consensus_error(nu) < eps) {
                    centralized = nu;
                    break;
                }
            }
            CHECK(nu_bar == centralized);
            c.require(nu_bar == centralized);
        }
    }
    MatrixXd swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    bool threw = false;
    try {
        Network(swap).precompute_nu_bar(1e-3, 500);
    } catch (const NonConvergenceError&) {
        threw = true;
    }
    CHECK(threw);
    c.require(threw);
}

TEST_CASE("criterion 8: sampled operator regularity per convergence row") {
    Criterion c{8, "regularity margins hold; row-1 factor below one"};
    MatrixXd swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    std::vector<ConvexSet> unit{ConvexSet::unit_box(1), ConvexSet::unit_box(1)};
    std::vector<ConvexSet> sym{
        ConvexSet::box(VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0)),
        ConvexSet::box(VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0))};

    // Row 1: M positive definite, ||P|| <= 1 -> contraction.
    RegularityReport r1 = certify_regularity(two_agent_game(), {0, 1}, 1000, 1);
    CHECK(r1.contraction_factor < 1.0);
    c.require(r1.contraction_factor < 1.0);
    c.require(r1.ne_margin >= -1e-9);

    // Row 2: M merely positive semidefinite -> nonexpansive.
    CostParams row2{SpdMatrix::identity(1), MatrixXd::Constant(1, 1, -1.0),
                    {1.0, 1.0}, {VectorXd::Zero(1), VectorXd::Zero(1)}};
    GameSpec g2(1, row2, unit, Network(swap), 1);
    RegularityReport r2 = certify_regularity(g2, {0, 1}, 1000, 2);
    c.require(r2.ne_margin >= -1e-9);

    // Row 3: -qQ <= C < 0, symmetric P, even split -> firmly nonexpansive.
    GameSpec g3(1, row2, unit, Network(swap), 2);
    RegularityReport r3 = certify_regularity(g3, {1, 1}, 1000, 3);
    c.require(r3.fne_margin >= -1e-9);
    c.require(r3.ne_margin >= -1e-9);

    // Row 4: C > 0, symmetric P, even split -> -A monotone, strictly
    // pseudo-contractive.
    CostParams row4{SpdMatrix::identity(1), MatrixXd::Constant(1, 1, 1.0),
                    {1.0, 1.0}, {VectorXd::Zero(1), VectorXd::Zero(1)}};
    GameSpec g4(1, row4, sym, Network(swap), 2);
    RegularityReport r4 = certify_regularity(g4, {1, 1}, 1000, 4);
    c.require(r4.mon_margin >= -1e-9);
    c.require(r4.spc_rho < 1.0);
    CHECK(r4.spc_rho < 1.0);
}

TEST_CASE("criterion 9: hierarchical networks inherit group structure") {
    Criterion c{9, "Kronecker lift: stochasticity, norm, symmetry"};
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 2 + int(rng() % 7);
        const int b = 1 + int(rng() % 5);
        Network p_m = generate({TopologyKind::SmallWorld, 0.4}, m, rng());
        SpectralReport rm = p_m.certify();
        Network p = hierarchical(p_m, b);
        SpectralReport r = p.certify();
        c.require(r.doubly_stochastic);
        c.require(r.symmetric == rm.symmetric);
        c.require(r.primitive == rm.primitive);
        c.require(std::abs(r.operator_norm - rm.operator_norm) <= 1e-9);
    }
    // A periodic group matrix stays periodic after the lift.
    MatrixXd swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    SpectralReport lifted = hierarchical(Network(swap), 2).certify();
    c.require(!lifted.primitive);
    CHECK_FALSE(lifted.primitive);
}

TEST_CASE("criterion 10: weighted projections against the grid oracle") {
    Criterion c{10, "projection oracle, idempotence, firm nonexpansiveness"};
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + int(rng() % 3);
        const double res = n == 1 ? 1e-3 : (n == 2 ? 0.02 : 0.05);
        const bool scalar_q = (rng() % 2) == 0;
        SpdMatrix q = scalar_q
                          ? SpdMatrix::scaled_identity(n, 0.5 + 2.0 * unit(rng))
                          : SpdMatrix{random_spd(n, rng)};

        VectorXd lo(n), hi(n);
        const double width = n == 1 ? 2.0 : (n == 2 ? 1.4 : 1.0);
        for (int k = 0; k < n; ++k) {
            lo[k] = -1.0 + unit(rng);
            hi[k] = lo[k] + width;
        }
        std::vector<PrimitiveSet> prims{Box{lo, hi}};
        const VectorXd center = 0.5 * (lo + hi);
        if (unit(rng) < 0.5) {
            VectorXd a(n);
            for (int k = 0; k < n; ++k) a[k] = gauss(rng);
            if (a.norm() < 0.1) a.setOnes();
            prims.push_back(Halfspace{a, a.dot(center) + 0.1 * a.norm()});
        }
        if (scalar_q && unit(rng) < 0.4) {
            prims.push_back(Ball{center, 0.75 * width});
        }
        ConvexSet set(prims, true);

        VectorXd y(n), y2(n);
        for (int k = 0; k < n; ++k) {
            y[k] = center[k] + 2.0 * gauss(rng);
            y2[k] = center[k] + 2.0 * gauss(rng);
        }
        VectorXd px = set.project(q, y);
        VectorXd px2 = set.project(q, y2);

        c.require(set.contains(px, 1e-7));
        c.require((set.project(q, px) - px).norm() <= 1e-6);
        const double lhs = q.quad(px - px2);
        const double rhs = (y - y2).dot(q.matrix() * (px - px2));
        c.require(lhs <= rhs + 1e-7);

        // Dense grid oracle over the bounding box.
        double best = std::numeric_limits<double>::infinity();
        std::vector<long> counts(n);
        long total = 1;
        for (int k = 0; k < n; ++k) {
            counts[k] = long((hi[k] - lo[k]) / res) + 1;
            total *= counts[k];
        }
        VectorXd p(n);
        for (long flat = 0; flat < total; ++flat) {
            long rem = flat;
            for (int k = 0; k < n; ++k) {
                p[k] = lo[k] + double(rem % counts[k]) * res;
                rem /= counts[k];
            }
            if (!set.contains(p, 1e-12)) continue;
            best = std::min(best, q.norm(p - y));
        }
        const double d = q.norm(px - y);
        CHECK(d <= best + 1e-7);
        c.require(d <= best + 1e-7);
        const double slack =
            5.0 * res * std::sqrt(double(n) * q.max_eigenvalue()) + 1e-9;
        CHECK(best - d <= slack);
        c.require(best - d <= slack);
    }
}
