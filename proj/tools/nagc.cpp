// SPDX-License-Identifier: Apache-2.0
//
// nagc — network aggregative game console.
//
// Subcommands:
//   run      one fixed-point run: residual/strategy CSVs + certificate JSON
//   certify  admissibility analysis of all scheme rows for the configured game
//   sweep    replication experiment tables (fig3 / fig5 presets)
//   netgen   generate a network and write it as CSV
//   nubar    distributed precomputation of the communication count

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nag/applications.hpp"
#include "nag/config.hpp"
#include "nag/equilibrium.hpp"
#include "nag/iterations.hpp"

namespace {

using namespace nag;

std::string topology_name(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::CompleteNoSelf: return "complete_no_self";
        case TopologyKind::DirectedRing: return "directed_ring";
        case TopologyKind::UndirectedRing: return "undirected_ring";
        case TopologyKind::SmallWorld: return "small_world";
    }
    return "?";
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

struct RowVerdict {
    std::string name;
    bool cost_ok = false;
    bool net_ok = false;
    double cost_margin = 0.0;
    std::string net_requirement;
};

std::vector<RowVerdict> scheme_rows(const GameSpec& game) {
    const ConditionReport cond = game.condition_matrices();
    const SpectralReport net = game.net().certify();
    const bool norm_ok = net.operator_norm <= 1.0 + 1e-9;
    std::vector<RowVerdict> rows;
    rows.push_back({"picard_banach (0,nu)", cond.all_pd, norm_ok,
                    cond.margin_pd, "||P|| <= 1"});
    rows.push_back({"krasnoselskij (0,nu)", cond.all_psd, norm_ok,
                    cond.margin_psd, "||P|| <= 1"});
    rows.push_back({"picard_banach (nu/2,nu/2)", cond.c_sandwich,
                    net.symmetric, cond.margin_sandwich, "P symmetric"});
    rows.push_back({"mann (nu/2,nu/2)", cond.c_pd, net.symmetric,
                    cond.margin_c_pd, "P symmetric"});
    return rows;
}

// Does the configured (scheme, split) pair sit in an admissible row?
bool scheme_admissible(const GameSpec& game, const FeedbackScheme& scheme,
                       SplitCounts split, std::string& why) {
    const std::vector<RowVerdict> rows = scheme_rows(game);
    const bool front_split = split.nu1 == 0;
    const bool even_split = split.nu1 == split.nu2;
    int row = -1;
    if (std::holds_alternative<PicardBanach>(scheme)) {
        row = front_split ? 0 : (even_split ? 2 : -1);
    } else if (std::holds_alternative<Krasnoselskij>(scheme)) {
        row = front_split ? 1 : -1;
    } else {
        row = even_split ? 3 : -1;
    }
    if (row < 0) {
        why = "no convergence row covers this scheme/split combination";
        return false;
    }
    const RowVerdict& v = rows[row];
    if (!v.cost_ok) {
        why = v.name + ": cost condition fails (margin " +
              std::to_string(v.cost_margin) + ")";
        return false;
    }
    if (!v.net_ok) {
        why = v.name + ": network condition fails (" + v.net_requirement + ")";
        return false;
    }
    return true;
}

std::filesystem::path output_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir =
        cfg.output.value("dir", std::string("nagc_out"));
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_run(const std::string& config_path, long long seed, int jobs,
            bool force, bool trajectory) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
    ExperimentConfig cfg = load_config(config_path);
    BuiltExperiment built = build_game(cfg, seed);
    FeedbackScheme scheme = make_scheme(cfg.scheme);
    SplitCounts split = make_split(cfg.scheme, built.game.nu());
    StoppingRule stop = make_stopping(cfg.stopping);

    // Admissibility is advisory: an uncertified scheme may still be run
    // (non-convergence is then a legitimate outcome, reported via exit 2).
    std::string why;
    if (!force && !scheme_admissible(built.game, scheme, split, why)) {
        std::cerr << "nagc run: warning: scheme not certified for this game: "
                  << why << '\n';
    }

    RunResult result =
        run(built.game, scheme, split, stop, built.z0, trajectory);
    NashCertificate cert =
        certify_nash(built.game, result.final_strategies, EquilibriumMode::NA);

    const std::filesystem::path dir = output_dir(cfg);
    save_residuals_csv((dir / "residuals.csv").string(), result);
    save_strategies_csv((dir / "strategies.csv").string(),
                        result.final_strategies);
    if (trajectory) {
        save_trajectory_csv((dir / "trajectory.csv").string(), result,
                            built.game.n());
    }
    json certificate = to_json(cert);
    certificate["iterations"] = result.iterations;
    certificate["converged"] = result.converged;
    std::ofstream((dir / "certificate.json").string())
        << certificate.dump(2) << '\n';
    json manifest{{"config", config_path},
                  {"seed", seed},
                  {"iterations", result.iterations},
                  {"converged", result.converged},
                  {"timestamp", iso_timestamp()}};
    std::ofstream((dir / "manifest.json").string()) << manifest.dump(2) << '\n';

    std::cout << (result.converged ? "converged" : "did not converge")
              << " after " << result.iterations
              << " iterations; max_eps = " << cert.max_eps << '\n';
    return result.converged ? 0 : 2;
}

int cmd_certify(const std::string& config_path, long long seed) {
    ExperimentConfig cfg = load_config(config_path);
    BuiltExperiment built = build_game(cfg, seed);
    SpectralReport net = built.game.net().certify();
    std::cout << "network: ||P|| = " << net.operator_norm
              << ", mu = " << net.mu << ", symmetric = " << net.symmetric
              << ", doubly_stochastic = " << net.doubly_stochastic
              << ", primitive = " << net.primitive << '\n';
    for (const RowVerdict& row : scheme_rows(built.game)) {
        std::cout << row.name << ": cost "
                  << (row.cost_ok ? "ok" : "FAIL") << " (margin "
                  << row.cost_margin << "), network "
                  << (row.net_ok ? "ok" : "FAIL") << " (" << row.net_requirement
                  << ") -> " << (row.cost_ok && row.net_ok ? "admissible"
                                                           : "inadmissible")
                  << '\n';
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, long long seed, int jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
    ExperimentConfig cfg = load_config(config_path);
    const std::string preset = cfg.sweep.value("preset", std::string(""));
    const std::uint64_t base_seed =
        seed >= 0 ? std::uint64_t(seed) : cfg.sweep.value("seed", 0ULL);
    const int n_seeds = cfg.sweep.value("seeds", 20);
    const std::filesystem::path dir = output_dir(cfg);
    std::ofstream out((dir / "sweep.csv").string());
    out.precision(12);

    if (preset == "fig3") {
        std::vector<int> populations =
            cfg.sweep.value("populations", std::vector<int>{10, 50, 100});
        std::vector<TopologyKind> topologies{TopologyKind::CompleteNoSelf,
                                             TopologyKind::UndirectedRing,
                                             TopologyKind::SmallWorld};
        const bool mixed = cfg.sweep.value("mixed", false);
        out << "N,topology,mixed,runs,converged,mean_iterations,q05,q95\n";
        for (const OpinionSweepCell& cell : run_fig3_experiment(
                 populations, topologies, mixed, n_seeds, base_seed)) {
            out << cell.n_agents << ',' << topology_name(cell.topology) << ','
                << cell.mixed << ',' << cell.runs << ',' << cell.converged
                << ',' << cell.mean_iterations << ',' << cell.q05_iterations
                << ',' << cell.q95_iterations << '\n';
        }
    } else if (preset == "fig5") {
        std::vector<int> b_list =
            cfg.sweep.value("b_list", std::vector<int>{2, 4, 8});
        std::vector<int> nu_list =
            cfg.sweep.value("nu_list", std::vector<int>{2, 10, 50});
        const int m = cfg.sweep.value("m", 5);
        const int horizon = cfg.sweep.value("horizon", 24);
        VectorXd sigma0 = cfg.sweep.contains("sigma0_csv")
                              ? load_vector_csv(cfg.sweep.at("sigma0_csv"))
                              : synthetic_sigma0(horizon);
        out << "N,nu,runs,converged,mean_iterations,mean_eps,"
               "mean_central_eps\n";
        for (const DemandSweepCell& cell : run_fig5_experiment(
                 b_list, nu_list, m, n_seeds, sigma0, base_seed)) {
            out << cell.n_agents << ',' << cell.nu << ',' << cell.runs << ','
                << cell.converged << ',' << cell.mean_iterations << ','
                << cell.mean_eps << ',' << cell.mean_central_eps << '\n';
        }
    } else {
        std::cerr << "nagc sweep: sweep.preset must be fig3 or fig5\n";
        return 1;
    }
    json manifest{{"config", config_path},
                  {"preset", preset},
                  {"seed", base_seed},
                  {"seeds", n_seeds},
                  {"timestamp", iso_timestamp()}};
    std::ofstream((dir / "manifest.json").string()) << manifest.dump(2) << '\n';
    std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
    return 0;
}

int cmd_netgen(const std::string& topology, int n, double p_shortcut,
               bool zero_diagonal, long long seed, const std::string& out) {
    Topology spec;
    if (topology == "complete_no_self") spec.kind = TopologyKind::CompleteNoSelf;
    else if (topology == "directed_ring") spec.kind = TopologyKind::DirectedRing;
    else if (topology == "undirected_ring") spec.kind = TopologyKind::UndirectedRing;
    else if (topology == "small_world") spec.kind = TopologyKind::SmallWorld;
    else {
        std::cerr << "nagc netgen: unknown topology " << topology << '\n';
        return 1;
    }
    spec.p_shortcut = p_shortcut;
    const std::uint64_t s = seed >= 0 ? std::uint64_t(seed) : 0;
    Network net =
        zero_diagonal ? opinion_network(spec, n, s) : generate(spec, n, s);
    save_network_csv(net, out);
    std::cout << "wrote " << out << '\n';
    return 0;
}

int cmd_nubar(const std::string& network_path, double eps, int max_nu) {
    Network net = load_network_csv(network_path);
    try {
        std::cout << net.precompute_nu_bar(eps, max_nu) << '\n';
        return 0;
    } catch (const NonConvergenceError&) {
        std::cout << "NoConvergence\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"network aggregative game console"};
    app.require_subcommand(1);

    std::string config_path, network_path, topology = "complete_no_self";
    std::string netgen_out = "network.csv";
    long long seed = -1;
    int jobs = 0, n = 10, max_nu = 10000;
    double p_shortcut = 0.3, eps = 1e-3;
    bool force = false, trajectory = false, zero_diagonal = false;

    CLI::App* run_cmd = app.add_subcommand("run", "execute one fixed-point run");
    run_cmd->add_option("--config", config_path)->required();
    run_cmd->add_option("--seed", seed);
    run_cmd->add_option("--jobs", jobs);
    run_cmd->add_flag("--force", force);
    run_cmd->add_flag("--trajectory", trajectory);

    CLI::App* certify_cmd =
        app.add_subcommand("certify", "scheme admissibility analysis");
    certify_cmd->add_option("--config", config_path)->required();
    certify_cmd->add_option("--seed", seed);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "experiment table");
    sweep_cmd->add_option("--config", config_path)->required();
    sweep_cmd->add_option("--seed", seed);
    sweep_cmd->add_option("--jobs", jobs);

    CLI::App* netgen_cmd = app.add_subcommand("netgen", "generate a network CSV");
    netgen_cmd->add_option("--topology", topology);
    netgen_cmd->add_option("--n", n);
    netgen_cmd->add_option("--p-shortcut", p_shortcut);
    netgen_cmd->add_flag("--zero-diagonal", zero_diagonal);
    netgen_cmd->add_option("--seed", seed);
    netgen_cmd->add_option("--out", netgen_out);

    CLI::App* nubar_cmd =
        app.add_subcommand("nubar", "distributed communication-count search");
    nubar_cmd->add_option("--network", network_path)->required();
    nubar_cmd->add_option("--eps", eps);
    nubar_cmd->add_option("--max-nu", max_nu);

    CLI11_PARSE(app, argc, argv);
    try {
        if (run_cmd->parsed()) {
            return cmd_run(config_path, seed, jobs, force, trajectory);
        }
        if (certify_cmd->parsed()) return cmd_certify(config_path, seed);
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, seed, jobs);
        if (netgen_cmd->parsed()) {
            return cmd_netgen(topology, n, p_shortcut, zero_diagonal, seed,
                              netgen_out);
        }
        if (nubar_cmd->parsed()) return cmd_nubar(network_path, eps, max_nu);
    } catch (const std::exception& e) {
        std::cerr << "nagc: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
