// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "nag/config.hpp"

using namespace nag;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = "cli_test_out";

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

int run_nagc(const std::string& args) {
    const std::string cmd = std::string(NAGC_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

// The derived two-agent instance as a raw config.
json derived_config(const fs::path& dir) {
    return json{
        {"game",
         {{"kind", "raw"},
          {"n", 1},
          {"nu", 1},
          {"Q", {{1.0}}},
          {"C", {{0.5}}},
          {"q", {1.0, 1.0}},
          {"c", {{-0.5}, {-0.5}}},
          {"sets",
           {{{"bounded", true},
             {"primitives", {{{"type", "box"}, {"lo", {0.0}}, {"hi", {1.0}}}}}},
            {{"bounded", true},
             {"primitives",
              {{{"type", "box"}, {"lo", {0.0}}, {"hi", {1.0}}}}}}}},
          {"z0", {0.9, 0.05}}}},
        {"network", {{"source", "csv"}, {"path", (dir / "swap.csv").string()}}},
        {"scheme", {{"kind", "picard_banach"}}},
        {"stopping", {{"tol", 1e-8}, {"residual", "signal_delta"}}},
        {"output", {{"dir", (dir / "run").string()}}}};
}

}  // namespace

TEST_CASE("config loading and section parsing") {
    fs::create_directories(kDir);
    write_file(kDir / "swap.csv", "0,1\n1,0\n");
    write_file(kDir / "derived.json", derived_config(kDir).dump(2));

    ExperimentConfig cfg = load_config((kDir / "derived.json").string());
    BuiltExperiment built = build_game(cfg, -1);
    CHECK(built.game.population() == 2);
    CHECK(built.game.n() == 1);
    CHECK(built.z0[0] == doctest::Approx(0.9));

    FeedbackScheme scheme = make_scheme(cfg.scheme);
    CHECK(std::holds_alternative<PicardBanach>(scheme));
    SplitCounts split = make_split(cfg.scheme, built.game.nu());
    CHECK(split.nu1 == 0);
    CHECK(split.nu2 == 1);
    StoppingRule stop = make_stopping(cfg.stopping);
    CHECK(stop.tol == doctest::Approx(1e-8));
    CHECK(stop.kind == ResidualKind::SignalDelta);

    write_file(kDir / "typo.json", R"({"gmae": {}})");
    CHECK_THROWS(load_config((kDir / "typo.json").string()));
    CHECK_THROWS(make_scheme(json{{"kind", "unknown"}}));
    CHECK_THROWS(make_stopping(json{{"residual", "unknown"}}));
}

TEST_CASE("nagc run on the derived game converges with a tight certificate") {
    fs::create_directories(kDir);
    write_file(kDir / "swap.csv", "0,1\n1,0\n");
    write_file(kDir / "derived.json", derived_config(kDir).dump(2));

    int code = run_nagc("run --config " + (kDir / "derived.json").string());
    CHECK(code == 0);
    std::ifstream cert_in(kDir / "run" / "certificate.json");
    REQUIRE(cert_in.good());
    json cert = json::parse(cert_in);
    CHECK(cert.at("converged").get<bool>());
    CHECK(cert.at("max_eps").get<double>() <= 1e-6);
    CHECK(fs::exists(kDir / "run" / "residuals.csv"));
    CHECK(fs::exists(kDir / "run" / "manifest.json"));
}

TEST_CASE("nagc run: followers on a directed ring do not converge") {
    fs::create_directories(kDir);
    json cfg{{"game",
              {{"kind", "opinion"},
               {"n_agents", 3},
               {"n", 1},
               {"mixture", "all_followers"},
               {"topology", "directed_ring"},
               {"seed", 4}}},
             {"scheme", {{"kind", "picard_banach"}}},
             {"stopping", {{"tol", 1e-5}, {"max_iter", 500}}},
             {"output", {{"dir", (kDir / "ring").string()}}}};
    write_file(kDir / "ring.json", cfg.dump(2));
    CHECK(run_nagc("run --config " + (kDir / "ring.json").string()) == 2);

    // The scheme with memory settles.
    cfg["scheme"]["kind"] = "krasnoselskij";
    cfg["stopping"]["max_iter"] = 10000;
    write_file(kDir / "ring_k.json", cfg.dump(2));
    CHECK(run_nagc("run --config " + (kDir / "ring_k.json").string()) == 0);
}

TEST_CASE("nagc error handling") {
    fs::create_directories(kDir);
    write_file(kDir / "broken.json", "{ not json");
    CHECK(run_nagc("run --config " + (kDir / "broken.json").string()) == 1);
    CHECK(run_nagc("run --config " + (kDir / "missing.json").string()) == 1);
}

TEST_CASE("nagc netgen round trip and nubar") {
    fs::create_directories(kDir);
    const std::string net_path = (kDir / "gen.csv").string();
    CHECK(run_nagc("netgen --topology small_world --n 12 --seed 3 --out " +
                   net_path) == 0);
    Network net = load_network_csv(net_path);
    CHECK(net.size() == 12);
    CHECK(net.certify().doubly_stochastic);

    write_file(kDir / "avg.csv", "0.25,0.25,0.25,0.25\n0.25,0.25,0.25,0.25\n"
                                 "0.25,0.25,0.25,0.25\n0.25,0.25,0.25,0.25\n");
    CHECK(run_nagc("nubar --network " + (kDir / "avg.csv").string() +
                   " --eps 1e-3") == 0);
    write_file(kDir / "swap.csv", "0,1\n1,0\n");
    CHECK(run_nagc("nubar --network " + (kDir / "swap.csv").string() +
                   " --eps 1e-3 --max-nu 300") == 2);
}

TEST_CASE("nagc certify prints row analysis") {
    fs::create_directories(kDir);
    write_file(kDir / "swap.csv", "0,1\n1,0\n");
    write_file(kDir / "derived.json", derived_config(kDir).dump(2));
    CHECK(run_nagc("certify --config " + (kDir / "derived.json").string()) == 0);
}

TEST_CASE("nagc sweep fig3 writes a tidy table") {
    fs::create_directories(kDir);
    json cfg{{"sweep",
              {{"preset", "fig3"},
               {"populations", {6}},
               {"seeds", 2},
               {"mixed", false}}},
             {"output", {{"dir", (kDir / "sweep").string()}}}};
    write_file(kDir / "sweep.json", cfg.dump(2));
    CHECK(run_nagc("sweep --config " + (kDir / "sweep.json").string()) == 0);
    std::ifstream in(kDir / "sweep" / "sweep.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "N,topology,mixed,runs,converged,mean_iterations,q05,q95");
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);  // one population, three topologies
}
