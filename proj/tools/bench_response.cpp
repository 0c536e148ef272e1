// SPDX-License-Identifier: Apache-2.0
//
// Benchmark of the per-agent best-response kernel: serial reference loop vs
// the OpenMP-parallel version, on a stubborn opinion population with the
// topic-coupling constraint active (so every response runs Dykstra).

#include <chrono>
#include <iostream>

#include "nag/applications.hpp"
#include "nag/iterations.hpp"

int main(int argc, char** argv) {
    using namespace nag;
    const int n_agents = argc > 1 ? std::atoi(argv[1]) : 400;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;

    std::vector<AgentKind> kinds(n_agents, AgentKind::PartiallyStubborn);
    OpinionConfig cfg = sample_opinion_config(
        n_agents, 4, kinds, 0.05, Topology{TopologyKind::SmallWorld}, 7);
    OpinionGame built = build_opinion_game(cfg);
    StackedSignal z = built.z0;

    auto time_ms = [&](auto&& kernel) {
        StackedSignal acc = StackedSignal::Zero(z.size());
        auto start = std::chrono::steady_clock::now();
        for (int r = 0; r < repeats; ++r) acc += kernel(z);
        auto stop = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(stop - start)
                        .count();
        return std::pair<double, StackedSignal>(ms / repeats, acc / repeats);
    };

    auto [serial_ms, serial_out] = time_ms(
        [&](const StackedSignal& s) { return built.game.stacked_response_serial(s); });
    auto [parallel_ms, parallel_out] = time_ms(
        [&](const StackedSignal& s) { return built.game.stacked_response(s); });

    double mismatch = (serial_out - parallel_out).cwiseAbs().maxCoeff();
    std::cout << "agents: " << n_agents << ", repeats: " << repeats << '\n'
              << "serial:   " << serial_ms << " ms/call\n"
              << "parallel: " << parallel_ms << " ms/call\n"
              << "speedup:  " << serial_ms / parallel_ms << "x\n"
              << "max |serial - parallel|: " << mismatch << '\n';
    return mismatch <= 1e-12 ? 0 : 1;
}
