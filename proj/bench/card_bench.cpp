// Serial reference vs OpenMP kernels on reference-scenario snapshots.
// Arg 0: serial, 1: parallel. Range: reference scenario number.

#include <benchmark/benchmark.h>

#include "card/simulation.hpp"

using namespace card;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

struct Fixture {
    ScenarioConfig cfg;
    std::vector<NodePosition> positions;
    ConnectivityGraph graph;

    explicit Fixture(int row) : cfg(table1_preset(row)) {
        positions = place_nodes(cfg, 1);
        graph = build_connectivity(positions, cfg.tx_range);
    }
};

const Fixture& fixture(int row) {
    static const Fixture f5(5), f7(7);
    return row == 7 ? f7 : f5;
}

void BM_Connectivity(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(1)));
    for (auto _ : st) {
        if (st.range(0))
            benchmark::DoNotOptimize(build_connectivity(f.positions, f.cfg.tx_range));
        else
            benchmark::DoNotOptimize(build_connectivity_serial(f.positions, f.cfg.tx_range));
    }
}

void BM_Mobility(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(1)));
    auto pos = f.positions;
    for (auto _ : st)
        advance_mobility(pos, f.cfg, 1.0, 1, exec_of(st));
}

void BM_Neighborhoods(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(1)));
    for (auto _ : st)
        benchmark::DoNotOptimize(compute_all_neighborhoods(f.graph, 3, exec_of(st)));
}

void BM_GraphStats(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(1)));
    for (auto _ : st)
        benchmark::DoNotOptimize(graph_stats(f.graph, exec_of(st)));
}

void BM_SelectionRound(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(1)));
    const Topology topo(f.graph, 3);
    for (auto _ : st) {
        MetricsLedger ledger(f.graph.size());
        CardNetwork net(f.graph.size(), ContactParams{3, 20, 6, Method::em}, 1, ledger, exec_of(st));
        net.set_topology(topo);
        net.selection_round(0.0);
        benchmark::DoNotOptimize(net.mean_contacts());
    }
}

void BM_Reachability(benchmark::State& st) {
    const auto& f = fixture(static_cast<int>(st.range(1)));
    const Topology topo(f.graph, 3);
    MetricsLedger ledger(f.graph.size());
    CardNetwork net(f.graph.size(), ContactParams{3, 20, 6, Method::em}, 1, ledger);
    net.set_topology(topo);
    net.selection_round(0.0);
    for (auto _ : st)
        benchmark::DoNotOptimize(reachability_all(topo, net.states(), 3, exec_of(st)));
}

void BM_Simulation(benchmark::State& st) {
    RunOptions opts;
    opts.config = table1_preset(static_cast<int>(st.range(1)));
    opts.config.sim_duration = 10.0;
    opts.exec = exec_of(st);
    for (auto _ : st)
        benchmark::DoNotOptimize(run_simulation(opts).mean_reach());
}

void args(benchmark::internal::Benchmark* b) {
    b->ArgNames({"parallel", "row"});
    for (int row : {5, 7})
        for (int par : {0, 1})
            b->Args({par, row});
    b->Unit(benchmark::kMillisecond);
}

} // namespace

BENCHMARK(BM_Connectivity)->Apply(args);
BENCHMARK(BM_Mobility)->Apply(args);
BENCHMARK(BM_Neighborhoods)->Apply(args);
BENCHMARK(BM_GraphStats)->Apply(args);
BENCHMARK(BM_SelectionRound)->Apply(args);
BENCHMARK(BM_Reachability)->Apply(args);
BENCHMARK(BM_Simulation)->Apply(args);

BENCHMARK_MAIN();
