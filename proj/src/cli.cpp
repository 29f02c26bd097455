#include "card/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "card/experiments.hpp"
#include "card/scenario.hpp"
#include "card/simulation.hpp"

#ifndef CARD_VERSION
#define CARD_VERSION "0.0.0"
#endif

namespace card {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Everything a command needs, fully resolved. Round-trips through the manifest.
struct Invocation {
    std::string command; // run | compare | sweep
    ScenarioConfig config;
    Method method = Method::em;
    std::vector<std::uint64_t> seeds;
    int queries = 50;
    int zone_radius = 0;
    bool mobility = true;
    bool stats_only = false;
    int parallel = 1;
    std::optional<SweepSpec> sweep;
    fs::path out_dir = "out";
};

struct RawFlags {
    std::string preset;
    std::string scenario;
    std::string method = "em";
    std::optional<int> R, r, noc, depth, nodes;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    int replicates = 1;
    int queries = 50;
    std::optional<int> sweep_queries;
    int zone_radius = 0;
    bool stationary = false;
    bool stats_only = false;
    int parallel = 1;
    std::string out = "out";
    std::string sweep_file;
    std::string manifest_file;
};

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t replicate_seed(std::uint64_t seed, int index) {
    return index == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(index));
}

Invocation resolve_flags(const std::string& command, const RawFlags& f) {
    Invocation inv;
    inv.command = command;
    inv.out_dir = f.out;
    inv.parallel = std::max(1, f.parallel);
    if (command == "sweep") {
        inv.sweep = load_sweep_file(f.sweep_file);
        if (f.sweep_queries)
            inv.sweep->query_count = *f.sweep_queries;
        inv.sweep->validate();
        inv.config = inv.sweep->base;
        inv.seeds = inv.sweep->seeds;
        return inv;
    }

    ScenarioConfig cfg;
    if (!f.preset.empty())
        cfg = preset_by_name(f.preset);
    if (!f.scenario.empty())
        cfg = load_scenario_file(f.scenario, cfg);
    if (f.R)
        cfg.neighborhood_radius = *f.R;
    if (f.r)
        cfg.max_contact_distance = *f.r;
    if (f.noc)
        cfg.max_contacts = *f.noc;
    if (f.depth)
        cfg.max_depth = *f.depth;
    if (f.nodes)
        cfg.node_count = *f.nodes;
    if (f.seed)
        cfg.rng_seed = *f.seed;
    if (f.duration)
        cfg.sim_duration = *f.duration;
    cfg.validate();
    if (f.replicates < 1)
        throw ConfigError("replicates must be >= 1");
    if (f.queries < 0)
        throw ConfigError("queries must be >= 0");
    if (f.zone_radius < 0)
        throw ConfigError("zone radius must be >= 0");

    inv.config = cfg;
    inv.method = parse_method(f.method);
    inv.queries = f.queries;
    inv.zone_radius = f.zone_radius;
    inv.mobility = !f.stationary;
    inv.stats_only = f.stats_only;
    for (int i = 0; i < f.replicates; ++i)
        inv.seeds.push_back(replicate_seed(cfg.rng_seed, i));
    return inv;
}

json manifest_body(const Invocation& inv) {
    json j;
    j["tool"] = "card";
    j["version"] = CARD_VERSION;
    j["command"] = inv.command;
    json cfg = json::object();
    for (const auto& key : scenario_keys())
        cfg[key] = get_field(inv.config, key);
    j["config"] = cfg;
    j["method"] = std::string(method_name(inv.method));
    j["seeds"] = inv.seeds;
    j["queries"] = inv.queries;
    j["zone_radius"] = inv.zone_radius;
    j["mobility"] = inv.mobility;
    j["stats_only"] = inv.stats_only;
    j["parallel"] = inv.parallel;
    if (inv.sweep)
        j["sweep"] = to_text(*inv.sweep);
    return j;
}

json make_manifest(const Invocation& inv) {
    json body = manifest_body(inv);
    json j;
    j["invocation_id"] = fmt::format("{:016x}", fnv1a(body.dump()));
    for (auto& [k, v] : body.items())
        j[k] = v;
    j["output_dir"] = inv.out_dir.string();
    return j;
}

Invocation from_manifest(const fs::path& file, const std::string& out_override) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError(fmt::format("cannot read manifest '{}'", file.string()));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("invalid manifest: {}", e.what()));
    }
    try {
        Invocation inv;
        inv.command = j.at("command").get<std::string>();
        if (inv.command != "run" && inv.command != "compare" && inv.command != "sweep")
            throw ConfigError(fmt::format("unknown command '{}' in manifest", inv.command));
        for (const auto& [key, value] : j.at("config").items())
            set_field(inv.config, key, value.get<std::string>());
        inv.method = parse_method(j.at("method").get<std::string>());
        inv.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        inv.queries = j.at("queries").get<int>();
        inv.zone_radius = j.at("zone_radius").get<int>();
        inv.mobility = j.at("mobility").get<bool>();
        inv.stats_only = j.at("stats_only").get<bool>();
        inv.parallel = j.at("parallel").get<int>();
        if (j.contains("sweep")) {
            inv.sweep = parse_sweep(j.at("sweep").get<std::string>());
            inv.sweep->validate();
        }
        inv.out_dir = out_override.empty() ? fs::path(j.at("output_dir").get<std::string>()) : fs::path(out_override);
        inv.config.validate();
        if (inv.seeds.empty())
            throw ConfigError("manifest has no seeds");
        return inv;
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("invalid manifest: {}", e.what()));
    }
}

std::ofstream open_csv(const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write '{}'", file.string()));
    out.imbue(std::locale::classic());
    return out;
}

fs::path run_dir(const Invocation& inv, std::size_t i) {
    return inv.out_dir / fmt::format("run_{:03}", i);
}

RunOptions options_for(const Invocation& inv, std::size_t i, bool baselines) {
    RunOptions opts;
    opts.config = inv.config;
    opts.config.rng_seed = inv.seeds[i];
    opts.method = inv.method;
    opts.mobility = inv.mobility;
    opts.query_count = inv.queries;
    opts.zone_radius = inv.zone_radius;
    opts.run_baselines = baselines;
    opts.exec = inv.parallel > 1 ? Exec::serial : Exec::parallel;
    return opts;
}

// Runs fn(i) for every replicate, up to inv.parallel at once. Results are
// consumed afterwards in index order, so outputs never depend on scheduling.
template <class Fn>
auto for_replicates(const Invocation& inv, Fn&& fn) {
    using Result = decltype(fn(std::size_t{}));
    std::vector<std::optional<Result>> results(inv.seeds.size());
    std::vector<std::string> errors(inv.seeds.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(inv.parallel) if (inv.parallel > 1)
    for (std::size_t i = 0; i < inv.seeds.size(); ++i) {
        try {
            results[i].emplace(fn(i));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error(fmt::format("run {}: {}", i, errors[i]));
    std::vector<Result> out;
    for (auto& r : results)
        out.push_back(std::move(*r));
    return out;
}

void write_graph_stats(const Invocation& inv, const std::vector<GraphStats>& stats, std::ostream& out) {
    auto csv = open_csv(inv.out_dir / "graph_stats.csv");
    csv << "run_id,seed,node_count,link_count,avg_degree,diameter,avg_hops,largest_component\n";
    double degree = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        fmt::print(csv, "{},{},{},{},{},{},{},{}\n", i, inv.seeds[i], inv.config.node_count, s.link_count,
                   s.avg_degree, s.diameter, s.avg_hops, s.largest_component);
        degree += s.avg_degree;
    }
    fmt::print(out, "graph stats over {} run(s): mean degree {:.3f}\n", stats.size(),
               degree / static_cast<double>(stats.size()));
}

void cmd_run(const Invocation& inv, std::ostream& out) {
    if (inv.stats_only) {
        const auto stats = for_replicates(inv, [&](std::size_t i) {
            auto cfg = inv.config;
            cfg.rng_seed = inv.seeds[i];
            const auto g = build_connectivity(place_nodes(cfg, cfg.rng_seed), cfg.tx_range);
            return graph_stats(g, inv.parallel > 1 ? Exec::serial : Exec::parallel);
        });
        write_graph_stats(inv, stats, out);
        return;
    }

    const auto results = for_replicates(inv, [&](std::size_t i) { return run_simulation(options_for(inv, i, false)); });
    std::vector<GraphStats> stats;
    auto reach = open_csv(inv.out_dir / "reachability.csv");
    reach << "run_id,node_id,reach_fraction\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& res = results[i];
        stats.push_back(res.initial_stats);
        for (std::size_t node = 0; node < res.reach_time_avg.size(); ++node)
            fmt::print(reach, "{},{},{}\n", i, node, res.reach_time_avg[node]);

        const fs::path dir = run_dir(inv, i);
        fs::create_directories(dir);
        auto ledger = open_csv(dir / "ledger.csv");
        res.ledger.write_csv(ledger);
        auto census = open_csv(dir / "contacts.csv");
        write_census_csv(census, res);
        auto queries = open_csv(dir / "queries.csv");
        write_queries_csv(queries, res);

        std::size_t found = 0;
        for (const auto& q : res.queries)
            found += q.success;
        fmt::print(out, "run {} seed {}: mean reach {:.3f}, contacts {:.2f}, queries {}/{} found\n", i,
                   inv.seeds[i], res.mean_reach(), res.mean_contacts_final, found, res.queries.size());
    }
    write_graph_stats(inv, stats, out);
}

void cmd_compare(const Invocation& inv, std::ostream& out) {
    const auto results = for_replicates(inv, [&](std::size_t i) { return run_simulation(options_for(inv, i, true)); });
    auto summary = open_csv(inv.out_dir / "comparison_summary.csv");
    summary << "run_id,seed,scheme,queries,query_traffic_per_node,success_rate,success_rate_connected,"
               "unreachable_pairs,selection_maintenance_per_node\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const fs::path dir = run_dir(inv, i);
        fs::create_directories(dir);
        auto comparison = open_csv(dir / "comparison.csv");
        write_comparison_csv(comparison, results[i]);
        for (const auto& s : summarize_comparison(results[i])) {
            fmt::print(summary, "{},{},{},{},{},{},{},{},{}\n", i, inv.seeds[i], s.scheme, s.queries,
                       s.query_traffic_per_node, s.success_rate, s.success_rate_connected, s.unreachable_pairs,
                       s.selection_maintenance_per_node);
            fmt::print(out, "run {} {:<10} query/node {:8.3f}  success {:.3f}  (connected {:.3f})", i, s.scheme,
                       s.query_traffic_per_node, s.success_rate, s.success_rate_connected);
            if (s.scheme == "card")
                fmt::print(out, "  selection+maintenance/node {:.1f}", s.selection_maintenance_per_node);
            out << '\n';
        }
    }
}

void cmd_sweep(const Invocation& inv, std::ostream& out) {
    const auto rows = run_sweep(*inv.sweep, inv.parallel);
    auto sweep = open_csv(inv.out_dir / "sweep.csv");
    write_sweep_csv(sweep, rows);
    const auto points = tradeoff_report(rows);
    auto tradeoff = open_csv(inv.out_dir / "tradeoff.csv");
    write_tradeoff_csv(tradeoff, points);
    std::size_t failures = 0;
    for (const auto& r : rows)
        failures += r.metric == "failed";
    fmt::print(out, "sweep {}: {} rows, {} failed run(s)\n", inv.sweep->sweep_id, rows.size(), failures);
    for (const auto& p : points)
        fmt::print(out, "  {} {}={}: reach {:.1f}%  selection+maintenance/node {:.1f}\n", p.scheme,
                   inv.sweep->swept_parameter, p.value, p.reach_percent, p.overhead_per_node);
}

void execute(const Invocation& inv, std::ostream& out) {
    fs::create_directories(inv.out_dir);
    {
        std::ofstream m(inv.out_dir / "manifest.json", std::ios::binary);
        if (!m)
            throw std::runtime_error(fmt::format("cannot write manifest in '{}'", inv.out_dir.string()));
        m << make_manifest(inv).dump(2) << '\n';
    }
    if (inv.command == "run")
        cmd_run(inv, out);
    else if (inv.command == "compare")
        cmd_compare(inv, out);
    else
        cmd_sweep(inv, out);
}

void add_scenario_flags(CLI::App* cmd, RawFlags& f) {
    cmd->add_option("--preset", f.preset, "Reference scenario preset, table1-1 .. table1-8");
    cmd->add_option("--scenario", f.scenario, "Scenario file (key=value)");
    cmd->add_option("--method", f.method, "Contact selection: pm1, pm2 or em");
    cmd->add_option("--R", f.R, "Neighborhood radius in hops");
    cmd->add_option("--r", f.r, "Maximum contact distance in hops");
    cmd->add_option("--noc", f.noc, "Maximum number of contacts");
    cmd->add_option("--depth", f.depth, "Depth of search D");
    cmd->add_option("--nodes", f.nodes, "Node count");
    cmd->add_option("--seed", f.seed, "Base random seed");
    cmd->add_option("--duration", f.duration, "Simulated seconds");
    cmd->add_option("--replicates", f.replicates, "Independent runs with seeds derived from --seed");
    cmd->add_option("--queries", f.queries, "Random source/target queries on the final snapshot");
    cmd->add_option("--zone-radius", f.zone_radius, "Bordercast zone radius (0: same as R)");
    cmd->add_flag("--stationary", f.stationary, "Disable node movement");
    cmd->add_option("--parallel", f.parallel, "Runs executed concurrently");
    cmd->add_option("--out", f.out, "Output directory");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"CARD contact-based resource discovery simulator", "card"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CARD_VERSION);
    RawFlags f;

    auto* run = app.add_subcommand("run", "Simulate one scenario and write its CSV outputs");
    add_scenario_flags(run, f);
    run->add_flag("--stats-only", f.stats_only, "Only write connectivity statistics");

    auto* compare = app.add_subcommand("compare", "Compare CARD with flooding and bordercasting");
    add_scenario_flags(compare, f);

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep file");
    sweep->add_option("file", f.sweep_file, "Sweep file")->required();
    sweep->add_option("--queries", f.sweep_queries, "Queries per run (overrides the file)");
    sweep->add_option("--parallel", f.parallel, "Runs executed concurrently");
    sweep->add_option("--out", f.out, "Output directory");

    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", f.manifest_file, "manifest.json")->required();
    std::string replay_out;
    replay->add_option("--out", replay_out, "Output directory (default: the recorded one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) { // help and version requests
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    Invocation inv;
    try {
        if (replay->parsed())
            inv = from_manifest(f.manifest_file, replay_out);
        else
            inv = resolve_flags(app.get_subcommands().front()->get_name(), f);
    } catch (const ConfigError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return 2;
    }

    try {
        execute(inv, out);
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}

} // namespace card
