#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "card/parallel.hpp"
#include "card/types.hpp"

namespace card {

/// Raised when a configuration violates one of its invariants. The message
/// names the violated rule, e.g. "r must exceed 2R".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    int node_count = 500;
    double area_width = 710.0;
    double area_height = 710.0;
    double tx_range = 50.0;
    int neighborhood_radius = 3;   // R
    int max_contact_distance = 20; // r
    int max_contacts = 6;          // NoC
    int max_depth = 3;             // D
    double speed_min = 1.0;
    double speed_max = 10.0;
    double pause_time = 2.0;
    double validation_period = 5.0;
    double sim_duration = 20.0;
    double snapshot_interval = 1.0;
    std::uint64_t rng_seed = 1;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Field names accepted in scenario files, in canonical order.
const std::vector<std::string>& scenario_keys();

/// Assigns one field by name. Throws ConfigError for unknown keys or values
/// that do not parse as the field's type.
void set_field(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Canonical text of one field, as written by to_key_values.
std::string get_field(const ScenarioConfig& cfg, std::string_view key);

/// Parses flat key=value text (one key per line, '#' comments) on top of base.
/// Does not validate; callers validate after applying overrides.
ScenarioConfig parse_scenario(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_scenario_file(const std::filesystem::path& file, ScenarioConfig base = {});
std::string to_key_values(const ScenarioConfig& cfg);

/// Reference scenarios 1..8 with the remaining fields at their defaults.
ScenarioConfig table1_preset(int row);
/// Resolves "table1-<row>"; throws ConfigError for unknown names.
ScenarioConfig preset_by_name(std::string_view name);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct NodePosition {
    NodeId node = 0;
    double x = 0.0;
    double y = 0.0;
    Point waypoint;
    double speed = 0.0;
    double pause_remaining = 0.0;
    std::uint64_t leg = 0; // waypoints drawn so far; indexes the node's draw stream
};

/// Uniform placement with an initial random-waypoint leg for every node.
std::vector<NodePosition> place_nodes(const ScenarioConfig& cfg, std::uint64_t seed);

/// Advances every node by dt seconds of random-waypoint motion. New waypoints
/// and speeds come from per-node streams keyed by (seed, node, leg).
void advance_mobility(std::span<NodePosition> positions, const ScenarioConfig& cfg, double dt,
                      std::uint64_t seed, Exec exec = Exec::parallel);

struct ConnectivityGraph {
    std::vector<std::vector<NodeId>> adjacency; // sorted ascending
    double epoch = 0.0;

    std::size_t size() const { return adjacency.size(); }
    const std::vector<NodeId>& neighbors(NodeId u) const { return adjacency[u]; }
    bool adjacent(NodeId u, NodeId v) const;

    /// Builds from an undirected edge list; used for constructed topologies.
    static ConnectivityGraph from_edges(std::size_t n,
                                        std::span<const std::pair<NodeId, NodeId>> edges);

    bool operator==(const ConnectivityGraph&) const = default;
};

/// Unit-disk graph; a pair is linked iff their distance is <= tx_range.
/// Grid-bucketed, parallel over nodes.
ConnectivityGraph build_connectivity(std::span<const NodePosition> positions, double tx_range,
                                     double epoch = 0.0);
/// All-pairs reference implementation.
ConnectivityGraph build_connectivity_serial(std::span<const NodePosition> positions,
                                            double tx_range, double epoch = 0.0);

struct GraphStats {
    std::size_t link_count = 0;
    double avg_degree = 0.0;
    int diameter = 0;       // over the largest connected component
    double avg_hops = 0.0;  // mean over connected pairs of the largest component
    std::size_t largest_component = 0;
};

GraphStats graph_stats(const ConnectivityGraph& g, Exec exec = Exec::parallel);

/// Hop distances from source; -1 for unreachable nodes. Independent BFS used
/// by statistics and by test oracles.
std::vector<int> bfs_distances(const ConnectivityGraph& g, NodeId source);

/// Published reference statistics for one scenario.
struct Table1Row {
    int row;
    int nodes;
    double width;
    double height;
    double tx_range;
    int links;
    double degree;
    int diameter;
    double avg_hops;
};
const std::vector<Table1Row>& table1_rows();

} // namespace card
