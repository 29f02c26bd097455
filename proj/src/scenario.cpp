#include "card/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

namespace card {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(fmt::format("invalid value '{}' for key '{}'", text, key));
    return value;
}

struct FieldBinding {
    std::string_view name;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
FieldBinding bind(std::string_view name, T ScenarioConfig::*member) {
    return FieldBinding{
        name,
        [name, member](ScenarioConfig& c, std::string_view v) { c.*member = parse_number<T>(name, v); },
        [member](const ScenarioConfig& c) { return fmt::format("{}", c.*member); }};
}

const std::vector<FieldBinding>& bindings() {
    static const std::vector<FieldBinding> table = {
        bind("node_count", &ScenarioConfig::node_count),
        bind("area_width", &ScenarioConfig::area_width),
        bind("area_height", &ScenarioConfig::area_height),
        bind("tx_range", &ScenarioConfig::tx_range),
        bind("neighborhood_radius", &ScenarioConfig::neighborhood_radius),
        bind("max_contact_distance", &ScenarioConfig::max_contact_distance),
        bind("max_contacts", &ScenarioConfig::max_contacts),
        bind("max_depth", &ScenarioConfig::max_depth),
        bind("speed_min", &ScenarioConfig::speed_min),
        bind("speed_max", &ScenarioConfig::speed_max),
        bind("pause_time", &ScenarioConfig::pause_time),
        bind("validation_period", &ScenarioConfig::validation_period),
        bind("sim_duration", &ScenarioConfig::sim_duration),
        bind("snapshot_interval", &ScenarioConfig::snapshot_interval),
        bind("rng_seed", &ScenarioConfig::rng_seed),
    };
    return table;
}

const FieldBinding& find_binding(std::string_view key) {
    for (const auto& b : bindings())
        if (b.name == key)
            return b;
    throw ConfigError(fmt::format("unknown key '{}'", key));
}

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void draw_leg(NodePosition& p, const ScenarioConfig& cfg, std::uint64_t seed) {
    auto rng = make_rng(seed, 0x6d6f62ULL, p.node, p.leg++);
    p.waypoint = {uniform(rng, 0.0, cfg.area_width), uniform(rng, 0.0, cfg.area_height)};
    p.speed = cfg.speed_max > cfg.speed_min ? uniform(rng, cfg.speed_min, cfg.speed_max) : cfg.speed_min;
}

void move_node(NodePosition& p, const ScenarioConfig& cfg, double dt, std::uint64_t seed) {
    double budget = dt;
    // Bounded so that a zero-length leg with zero pause cannot spin forever.
    for (int guard = 0; budget > 0.0 && guard < 1024; ++guard) {
        if (p.pause_remaining > 0.0) {
            const double wait = std::min(budget, p.pause_remaining);
            p.pause_remaining -= wait;
            budget -= wait;
            if (p.pause_remaining > 0.0)
                return;
            draw_leg(p, cfg, seed);
            continue;
        }
        if (p.speed <= 0.0)
            return;
        const double dx = p.waypoint.x - p.x;
        const double dy = p.waypoint.y - p.y;
        const double dist = std::hypot(dx, dy);
        const double reach = p.speed * budget;
        if (reach < dist) {
            p.x += dx / dist * reach;
            p.y += dy / dist * reach;
            break;
        }
        budget -= dist / p.speed;
        p.x = p.waypoint.x;
        p.y = p.waypoint.y;
        p.pause_remaining = cfg.pause_time;
    }
    p.x = std::clamp(p.x, 0.0, cfg.area_width);
    p.y = std::clamp(p.y, 0.0, cfg.area_height);
}

void sort_adjacency(ConnectivityGraph& g) {
    for (auto& nbrs : g.adjacency)
        std::sort(nbrs.begin(), nbrs.end());
}

bool in_range(const NodePosition& a, const NodePosition& b, double range_sq) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy <= range_sq;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return splitmix64(h ^ c);
}

void ScenarioConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw ConfigError(what);
    };
    require(node_count >= 1, "node_count must be at least 1");
    require(area_width > 0.0 && area_height > 0.0, "area dimensions must be positive");
    require(tx_range > 0.0, "tx_range must be positive");
    require(neighborhood_radius >= 1, "R must be at least 1");
    require(max_contact_distance > 2 * neighborhood_radius, "r must exceed 2R");
    require(max_contacts >= 0, "NoC must be non-negative");
    require(max_depth >= 1, "D must be at least 1");
    require(speed_min >= 0.0, "speed_min must be non-negative");
    require(speed_min <= speed_max, "speed_min must not exceed speed_max");
    require(pause_time > 0.0 && validation_period > 0.0 && sim_duration > 0.0 && snapshot_interval > 0.0,
            "time quantities must be positive");
}

const std::vector<std::string>& scenario_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& b : bindings())
            k.emplace_back(b.name);
        return k;
    }();
    return keys;
}

void set_field(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
    find_binding(key).set(cfg, trim(value));
}

std::string get_field(const ScenarioConfig& cfg, std::string_view key) {
    return find_binding(key).get(cfg);
}

ScenarioConfig parse_scenario(std::string_view text, ScenarioConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("line {}: expected key=value", line_no));
        set_field(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& file, ScenarioConfig base) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError(fmt::format("cannot read scenario file '{}'", file.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), std::move(base));
}

std::string to_key_values(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& b : bindings())
        out += fmt::format("{}={}\n", b.name, b.get(cfg));
    return out;
}

const std::vector<Table1Row>& table1_rows() {
    static const std::vector<Table1Row> rows = {
        {1, 250, 500, 500, 50, 837, 6.75, 23, 9.378},
        {2, 250, 710, 710, 50, 632, 5.223, 25, 9.614},
        {3, 250, 1000, 1000, 50, 284, 2.57, 13, 3.76},
        {4, 500, 710, 710, 30, 702, 4.32, 20, 5.8744},
        {5, 500, 710, 710, 50, 1854, 7.416, 29, 11.641},
        {6, 500, 710, 710, 70, 3564, 14.184, 17, 7.06},
        {7, 1000, 710, 710, 50, 8019, 16.038, 24, 8.75},
        {8, 1000, 1000, 1000, 50, 4062, 8.156, 37, 14.33},
    };
    return rows;
}

ScenarioConfig table1_preset(int row) {
    for (const auto& t : table1_rows()) {
        if (t.row != row)
            continue;
        ScenarioConfig cfg;
        cfg.node_count = t.nodes;
        cfg.area_width = t.width;
        cfg.area_height = t.height;
        cfg.tx_range = t.tx_range;
        return cfg;
    }
    throw ConfigError(fmt::format("no reference scenario {}", row));
}

ScenarioConfig preset_by_name(std::string_view name) {
    constexpr std::string_view prefix = "table1-";
    if (name.substr(0, prefix.size()) != prefix)
        throw ConfigError(fmt::format("unknown preset '{}'", name));
    int row = 0;
    const auto digits = name.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), row);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
        throw ConfigError(fmt::format("unknown preset '{}'", name));
    return table1_preset(row);
}

std::vector<NodePosition> place_nodes(const ScenarioConfig& cfg, std::uint64_t seed) {
    std::vector<NodePosition> nodes(static_cast<std::size_t>(cfg.node_count));
    auto rng = make_rng(seed, 0x706c6163ULL);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto& p = nodes[i];
        p.node = static_cast<NodeId>(i);
        p.x = uniform(rng, 0.0, cfg.area_width);
        p.y = uniform(rng, 0.0, cfg.area_height);
        draw_leg(p, cfg, seed);
    }
    return nodes;
}

void advance_mobility(std::span<NodePosition> positions, const ScenarioConfig& cfg, double dt,
                      std::uint64_t seed, Exec exec) {
    for_each_index(positions.size(), exec, [&](std::size_t i) { move_node(positions[i], cfg, dt, seed); });
}

bool ConnectivityGraph::adjacent(NodeId u, NodeId v) const {
    if (u >= adjacency.size())
        return false;
    const auto& n = adjacency[u];
    return std::binary_search(n.begin(), n.end(), v);
}

ConnectivityGraph ConnectivityGraph::from_edges(std::size_t n,
                                                std::span<const std::pair<NodeId, NodeId>> edges) {
    ConnectivityGraph g;
    g.adjacency.resize(n);
    for (auto [u, v] : edges) {
        if (u == v || g.adjacent(u, v))
            continue;
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
        std::sort(g.adjacency[u].begin(), g.adjacency[u].end());
        std::sort(g.adjacency[v].begin(), g.adjacency[v].end());
    }
    return g;
}

ConnectivityGraph build_connectivity_serial(std::span<const NodePosition> positions, double tx_range,
                                            double epoch) {
    ConnectivityGraph g;
    g.epoch = epoch;
    g.adjacency.resize(positions.size());
    const double range_sq = tx_range * tx_range;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (in_range(positions[i], positions[j], range_sq)) {
                g.adjacency[i].push_back(static_cast<NodeId>(j));
                g.adjacency[j].push_back(static_cast<NodeId>(i));
            }
        }
    }
    sort_adjacency(g);
    return g;
}

ConnectivityGraph build_connectivity(std::span<const NodePosition> positions, double tx_range,
                                     double epoch) {
    ConnectivityGraph g;
    g.epoch = epoch;
    g.adjacency.resize(positions.size());
    if (positions.empty())
        return g;

    double max_x = 0.0, max_y = 0.0;
    for (const auto& p : positions) {
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    const auto cols = static_cast<std::size_t>(max_x / tx_range) + 1;
    const auto rows = static_cast<std::size_t>(max_y / tx_range) + 1;
    auto cell_of = [&](const NodePosition& p) {
        const auto cx = std::min(static_cast<std::size_t>(p.x / tx_range), cols - 1);
        const auto cy = std::min(static_cast<std::size_t>(p.y / tx_range), rows - 1);
        return std::pair{cx, cy};
    };

    // Cells hold node indices in ascending order, so neighbor lists need only
    // a final sort across the nine cells.
    std::vector<std::vector<NodeId>> cells(cols * rows);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        auto [cx, cy] = cell_of(positions[i]);
        cells[cy * cols + cx].push_back(static_cast<NodeId>(i));
    }

    const double range_sq = tx_range * tx_range;
    for_each_index(positions.size(), Exec::parallel, [&](std::size_t i) {
        auto [cx, cy] = cell_of(positions[i]);
        auto& out = g.adjacency[i];
        for (std::size_t y = cy == 0 ? 0 : cy - 1; y <= std::min(cy + 1, rows - 1); ++y) {
            for (std::size_t x = cx == 0 ? 0 : cx - 1; x <= std::min(cx + 1, cols - 1); ++x) {
                for (NodeId j : cells[y * cols + x]) {
                    if (j != i && in_range(positions[i], positions[j], range_sq))
                        out.push_back(j);
                }
            }
        }
        std::sort(out.begin(), out.end());
    });
    return g;
}

std::vector<int> bfs_distances(const ConnectivityGraph& g, NodeId source) {
    std::vector<int> dist(g.size(), -1);
    std::vector<NodeId> queue{source};
    dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

GraphStats graph_stats(const ConnectivityGraph& g, Exec exec) {
    GraphStats s;
    const std::size_t n = g.size();
    std::size_t degree_sum = 0;
    for (const auto& nbrs : g.adjacency)
        degree_sum += nbrs.size();
    s.link_count = degree_sum / 2;
    s.avg_degree = n == 0 ? 0.0 : static_cast<double>(degree_sum) / static_cast<double>(n);
    if (n == 0)
        return s;

    // Component labels; the largest component wins, ties go to the lowest label.
    std::vector<int> component(n, -1);
    std::vector<std::size_t> sizes;
    for (NodeId u = 0; u < n; ++u) {
        if (component[u] >= 0)
            continue;
        const int label = static_cast<int>(sizes.size());
        std::size_t count = 0;
        std::vector<NodeId> stack{u};
        component[u] = label;
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            ++count;
            for (NodeId w : g.neighbors(v)) {
                if (component[w] < 0) {
                    component[w] = label;
                    stack.push_back(w);
                }
            }
        }
        sizes.push_back(count);
    }
    const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    s.largest_component = sizes[static_cast<std::size_t>(largest)];

    std::vector<int> ecc(n, 0);
    std::vector<std::uint64_t> hop_sum(n, 0);
    for_each_index(n, exec, [&](std::size_t u) {
        if (component[u] != largest)
            return;
        const auto dist = bfs_distances(g, static_cast<NodeId>(u));
        for (int d : dist) {
            if (d > 0) {
                ecc[u] = std::max(ecc[u], d);
                hop_sum[u] += static_cast<std::uint64_t>(d);
            }
        }
    });
    s.diameter = *std::max_element(ecc.begin(), ecc.end());
    const std::uint64_t total = std::accumulate(hop_sum.begin(), hop_sum.end(), std::uint64_t{0});
    const double ordered_pairs =
        static_cast<double>(s.largest_component) * static_cast<double>(s.largest_component - 1);
    s.avg_hops = ordered_pairs > 0 ? static_cast<double>(total) / ordered_pairs : 0.0;
    return s;
}

} // namespace card
