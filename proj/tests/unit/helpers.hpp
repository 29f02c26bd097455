#pragma once

#include <deque>
#include <utility>
#include <vector>

#include "card/scenario.hpp"
#include "card/types.hpp"

namespace card::testing {

inline ConnectivityGraph graph_of(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
    return ConnectivityGraph::from_edges(n, edges);
}

inline ConnectivityGraph path_graph(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i + 1 < n; ++i)
        edges.emplace_back(i, i + 1);
    return graph_of(n, edges);
}

// Node (row, col) has id row * cols + col.
inline ConnectivityGraph grid_graph(std::size_t rows, std::size_t cols) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const auto id = static_cast<NodeId>(r * cols + c);
            if (c + 1 < cols)
                edges.emplace_back(id, id + 1);
            if (r + 1 < rows)
                edges.emplace_back(id, static_cast<NodeId>(id + cols));
        }
    return graph_of(rows * cols, edges);
}

inline ConnectivityGraph complete_graph(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            edges.emplace_back(i, j);
    return graph_of(n, edges);
}

// Unit-disk snapshot of a uniform placement.
inline ConnectivityGraph random_graph(int nodes, double side, double range, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.node_count = nodes;
    cfg.area_width = side;
    cfg.area_height = side;
    cfg.tx_range = range;
    return build_connectivity(place_nodes(cfg, seed), range);
}

// Plain BFS on adjacency lists, written independently of the library.
inline std::vector<int> oracle_distances(const ConnectivityGraph& g, NodeId s) {
    std::vector<int> dist(g.size(), -1);
    std::deque<NodeId> q{s};
    dist[s] = 0;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        for (NodeId v : g.adjacency[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

inline bool adjacent_walk(const ConnectivityGraph& g, const Path& p) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const auto& adj = g.adjacency[p[i]];
        if (std::find(adj.begin(), adj.end(), p[i + 1]) == adj.end())
            return false;
    }
    return true;
}

} // namespace card::testing
