#include "card/neighborhood.hpp"

#include <algorithm>

namespace card {

const NeighborhoodTable::Entry* NeighborhoodTable::find(NodeId id) const {
    if (!contains(id))
        return nullptr;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const Entry& e, NodeId v) { return e.member < v; });
    return &*it;
}

std::optional<int> NeighborhoodTable::distance(NodeId id) const {
    if (const Entry* e = find(id))
        return e->distance;
    return std::nullopt;
}

std::optional<Path> NeighborhoodTable::route_to(NodeId id) const {
    const Entry* e = find(id);
    if (!e)
        return std::nullopt;
    Path p{id};
    p.reserve(static_cast<std::size_t>(e->distance) + 1);
    for (NodeId at = e->parent;; at = find(at)->parent) {
        p.push_back(at);
        if (at == owner_)
            break;
    }
    std::reverse(p.begin(), p.end());
    return p;
}

NeighborhoodTable compute_neighborhood(const ConnectivityGraph& graph, NodeId owner, int radius) {
    NeighborhoodTable t;
    t.owner_ = owner;
    t.radius_ = radius;
    t.epoch_ = graph.epoch;
    t.members_.resize(graph.size());

    std::vector<NodeId> frontier{owner};
    NodeSet seen(graph.size());
    seen.set(owner);
    for (int depth = 1; depth <= radius && !frontier.empty(); ++depth) {
        std::vector<NodeId> next;
        // Frontier order is BFS discovery order, and within a node neighbors
        // are ascending, so the first discoverer is the canonical parent.
        for (NodeId u : frontier) {
            for (NodeId v : graph.neighbors(u)) {
                if (seen.test(v))
                    continue;
                seen.set(v);
                next.push_back(v);
                t.entries_.push_back({v, depth, u});
                t.members_.set(v);
                if (depth == radius)
                    t.edge_.push_back(v);
            }
        }
        frontier = std::move(next);
    }
    std::sort(t.entries_.begin(), t.entries_.end(),
              [](const auto& a, const auto& b) { return a.member < b.member; });
    std::sort(t.edge_.begin(), t.edge_.end());
    return t;
}

std::vector<NeighborhoodTable> compute_all_neighborhoods(const ConnectivityGraph& graph, int radius,
                                                         Exec exec) {
    std::vector<NeighborhoodTable> tables(graph.size());
    for_each_index(graph.size(), exec, [&](std::size_t u) {
        tables[u] = compute_neighborhood(graph, static_cast<NodeId>(u), radius);
    });
    return tables;
}

Topology::Topology(ConnectivityGraph g, int r, Exec exec)
    : graph(std::move(g)), tables(compute_all_neighborhoods(graph, r, exec)), radius(r) {}

} // namespace card
