#pragma once

#include <optional>
#include <vector>

#include "card/parallel.hpp"
#include "card/scenario.hpp"
#include "card/types.hpp"

namespace card {

/// R-hop proactive view of one node over a connectivity snapshot.
///
/// Entries are kept sorted by member id with BFS parent pointers; paths are
/// rebuilt on demand. BFS expands neighbors in ascending id order, so the
/// parent of every member (and therefore every route) is deterministic.
class NeighborhoodTable {
public:
    struct Entry {
        NodeId member;
        int distance;
        NodeId parent; // previous hop on the route from the owner
    };

    NeighborhoodTable() = default;

    NodeId owner() const { return owner_; }
    int radius() const { return radius_; }
    double epoch() const { return epoch_; }

    /// Members in ascending id order (owner excluded).
    const std::vector<Entry>& entries() const { return entries_; }
    /// Members at exactly `radius` hops, ascending.
    const std::vector<NodeId>& edge_nodes() const { return edge_; }
    /// Membership bitset over all nodes (owner excluded).
    const NodeSet& members() const { return members_; }

    std::size_t size() const { return entries_.size(); }
    bool contains(NodeId id) const { return id < members_.size() && members_.test(id); }
    std::optional<int> distance(NodeId id) const;

    /// Route owner -> id (both ends included), or nullopt if id is not a member.
    std::optional<Path> route_to(NodeId id) const;

private:
    friend NeighborhoodTable compute_neighborhood(const ConnectivityGraph&, NodeId, int);

    const Entry* find(NodeId id) const;

    NodeId owner_ = 0;
    int radius_ = 0;
    double epoch_ = 0.0;
    std::vector<Entry> entries_;
    std::vector<NodeId> edge_;
    NodeSet members_;
};

NeighborhoodTable compute_neighborhood(const ConnectivityGraph& graph, NodeId owner, int radius);

/// Tables for every node of the snapshot.
std::vector<NeighborhoodTable> compute_all_neighborhoods(const ConnectivityGraph& graph, int radius,
                                                         Exec exec = Exec::parallel);

/// A connectivity snapshot together with every node's neighborhood table.
struct Topology {
    ConnectivityGraph graph;
    std::vector<NeighborhoodTable> tables;
    int radius = 0;

    Topology() = default;
    Topology(ConnectivityGraph g, int r, Exec exec = Exec::parallel);

    std::size_t size() const { return graph.size(); }
    const NeighborhoodTable& table(NodeId n) const { return tables[n]; }
};

} // namespace card
