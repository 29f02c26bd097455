#pragma once

#include <cstdint>

#include "card/neighborhood.hpp"
#include "card/simcore.hpp"

namespace card {

struct BaselineOutcome {
    bool success = false;
    std::uint64_t transmissions = 0;
};

/// Flood with duplicate suppression: every node broadcasts the query at most
/// once, in BFS order (ascending id within a level). Stops the moment the
/// target receives it. One broadcast is one transmission, charged to the
/// source's baseline counter.
BaselineOutcome flood_query(const ConnectivityGraph& graph, NodeId source, NodeId target,
                            LinkLayer& link);

/// Per-query covered marks for bordercasting.
struct BordercastState {
    int zone_radius = 0;
    NodeSet covered;
    std::vector<NodeId> bordercasters; // in the order they bordercast
};

/// Zone-based bordercast over `zones` (tables built with the zone radius).
///
/// A bordercaster unicasts the query along its zone routes to the uncovered
/// peripheral nodes. The routes share prefixes of the zone's BFS tree and each
/// tree link carries one transmission. The source and every
/// peripheral recipient check their own zone for the target. Query detection
/// marks nodes covered so they never bordercast the query: relays on a route
/// (QD1) and all neighbors of a transmitter (QD2). Peripheral recipients of
/// the current round are exempt from the marks of that round. Charged to the
/// source's baseline counter.
BaselineOutcome bordercast_query(const Topology& zones, NodeId source, NodeId target, LinkLayer& link,
                                 BordercastState* trace = nullptr);

} // namespace card
