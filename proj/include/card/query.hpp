#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "card/contacts.hpp"
#include "card/neighborhood.hpp"
#include "card/parallel.hpp"
#include "card/simcore.hpp"

namespace card {

/// Destination Search Query.
struct Dsq {
    NodeId target = 0;
    int depth = 1; // remaining contact levels
    std::uint64_t query_id = 0;
    Path reply_path_accumulator; // source ... receiving contact
};

struct Reply {
    Path path; // source ... target
};
struct Forwarded {};
struct NoAnswer {};
using DsqResult = std::variant<Reply, Forwarded, NoAnswer>;

/// Dissemination of one DSQ (one query id) through contact levels.
///
/// Contacts are queried one at a time in selection order and forwarding stops
/// at the first reply. A contact ignores a query id it has already handled
/// with at least the same remaining depth. Forward and reply hops are charged
/// to the query category of `origin`.
class DsqSession {
public:
    DsqSession(const Topology& topo, std::span<const ContactState> contacts, LinkLayer& link,
               NodeId origin, std::uint64_t query_id);

    /// Processing at `contact` of a DSQ that has just been delivered to it.
    DsqResult handle_dsq(NodeId contact, const Dsq& dsq);

    /// Sends dsq from `from` to each of from's contacts in turn; the reply,
    /// when one arrives, has already travelled back to `from`.
    DsqResult forward_to_contacts(NodeId from, const Dsq& dsq);

    std::uint64_t hops() const { return hops_; }

private:
    std::size_t send(const Path& path);

    const Topology& topo_;
    std::span<const ContactState> contacts_;
    LinkLayer& link_;
    NodeId origin_;
    std::uint64_t query_id_;
    std::vector<int> handled_depth_;
    std::uint64_t hops_ = 0;
};

struct QueryOutcome {
    bool found = false;
    Path path;              // source ... target when found
    std::uint64_t hops = 0; // query transmissions, including replies
    int depth_used = 0;     // 0 for a neighborhood hit, else the last level tried
};

/// Neighborhood lookup, then DSQ levels D = 1..max_depth, each level issued
/// only after the previous one finished without a reply. Query ids are taken
/// from next_query_id and never reused.
QueryOutcome resolve(const Topology& topo, std::span<const ContactState> contacts, LinkLayer& link,
                     NodeId source, NodeId target, int max_depth, std::uint64_t& next_query_id);

/// Fraction of the network covered by the source, its neighborhood, and every
/// contact reachable through at most `depth` contact levels together with
/// their neighborhoods. Pure set union, no traffic.
double analytic_reachability(const Topology& topo, std::span<const ContactState> contacts,
                             NodeId source, int depth);

/// The covered node set behind analytic_reachability.
NodeSet reachable_set(const Topology& topo, std::span<const ContactState> contacts, NodeId source,
                      int depth);

std::vector<double> reachability_all(const Topology& topo, std::span<const ContactState> contacts,
                                     int depth, Exec exec = Exec::parallel);

} // namespace card
