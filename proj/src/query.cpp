#include "card/query.hpp"

#include <algorithm>
#include <limits>

namespace card {

namespace {

Path reversed(const Path& p) { return Path(p.rbegin(), p.rend()); }

Path concat(Path head, const Path& tail) {
    if (!tail.empty())
        head.insert(head.end(), tail.begin() + 1, tail.end());
    return head;
}

} // namespace

DsqSession::DsqSession(const Topology& topo, std::span<const ContactState> contacts, LinkLayer& link,
                       NodeId origin, std::uint64_t query_id)
    : topo_(topo), contacts_(contacts), link_(link), origin_(origin), query_id_(query_id),
      handled_depth_(topo.size(), 0) {
    handled_depth_[origin] = std::numeric_limits<int>::max();
}

std::size_t DsqSession::send(const Path& path) {
    const std::size_t reached = link_.relay(path, Category::query, origin_);
    hops_ += reached;
    return reached;
}

DsqResult DsqSession::handle_dsq(NodeId contact, const Dsq& dsq) {
    if (handled_depth_[contact] >= dsq.depth)
        return NoAnswer{};
    handled_depth_[contact] = dsq.depth;

    if (dsq.depth <= 1) {
        if (contact == dsq.target)
            return Reply{dsq.reply_path_accumulator};
        if (auto route = topo_.table(contact).route_to(dsq.target))
            return Reply{concat(dsq.reply_path_accumulator, *route)};
        return NoAnswer{};
    }
    Dsq next = dsq;
    next.depth = dsq.depth - 1;
    return forward_to_contacts(contact, next);
}

DsqResult DsqSession::forward_to_contacts(NodeId from, const Dsq& dsq) {
    bool forwarded = false;
    for (const auto& entry : contacts_[from].contacts) {
        const Path& leg = entry.source_path;
        if (send(leg) + 1 != leg.size())
            continue; // lost on a broken link
        forwarded = true;
        Dsq delivered = dsq;
        delivered.reply_path_accumulator = concat(dsq.reply_path_accumulator, leg);
        auto result = handle_dsq(entry.contact, delivered);
        if (std::holds_alternative<Reply>(result)) {
            send(reversed(leg));
            return result;
        }
    }
    if (forwarded)
        return Forwarded{};
    return NoAnswer{};
}

QueryOutcome resolve(const Topology& topo, std::span<const ContactState> contacts, LinkLayer& link,
                     NodeId source, NodeId target, int max_depth, std::uint64_t& next_query_id) {
    QueryOutcome out;
    if (auto route = topo.table(source).route_to(target)) {
        out.found = true;
        out.path = std::move(*route);
        return out;
    }
    for (int level = 1; level <= max_depth; ++level) {
        out.depth_used = level;
        DsqSession session(topo, contacts, link, source, next_query_id++);
        const Dsq dsq{target, level, next_query_id - 1, Path{source}};
        auto result = session.forward_to_contacts(source, dsq);
        out.hops += session.hops();
        if (auto* reply = std::get_if<Reply>(&result)) {
            out.found = true;
            out.path = std::move(reply->path);
            return out;
        }
    }
    return out;
}

NodeSet reachable_set(const Topology& topo, std::span<const ContactState> contacts, NodeId source,
                      int depth) {
    NodeSet reach = topo.table(source).members();
    reach.set(source);
    NodeSet expanded(topo.size());
    expanded.set(source);
    std::vector<NodeId> frontier{source};
    for (int level = 1; level <= depth && !frontier.empty(); ++level) {
        std::vector<NodeId> next;
        for (NodeId u : frontier) {
            for (const auto& entry : contacts[u].contacts) {
                const NodeId c = entry.contact;
                if (expanded.test(c))
                    continue;
                expanded.set(c);
                reach.set(c);
                reach |= topo.table(c).members();
                next.push_back(c);
            }
        }
        frontier = std::move(next);
    }
    return reach;
}

double analytic_reachability(const Topology& topo, std::span<const ContactState> contacts,
                             NodeId source, int depth) {
    if (topo.size() == 0)
        return 0.0;
    return static_cast<double>(reachable_set(topo, contacts, source, depth).count()) /
           static_cast<double>(topo.size());
}

std::vector<double> reachability_all(const Topology& topo, std::span<const ContactState> contacts,
                                     int depth, Exec exec) {
    std::vector<double> out(topo.size());
    for_each_index(topo.size(), exec, [&](std::size_t u) {
        out[u] = analytic_reachability(topo, contacts, static_cast<NodeId>(u), depth);
    });
    return out;
}

} // namespace card
