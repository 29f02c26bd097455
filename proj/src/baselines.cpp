#include "card/baselines.hpp"

#include <deque>

namespace card {

BaselineOutcome flood_query(const ConnectivityGraph& graph, NodeId source, NodeId target,
                            LinkLayer& link) {
    BaselineOutcome out;
    if (source == target) {
        out.success = true;
        return out;
    }
    NodeSet heard(graph.size());
    heard.set(source);
    std::vector<NodeId> queue{source};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        link.broadcast(u, Category::baseline, source);
        ++out.transmissions;
        for (NodeId v : graph.neighbors(u)) {
            if (heard.test(v))
                continue;
            heard.set(v);
            if (v == target) {
                out.success = true;
                return out;
            }
            queue.push_back(v);
        }
    }
    return out;
}

BaselineOutcome bordercast_query(const Topology& zones, NodeId source, NodeId target, LinkLayer& link,
                                 BordercastState* trace) {
    BaselineOutcome out;
    const std::size_t n = zones.size();
    BordercastState local;
    BordercastState& st = trace ? *trace : local;
    st.zone_radius = zones.radius;
    st.covered.clear();
    st.covered.resize(n);
    st.bordercasters.clear();

    auto detects = [&](NodeId w) { return w == target || zones.table(w).contains(target); };
    if (detects(source)) {
        out.success = true;
        return out;
    }

    NodeSet queued(n);
    std::deque<NodeId> pending{source};
    queued.set(source);
    while (!pending.empty()) {
        const NodeId b = pending.front();
        pending.pop_front();
        if (b != source && st.covered.test(b))
            continue;
        st.covered.set(b);
        st.bordercasters.push_back(b);

        const auto& zone = zones.table(b);
        std::vector<NodeId> recipients;
        for (NodeId p : zone.edge_nodes())
            if (!st.covered.test(p) && !queued.test(p))
                recipients.push_back(p);
        if (recipients.empty())
            continue;

        NodeSet is_recipient(n);
        for (NodeId p : recipients)
            is_recipient.set(p);
        const NodeSet covered_before = st.covered;
        // The routes form a tree rooted at b; one unicast per tree edge
        // carries the query toward every recipient below it.
        NodeSet sent(n);
        for (NodeId p : recipients) {
            const Path route = zone.route_to(p).value();
            bool delivered = true;
            for (std::size_t i = 0; i + 1 < route.size(); ++i) {
                const NodeId u = route[i];
                const NodeId v = route[i + 1];
                if (!sent.test(v)) {
                    sent.set(v);
                    link.transmit(u, v, Category::baseline, source);
                    ++out.transmissions;
                    st.covered.set(u); // QD1
                    for (NodeId w : zones.graph.neighbors(u))
                        if (!is_recipient.test(w))
                            st.covered.set(w); // QD2
                }
                // A relay that detected the query in an earlier round drops it.
                if (v != p && covered_before.test(v)) {
                    delivered = false;
                    break;
                }
            }
            if (!delivered)
                continue;
            if (detects(p)) {
                out.success = true;
                return out;
            }
        }
        for (NodeId p : recipients) {
            queued.set(p);
            pending.push_back(p);
        }
    }
    return out;
}

} // namespace card
