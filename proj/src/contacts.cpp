#include "card/contacts.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "card/scenario.hpp"

namespace card {

namespace {

bool overlaps(const NeighborhoodTable& candidate, const NodeSet& excluded) {
    return excluded.test(candidate.owner()) || candidate.members().intersects(excluded);
}

PmVariant variant_of(Method m) { return m == Method::pm1 ? PmVariant::eq1 : PmVariant::eq2; }

Path reversed(const Path& p, std::size_t last_index) {
    Path r(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(last_index) + 1);
    std::reverse(r.begin(), r.end());
    return r;
}

} // namespace

std::string_view method_name(Method m) {
    switch (m) {
    case Method::pm1: return "pm1";
    case Method::pm2: return "pm2";
    case Method::em: return "em";
    }
    return "em";
}

Method parse_method(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "pm1")
        return Method::pm1;
    if (lower == "pm2" || lower == "pm")
        return Method::pm2;
    if (lower == "em")
        return Method::em;
    throw ConfigError(fmt::format("unknown method '{}' (expected pm1, pm2 or em)", text));
}

double pm_probability(int d, int radius, int max_distance, PmVariant variant) {
    const int floor = variant == PmVariant::eq1 ? radius : 2 * radius;
    if (max_distance <= floor)
        throw std::invalid_argument(variant == PmVariant::eq1 ? "r must exceed R" : "r must exceed 2R");
    const double p = static_cast<double>(d - floor) / static_cast<double>(max_distance - floor);
    return std::clamp(p, 0.0, 1.0);
}

std::vector<NodeId> ContactState::contact_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(contacts.size());
    for (const auto& c : contacts)
        ids.push_back(c.contact);
    return ids;
}

Csq make_csq(NodeId source, std::uint64_t query_id, std::span<const NodeId> contact_list,
             const NeighborhoodTable& source_table, NodeId edge_node, Method method) {
    const std::size_t n = source_table.members().size();
    Csq q;
    q.source = source;
    q.query_id = query_id;
    q.contact_list.assign(contact_list.begin(), contact_list.end());
    q.excluded.resize(n);
    q.excluded.set(source);
    for (NodeId c : contact_list)
        q.excluded.set(c);
    if (method == Method::em) {
        q.edge_list = source_table.edge_nodes();
        for (NodeId e : q.edge_list)
            q.excluded.set(e);
    }
    q.traversal_stack = source_table.route_to(edge_node).value();
    q.visited.resize(n);
    for (NodeId v : q.traversal_stack)
        q.visited.set(v);
    return q;
}

bool em_accept(const NeighborhoodTable& candidate, const Csq& csq) {
    return !overlaps(candidate, csq.excluded);
}

CsqDecision csq_step(const Topology& topo, const Csq& csq, const ContactParams& params, Rng& rng) {
    const NodeId here = csq.current();
    if (!csq.returning) {
        // The PM excluded set carries only source and Contact_List, so this
        // single test is the EM acceptance and the PM overlap precheck.
        if (!overlaps(topo.table(here), csq.excluded)) {
            if (params.method == Method::em)
                return BecomeContact{};
            const double p = pm_probability(csq.hop_count(), params.radius, params.max_distance,
                                            variant_of(params.method));
            if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p)
                return BecomeContact{};
        }
    }
    if (csq.hop_count() < params.max_distance) {
        std::vector<NodeId> open;
        for (NodeId v : topo.graph.neighbors(here))
            if (!csq.visited.test(v))
                open.push_back(v);
        if (!open.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
            return Forward{open[pick(rng)]};
        }
    }
    return Backtrack{};
}

std::vector<ContactEntry> select_contacts(NodeId source, ContactState& state, const Topology& topo,
                                          const ContactParams& params, LinkLayer& link, Rng& rng,
                                          double now) {
    std::vector<ContactEntry> added;
    const auto& table = topo.table(source);
    for (NodeId edge : table.edge_nodes()) {
        if (state.contacts.size() >= static_cast<std::size_t>(params.max_contacts))
            break;
        const auto ids = state.contact_ids();
        const std::uint64_t query_id = (std::uint64_t{source} << 32) | state.issued_queries++;
        Csq csq = make_csq(source, query_id, ids, table, edge, params.method);
        const std::size_t root_depth = csq.traversal_stack.size();
        link.relay(csq.traversal_stack, Category::selection_csq, source);

        bool selected = false;
        while (true) {
            const auto decision = csq_step(topo, csq, params, rng);
            if (std::holds_alternative<BecomeContact>(decision)) {
                selected = true;
                break;
            }
            if (const auto* fwd = std::get_if<Forward>(&decision)) {
                link.transmit(csq.current(), fwd->next, Category::selection_csq, source);
                csq.traversal_stack.push_back(fwd->next);
                csq.visited.set(fwd->next);
                csq.returning = false;
                continue;
            }
            if (csq.traversal_stack.size() == root_depth) {
                // Exhausted below this edge node: the query returns to the source.
                link.relay(reversed(csq.traversal_stack, root_depth - 1), Category::backtrack, source);
                break;
            }
            const NodeId from = csq.current();
            csq.traversal_stack.pop_back();
            link.transmit(from, csq.current(), Category::backtrack, source);
            csq.returning = true;
        }
        if (!selected)
            continue;

        // The accepted path travels back to the source, which stores it.
        link.relay(reversed(csq.traversal_stack, csq.traversal_stack.size() - 1), Category::selection_csq,
                   source);
        ContactEntry entry{csq.current(), csq.traversal_stack, now, now};
        state.contacts.push_back(entry);
        added.push_back(std::move(entry));
    }
    return added;
}

std::optional<Path> local_recovery(const NeighborhoodTable& detector, const Path& path,
                                   std::size_t break_index) {
    for (std::size_t j = break_index + 1; j < path.size(); ++j) {
        Path route;
        if (path[j] == detector.owner()) {
            route = {path[j]};
        } else if (auto r = detector.route_to(path[j])) {
            route = std::move(*r);
        } else {
            continue;
        }
        Path repaired(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(break_index));
        repaired.insert(repaired.end(), route.begin(), route.end());
        repaired.insert(repaired.end(), path.begin() + static_cast<std::ptrdiff_t>(j) + 1, path.end());
        return repaired;
    }
    return std::nullopt;
}

Path erase_loops(const Path& walk) {
    Path out;
    out.reserve(walk.size());
    for (NodeId v : walk) {
        if (auto it = std::find(out.begin(), out.end(), v); it != out.end())
            out.erase(it + 1, out.end());
        else
            out.push_back(v);
    }
    return out;
}

std::string_view status_name(ContactStatus s) {
    switch (s) {
    case ContactStatus::valid: return "valid";
    case ContactStatus::lost_broken: return "lost_broken";
    case ContactStatus::lost_range: return "lost_range";
    }
    return "valid";
}

bool is_valid_walk(const ConnectivityGraph& graph, const Path& path) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (!graph.adjacent(path[i], path[i + 1]))
            return false;
    return true;
}

ValidationResult validate_contact(NodeId source, const ContactEntry& entry, const Topology& topo,
                                  const ContactParams& params, LinkLayer& link) {
    ValidationResult result{entry.contact, ContactStatus::lost_broken, entry.source_path, 0};
    Path walk = entry.source_path;
    if (walk.size() < 2 || walk.front() != source)
        return result;

    std::size_t at = 0;
    while (at + 1 < walk.size()) {
        if (link.transmit(walk[at], walk[at + 1], Category::maintenance, source)) {
            ++at;
            continue;
        }
        auto repaired = local_recovery(topo.table(walk[at]), walk, at);
        if (!repaired) {
            link.relay(reversed(walk, at), Category::maintenance, source);
            return result;
        }
        walk = std::move(*repaired);
        ++result.recoveries;
    }

    Path validated = erase_loops(walk);
    link.relay(reversed(validated, validated.size() - 1), Category::maintenance, source);
    const int hops = hop_count(validated);
    result.status = hops >= params.min_path() && hops <= params.max_path() ? ContactStatus::valid
                                                                            : ContactStatus::lost_range;
    result.path = std::move(validated);
    return result;
}

MaintenanceReport validate_contacts(NodeId source, ContactState& state, const Topology& topo,
                                    const ContactParams& params, LinkLayer& link, Rng& rng,
                                    double now) {
    MaintenanceReport report;
    std::vector<ContactEntry> kept;
    for (const auto& entry : state.contacts) {
        auto result = validate_contact(source, entry, topo, params, link);
        if (result.status == ContactStatus::valid) {
            ContactEntry updated = entry;
            updated.source_path = result.path;
            updated.last_validated = now;
            kept.push_back(std::move(updated));
        }
        report.validated.push_back(std::move(result));
    }
    state.contacts = std::move(kept);
    report.replenished = select_contacts(source, state, topo, params, link, rng, now);
    return report;
}

} // namespace card
