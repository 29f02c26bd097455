#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "card/neighborhood.hpp"
#include "card/simcore.hpp"
#include "card/types.hpp"

namespace card {

/// Contact-selection method: probabilistic with either acceptance curve, or
/// the edge method.
enum class Method { pm1, pm2, em };

std::string_view method_name(Method m);
/// Accepts "pm1", "pm2", "em" (case-insensitive); throws ConfigError otherwise.
Method parse_method(std::string_view text);

enum class PmVariant { eq1, eq2 };

/// Acceptance probability at hop count d, clamped to [0, 1].
///   eq1: (d - R) / (r - R)      zero at d = R, one at d = r
///   eq2: (d - 2R) / (r - 2R)    zero at d = 2R, one at d = r
/// Throws std::invalid_argument when r does not exceed R (eq1) or 2R (eq2).
double pm_probability(int d, int radius, int max_distance, PmVariant variant);

struct ContactParams {
    int radius = 3;        // R
    int max_distance = 20; // r
    int max_contacts = 6;  // NoC
    Method method = Method::em;

    /// Inclusive hop-length band a contact path must satisfy after validation.
    int min_path() const { return 2 * radius + 1; }
    int max_path() const { return max_distance; }
};

struct ContactEntry {
    NodeId contact = 0;
    Path source_path; // source ... contact
    double selected_at = 0.0;
    double last_validated = 0.0;

    bool operator==(const ContactEntry&) const = default;
};

/// Per-node contact state, owned by that node.
struct ContactState {
    std::vector<ContactEntry> contacts;
    std::uint32_t issued_queries = 0;

    std::vector<NodeId> contact_ids() const;
};

/// Contact Selection Query carried through the depth-first walk.
struct Csq {
    NodeId source = 0;
    std::uint64_t query_id = 0;
    std::vector<NodeId> contact_list;
    std::vector<NodeId> edge_list; // EM only
    Path traversal_stack;          // source ... current
    NodeSet visited;
    bool returning = false; // arrived by backtrack: acceptance already decided here

    /// Nodes whose presence in a candidate's neighborhood (or as the
    /// candidate) rules it out: source, contact_list and, for EM, edge_list.
    NodeSet excluded;

    int hop_count() const { return card::hop_count(traversal_stack); }
    NodeId current() const { return traversal_stack.back(); }
};

/// Builds the CSQ as it arrives at an edge node over the source's route.
Csq make_csq(NodeId source, std::uint64_t query_id, std::span<const NodeId> contact_list,
             const NeighborhoodTable& source_table, NodeId edge_node, Method method);

/// True iff neither the candidate nor any member of its neighborhood is the
/// source, a listed contact, or a listed edge node.
bool em_accept(const NeighborhoodTable& candidate, const Csq& csq);

struct BecomeContact {};
struct Forward {
    NodeId next;
};
struct Backtrack {};
using CsqDecision = std::variant<BecomeContact, Forward, Backtrack>;

/// One decision at csq.current(). Acceptance is tested only on forward
/// arrival; forwarding picks a uniformly random unvisited neighbor while the
/// hop count is below r.
CsqDecision csq_step(const Topology& topo, const Csq& csq, const ContactParams& params, Rng& rng);

/// Issues CSQs through the source's edge nodes (ascending id, one at a time)
/// until NoC contacts are held or edge nodes run out. Contacts already in
/// `state` seed the Contact_List; new ones are appended to it and returned.
/// Forward hops and returned paths are charged to selection_csq, backtracking
/// to backtrack.
std::vector<ContactEntry> select_contacts(NodeId source, ContactState& state, const Topology& topo,
                                          const ContactParams& params, LinkLayer& link, Rng& rng,
                                          double now);

/// Splices the detector's table route around a broken hop. Scans
/// path[break_index + 1 ..] in order and reroutes to the first node found in
/// the detector's neighborhood. nullopt when no later path node is a member.
/// Precondition: detector.owner() == path[break_index].
std::optional<Path> local_recovery(const NeighborhoodTable& detector, const Path& path,
                                   std::size_t break_index);

/// Removes cycles from a walk, keeping the first and last node.
Path erase_loops(const Path& walk);

enum class ContactStatus { valid, lost_broken, lost_range };
std::string_view status_name(ContactStatus s);

struct ValidationResult {
    NodeId contact = 0;
    ContactStatus status = ContactStatus::valid;
    Path path; // validated path when valid, stored path otherwise
    int recoveries = 0;
};

/// Walks one stored path with a validation message, repairing breaks by
/// local recovery. The acknowledgement (or error) returns to the source.
/// All hops are charged to maintenance.
ValidationResult validate_contact(NodeId source, const ContactEntry& entry, const Topology& topo,
                                  const ContactParams& params, LinkLayer& link);

struct MaintenanceReport {
    std::vector<ValidationResult> validated;
    std::vector<ContactEntry> replenished;
};

/// Full maintenance round: validates every contact, drops lost ones, then
/// selects replacements for the deficit below NoC.
MaintenanceReport validate_contacts(NodeId source, ContactState& state, const Topology& topo,
                                    const ContactParams& params, LinkLayer& link, Rng& rng,
                                    double now);

/// True iff every consecutive pair of `path` is linked in `graph`.
bool is_valid_walk(const ConnectivityGraph& graph, const Path& path);

} // namespace card
