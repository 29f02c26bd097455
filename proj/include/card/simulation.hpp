#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "card/contacts.hpp"
#include "card/neighborhood.hpp"
#include "card/parallel.hpp"
#include "card/query.hpp"
#include "card/scenario.hpp"
#include "card/simcore.hpp"

namespace card {

ContactParams contact_params(const ScenarioConfig& cfg, Method method);

struct CensusRow {
    double time_s = 0.0;
    NodeId node = 0;
    NodeId contact = 0;
    int path_len = 0;
    std::string_view status; // selected | valid | lost_broken | lost_range

    bool operator==(const CensusRow&) const = default;
};

/// CARD protocol state for every node over the current topology. Rounds run
/// the per-node procedures for all nodes as one data-parallel kernel; each
/// node draws from its own stream keyed by (seed, node, round) and charges
/// only its own ledger row, so results do not depend on the thread count.
class CardNetwork {
public:
    CardNetwork(std::size_t node_count, ContactParams params, std::uint64_t seed, MetricsLedger& ledger,
                Exec exec = Exec::parallel);

    void set_topology(const Topology& topo) { topo_ = &topo; }
    const Topology& topology() const { return *topo_; }

    /// Contact selection for every node up to NoC.
    void selection_round(double now);
    /// Validation of every node's contacts, followed by replenishment.
    void maintenance_round(double now);

    std::vector<double> reachability(int depth) const;
    QueryOutcome query(NodeId source, NodeId target, int max_depth);

    const std::vector<ContactState>& states() const { return states_; }
    std::vector<ContactState>& states() { return states_; }
    const ContactParams& params() const { return params_; }
    const std::vector<CensusRow>& census() const { return census_; }
    double mean_contacts() const;

private:
    void collect(std::vector<std::vector<CensusRow>>& per_node);

    const Topology* topo_ = nullptr;
    std::vector<ContactState> states_;
    ContactParams params_;
    std::uint64_t seed_;
    MetricsLedger* ledger_;
    Exec exec_;
    std::uint64_t round_ = 0;
    std::uint64_t next_query_id_ = 1;
    std::vector<CensusRow> census_;
};

struct RunOptions {
    ScenarioConfig config;
    Method method = Method::em;
    bool run_card = true;
    bool run_baselines = false;
    bool mobility = true;
    int query_count = 0;
    int zone_radius = 0; // 0: use R
    Exec exec = Exec::parallel;
};

struct QueryRecord {
    std::uint64_t query_id = 0;
    NodeId source = 0;
    NodeId target = 0;
    int depth_used = 0;
    std::uint64_t hops = 0;
    bool success = false;
    bool connected = false; // target in the source's connected component
};

struct ComparisonRecord {
    std::string_view scheme; // card | flood | bordercast
    std::uint64_t query_id = 0;
    std::uint64_t transmissions = 0;
    bool success = false;
    bool connected = false;
};

struct RunResult {
    ScenarioConfig config;
    Method method = Method::em;
    MetricsLedger ledger;
    GraphStats initial_stats;
    std::vector<double> reach_time_avg; // per node
    std::vector<double> reach_final;    // per node
    double mean_contacts_final = 0.0;
    std::vector<CensusRow> census;
    std::vector<QueryRecord> queries;
    std::vector<ComparisonRecord> comparison;

    double mean_reach() const;
};

/// One simulation: placement, selection at t = 0, a snapshot every
/// snapshot_interval (mobility, tables, reachability sample, ledger sample),
/// a maintenance round every validation_period, and query_count random
/// queries on the final snapshot.
RunResult run_simulation(const RunOptions& opts);

/// Random (source, target) pairs with source != target.
std::vector<std::pair<NodeId, NodeId>> query_pairs(std::size_t node_count, int count,
                                                   std::uint64_t seed);

void write_reachability_csv(std::ostream& out, const RunResult& r, int run_id);
void write_census_csv(std::ostream& out, const RunResult& r);
void write_queries_csv(std::ostream& out, const RunResult& r);
void write_comparison_csv(std::ostream& out, const RunResult& r);

struct SchemeSummary {
    std::string scheme;
    std::size_t queries = 0;
    double query_traffic_per_node = 0.0;
    double success_rate = 0.0;
    double success_rate_connected = 0.0;
    std::size_t unreachable_pairs = 0;
    double selection_maintenance_per_node = 0.0; // CARD only
};

std::vector<SchemeSummary> summarize_comparison(const RunResult& r);
void write_summary_csv(std::ostream& out, const std::vector<SchemeSummary>& rows);

} // namespace card
