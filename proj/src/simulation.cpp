#include "card/simulation.hpp"

#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "card/baselines.hpp"

namespace card {

namespace {

constexpr std::uint64_t stream_protocol = 0x70726f74ULL;
constexpr std::uint64_t stream_pairs = 0x70616972ULL;

} // namespace

ContactParams contact_params(const ScenarioConfig& cfg, Method method) {
    return ContactParams{cfg.neighborhood_radius, cfg.max_contact_distance, cfg.max_contacts, method};
}

CardNetwork::CardNetwork(std::size_t node_count, ContactParams params, std::uint64_t seed,
                         MetricsLedger& ledger, Exec exec)
    : states_(node_count), params_(params), seed_(seed), ledger_(&ledger), exec_(exec) {}

void CardNetwork::collect(std::vector<std::vector<CensusRow>>& per_node) {
    for (auto& rows : per_node)
        census_.insert(census_.end(), rows.begin(), rows.end());
}

void CardNetwork::selection_round(double now) {
    const std::uint64_t round = ++round_;
    std::vector<std::vector<CensusRow>> rows(states_.size());
    for_each_index(states_.size(), exec_, [&](std::size_t i) {
        const auto node = static_cast<NodeId>(i);
        auto rng = make_rng(seed_, node, round);
        LinkLayer link(topo_->graph, *ledger_);
        for (const auto& c : select_contacts(node, states_[i], *topo_, params_, link, rng, now))
            rows[i].push_back({now, node, c.contact, hop_count(c.source_path), "selected"});
    });
    collect(rows);
}

void CardNetwork::maintenance_round(double now) {
    const std::uint64_t round = ++round_;
    std::vector<std::vector<CensusRow>> rows(states_.size());
    for_each_index(states_.size(), exec_, [&](std::size_t i) {
        const auto node = static_cast<NodeId>(i);
        auto rng = make_rng(seed_, node, round);
        LinkLayer link(topo_->graph, *ledger_);
        const auto report = validate_contacts(node, states_[i], *topo_, params_, link, rng, now);
        for (const auto& v : report.validated)
            rows[i].push_back({now, node, v.contact, hop_count(v.path), status_name(v.status)});
        for (const auto& c : report.replenished)
            rows[i].push_back({now, node, c.contact, hop_count(c.source_path), "selected"});
    });
    collect(rows);
}

std::vector<double> CardNetwork::reachability(int depth) const {
    return reachability_all(*topo_, states_, depth, exec_);
}

QueryOutcome CardNetwork::query(NodeId source, NodeId target, int max_depth) {
    LinkLayer link(topo_->graph, *ledger_);
    return resolve(*topo_, states_, link, source, target, max_depth, next_query_id_);
}

double CardNetwork::mean_contacts() const {
    if (states_.empty())
        return 0.0;
    std::size_t total = 0;
    for (const auto& s : states_)
        total += s.contacts.size();
    return static_cast<double>(total) / static_cast<double>(states_.size());
}

double RunResult::mean_reach() const {
    if (reach_time_avg.empty())
        return 0.0;
    return std::accumulate(reach_time_avg.begin(), reach_time_avg.end(), 0.0) /
           static_cast<double>(reach_time_avg.size());
}

std::vector<std::pair<NodeId, NodeId>> query_pairs(std::size_t node_count, int count,
                                                   std::uint64_t seed) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    if (node_count < 2)
        return pairs;
    auto rng = make_rng(seed, stream_pairs);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(node_count - 1));
    for (int i = 0; i < count; ++i) {
        const NodeId s = pick(rng);
        NodeId t = pick(rng);
        while (t == s)
            t = pick(rng);
        pairs.emplace_back(s, t);
    }
    return pairs;
}

RunResult run_simulation(const RunOptions& opts) {
    const ScenarioConfig& cfg = opts.config;
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.node_count);
    const std::uint64_t seed = cfg.rng_seed;

    RunResult res;
    res.config = cfg;
    res.method = opts.method;
    res.ledger = MetricsLedger(n);

    auto positions = place_nodes(cfg, seed);
    Topology topo(build_connectivity(positions, cfg.tx_range, 0.0), cfg.neighborhood_radius, opts.exec);
    res.initial_stats = graph_stats(topo.graph, opts.exec);

    CardNetwork card(n, contact_params(cfg, opts.method), derive_seed(seed, stream_protocol), res.ledger,
                     opts.exec);
    card.set_topology(topo);

    std::vector<double> reach_sum(n, 0.0);
    std::size_t samples = 0;
    auto sample = [&](double t) {
        if (opts.run_card) {
            const auto reach = card.reachability(cfg.max_depth);
            for (std::size_t i = 0; i < n; ++i)
                reach_sum[i] += reach[i];
            ++samples;
            res.reach_final = reach;
        }
        res.ledger.sample(t);
    };

    const double end = cfg.sim_duration;
    const double eps = 1e-9 * std::max(1.0, end);
    EventQueue events;
    if (opts.run_card)
        events.schedule(0.0, [&] { card.selection_round(0.0); });
    events.schedule(0.0, [&] { sample(0.0); });

    // Insertion order breaks ties: at equal times the snapshot comes first,
    // then maintenance, then sampling.
    std::vector<double> snapshot_times;
    for (int k = 1; k * cfg.snapshot_interval <= end + eps; ++k)
        snapshot_times.push_back(k * cfg.snapshot_interval);
    double last = 0.0;
    for (double t : snapshot_times) {
        const double dt = t - last;
        last = t;
        events.schedule(t, [&, t, dt] {
            if (opts.mobility)
                advance_mobility(positions, cfg, dt, seed, opts.exec);
            topo = Topology(build_connectivity(positions, cfg.tx_range, t), cfg.neighborhood_radius, opts.exec);
        });
    }
    if (opts.run_card) {
        for (int m = 1; m * cfg.validation_period <= end + eps; ++m) {
            const double t = m * cfg.validation_period;
            events.schedule(t, [&, t] { card.maintenance_round(t); });
        }
    }
    for (double t : snapshot_times)
        events.schedule(t, [&, t] { sample(t); });
    if (snapshot_times.empty() || snapshot_times.back() < end - eps)
        events.schedule(end, [&, end] { sample(end); });

    events.schedule(end, [&] {
        if (opts.query_count <= 0)
            return;
        const auto pairs = query_pairs(n, opts.query_count, derive_seed(seed, stream_pairs));
        const int zone_radius = opts.zone_radius > 0 ? opts.zone_radius : cfg.neighborhood_radius;
        std::optional<Topology> zone_topo;
        if (opts.run_baselines && zone_radius != topo.radius)
            zone_topo.emplace(topo.graph, zone_radius, opts.exec);
        const Topology& zones = zone_topo ? *zone_topo : topo;
        MetricsLedger baseline_ledger(n);
        LinkLayer baseline_link(topo.graph, baseline_ledger);

        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [s, t] = pairs[i];
            const bool connected = bfs_distances(topo.graph, s)[t] >= 0;
            if (opts.run_card) {
                const auto q = card.query(s, t, cfg.max_depth);
                res.queries.push_back({i, s, t, q.depth_used, q.hops, q.found, connected});
                res.comparison.push_back({"card", i, q.hops, q.found, connected});
            }
            if (opts.run_baselines) {
                const auto f = flood_query(topo.graph, s, t, baseline_link);
                res.comparison.push_back({"flood", i, f.transmissions, f.success, connected});
                const auto b = bordercast_query(zones, s, t, baseline_link);
                res.comparison.push_back({"bordercast", i, b.transmissions, b.success, connected});
            }
        }
    });

    events.run_until(end);

    res.reach_time_avg.assign(n, 0.0);
    if (samples > 0)
        for (std::size_t i = 0; i < n; ++i)
            res.reach_time_avg[i] = reach_sum[i] / static_cast<double>(samples);
    res.mean_contacts_final = card.mean_contacts();
    res.census = card.census();
    return res;
}

void write_reachability_csv(std::ostream& out, const RunResult& r, int run_id) {
    out << "run_id,node_id,reach_fraction\n";
    for (std::size_t i = 0; i < r.reach_time_avg.size(); ++i)
        fmt::print(out, "{},{},{}\n", run_id, i, r.reach_time_avg[i]);
}

void write_census_csv(std::ostream& out, const RunResult& r) {
    out << "time_s,node_id,contact_id,path_len,status\n";
    for (const auto& c : r.census)
        fmt::print(out, "{},{},{},{},{}\n", c.time_s, c.node, c.contact, c.path_len, c.status);
}

void write_queries_csv(std::ostream& out, const RunResult& r) {
    out << "query_id,source,target,depth_used,hops,success\n";
    for (const auto& q : r.queries)
        fmt::print(out, "{},{},{},{},{},{}\n", q.query_id, q.source, q.target, q.depth_used, q.hops,
                   q.success ? 1 : 0);
}

void write_comparison_csv(std::ostream& out, const RunResult& r) {
    out << "scheme,query_id,transmissions,success\n";
    for (const auto& c : r.comparison)
        fmt::print(out, "{},{},{},{}\n", c.scheme, c.query_id, c.transmissions, c.success ? 1 : 0);
}

std::vector<SchemeSummary> summarize_comparison(const RunResult& r) {
    std::vector<SchemeSummary> rows;
    const double n = static_cast<double>(r.config.node_count);
    for (std::string_view scheme : {"card", "flood", "bordercast"}) {
        SchemeSummary s;
        s.scheme = scheme;
        std::uint64_t tx = 0;
        std::size_t ok = 0, connected = 0, ok_connected = 0;
        for (const auto& c : r.comparison) {
            if (c.scheme != scheme)
                continue;
            ++s.queries;
            tx += c.transmissions;
            ok += c.success;
            connected += c.connected;
            ok_connected += c.success && c.connected;
        }
        if (s.queries == 0)
            continue;
        s.query_traffic_per_node = static_cast<double>(tx) / n;
        s.success_rate = static_cast<double>(ok) / static_cast<double>(s.queries);
        s.success_rate_connected =
            connected == 0 ? 0.0 : static_cast<double>(ok_connected) / static_cast<double>(connected);
        s.unreachable_pairs = s.queries - connected;
        if (scheme == "card")
            s.selection_maintenance_per_node = r.ledger.per_node(Category::selection_csq) +
                                               r.ledger.per_node(Category::backtrack) +
                                               r.ledger.per_node(Category::maintenance);
        rows.push_back(std::move(s));
    }
    return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SchemeSummary>& rows) {
    out << "scheme,queries,query_traffic_per_node,success_rate,success_rate_connected,unreachable_pairs,"
           "selection_maintenance_per_node\n";
    for (const auto& s : rows)
        fmt::print(out, "{},{},{},{},{},{},{}\n", s.scheme, s.queries, s.query_traffic_per_node,
                   s.success_rate, s.success_rate_connected, s.unreachable_pairs,
                   s.selection_maintenance_per_node);
}

} // namespace card
