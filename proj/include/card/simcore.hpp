#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "card/types.hpp"

namespace card {

struct ConnectivityGraph;

/// Overhead categories. Every transmission is charged to exactly one.
enum class Category : std::uint8_t { selection_csq, backtrack, maintenance, query, baseline };
inline constexpr std::size_t category_count = 5;
inline constexpr std::array<Category, category_count> all_categories = {
    Category::selection_csq, Category::backtrack, Category::maintenance, Category::query,
    Category::baseline};

std::string_view category_name(Category c);

/// Per-hop latency; only event ordering depends on it.
inline constexpr double hop_latency = 0.001;

class EventQueue {
public:
    using Action = std::function<void()>;

    struct Handle {
        std::uint64_t sequence;
    };

    /// Rejects fire times earlier than the current clock.
    Handle schedule(double fire_time, Action action);
    Handle schedule_after(double delay, Action action) { return schedule(now_ + delay, std::move(action)); }

    /// Executes every event with fire_time <= t in (fire_time, sequence)
    /// order, including events scheduled by those events, then sets now() = t.
    void run_until(double t);

    double now() const { return now_; }
    std::size_t pending() const { return heap_.size(); }

private:
    struct Event {
        double fire_time;
        std::uint64_t sequence;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_time != b.fire_time)
                return a.fire_time > b.fire_time;
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_sequence_ = 0;
    double now_ = 0.0;
};

/// Message-hop counters per originating node and category. Counters only
/// grow. Concurrent writers are safe as long as they charge distinct nodes.
class MetricsLedger {
public:
    explicit MetricsLedger(std::size_t node_count = 0) : rows_(node_count) {}

    void charge(NodeId origin, Category c, std::uint64_t hops = 1) {
        rows_[origin][static_cast<std::size_t>(c)] += hops;
    }

    std::uint64_t node_count(NodeId node, Category c) const {
        return rows_[node][static_cast<std::size_t>(c)];
    }
    std::uint64_t total(Category c) const;
    std::size_t nodes() const { return rows_.size(); }

    /// total(c) / nodes()
    double per_node(Category c) const;

    /// Appends cumulative counts at time t to the time series.
    void sample(double t);

    /// Writes the sampled series as CSV (time_s,node_id,category,count);
    /// zero counters are omitted.
    void write_csv(std::ostream& out) const;

    bool operator==(const MetricsLedger&) const = default;

private:
    using Row = std::array<std::uint64_t, category_count>;
    std::vector<Row> rows_;
    std::vector<std::pair<double, std::vector<Row>>> series_;
};

/// Ideal delivery over the current connectivity snapshot: a transmission
/// succeeds iff the link exists. Successful hops are charged to the origin.
class LinkLayer {
public:
    LinkLayer(const ConnectivityGraph& graph, MetricsLedger& ledger) : graph_(&graph), ledger_(&ledger) {}

    /// Charges one hop and returns true, or returns false (no charge) when
    /// `to` is not adjacent to `from`.
    bool transmit(NodeId from, NodeId to, Category c, NodeId origin);

    /// One local broadcast from `from`; charged once regardless of receivers.
    void broadcast([[maybe_unused]] NodeId from, Category c, NodeId origin) { ledger_->charge(origin, c); }

    /// Relays along `path` hop by hop. Returns the index of the last node the
    /// message reached (path.size()-1 on full delivery).
    std::size_t relay(const Path& path, Category c, NodeId origin);

    const ConnectivityGraph& graph() const { return *graph_; }
    MetricsLedger& ledger() { return *ledger_; }

private:
    const ConnectivityGraph* graph_;
    MetricsLedger* ledger_;
};

/// Couples the event queue with the link layer so that a transmission
/// becomes a delivery event one hop latency later.
class Simulator {
public:
    Simulator(const ConnectivityGraph& graph, MetricsLedger& ledger) : link_(graph, ledger) {}

    /// Schedules on_delivery at now + hop_latency, or calls on_drop right away
    /// when the link is absent.
    std::optional<EventQueue::Handle> transmit(NodeId from, NodeId to, Category c, NodeId origin,
                                               EventQueue::Action on_delivery,
                                               EventQueue::Action on_drop = {});

    EventQueue& events() { return events_; }
    LinkLayer& link() { return link_; }
    void set_graph(const ConnectivityGraph& graph) { link_ = LinkLayer(graph, link_.ledger()); }

private:
    EventQueue events_;
    LinkLayer link_;
};

} // namespace card
