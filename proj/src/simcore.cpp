#include "card/simcore.hpp"

#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "card/scenario.hpp"

namespace card {

std::string_view category_name(Category c) {
    switch (c) {
    case Category::selection_csq: return "selection_csq";
    case Category::backtrack: return "backtrack";
    case Category::maintenance: return "maintenance";
    case Category::query: return "query";
    case Category::baseline: return "baseline";
    }
    return "unknown";
}

EventQueue::Handle EventQueue::schedule(double fire_time, Action action) {
    if (fire_time < now_)
        throw std::invalid_argument(fmt::format("cannot schedule at {} before current time {}", fire_time, now_));
    const Handle h{next_sequence_++};
    heap_.push(Event{fire_time, h.sequence, std::move(action)});
    return h;
}

void EventQueue::run_until(double t) {
    while (!heap_.empty() && heap_.top().fire_time <= t) {
        // Copy out before pop: the action may schedule and reallocate the heap.
        Event ev = heap_.top();
        heap_.pop();
        now_ = ev.fire_time;
        if (ev.action)
            ev.action();
    }
    if (t > now_)
        now_ = t;
}

std::uint64_t MetricsLedger::total(Category c) const {
    std::uint64_t sum = 0;
    for (const auto& row : rows_)
        sum += row[static_cast<std::size_t>(c)];
    return sum;
}

double MetricsLedger::per_node(Category c) const {
    return rows_.empty() ? 0.0 : static_cast<double>(total(c)) / static_cast<double>(rows_.size());
}

void MetricsLedger::sample(double t) { series_.emplace_back(t, rows_); }

void MetricsLedger::write_csv(std::ostream& out) const {
    out << "time_s,node_id,category,count\n";
    for (const auto& [t, rows] : series_) {
        for (std::size_t node = 0; node < rows.size(); ++node) {
            for (Category c : all_categories) {
                const auto count = rows[node][static_cast<std::size_t>(c)];
                if (count != 0)
                    fmt::print(out, "{},{},{},{}\n", t, node, category_name(c), count);
            }
        }
    }
}

bool LinkLayer::transmit(NodeId from, NodeId to, Category c, NodeId origin) {
    if (!graph_->adjacent(from, to))
        return false;
    ledger_->charge(origin, c);
    return true;
}

std::size_t LinkLayer::relay(const Path& path, Category c, NodeId origin) {
    std::size_t at = 0;
    while (at + 1 < path.size() && transmit(path[at], path[at + 1], c, origin))
        ++at;
    return at;
}

std::optional<EventQueue::Handle> Simulator::transmit(NodeId from, NodeId to, Category c, NodeId origin,
                                                      EventQueue::Action on_delivery,
                                                      EventQueue::Action on_drop) {
    if (!link_.transmit(from, to, c, origin)) {
        if (on_drop)
            on_drop();
        return std::nullopt;
    }
    return events_.schedule_after(hop_latency, std::move(on_delivery));
}

} // namespace card
