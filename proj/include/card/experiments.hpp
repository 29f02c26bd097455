#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "card/scenario.hpp"
#include "card/simulation.hpp"

namespace card {

/// A batch of runs: one per (value, seed, scheme).
struct SweepSpec {
    std::string sweep_id = "sweep";
    ScenarioConfig base;
    std::string swept_parameter = "NoC"; // R, r, NoC, D, N or any scenario key
    std::vector<std::string> values;
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::string> schemes{"CARD-EM"};
    int query_count = 0;
    bool mobility = true;

    /// Configuration for one point of the sweep (not validated).
    ScenarioConfig derived(std::string_view value, std::uint64_t seed) const;

    /// Throws ConfigError unless every derived configuration is valid.
    void validate() const;
};

/// Scenario key behind a swept parameter name ("R" -> neighborhood_radius).
std::string swept_key(std::string_view parameter);

bool is_card_scheme(std::string_view scheme);
/// Contact-selection method of a CARD scheme; CARD-PM selects with the 2R-based probability.
Method scheme_method(std::string_view scheme);

/// Parses key=value sweep text: scenario keys plus sweep_id, param, values,
/// seeds, schemes, queries and mobility. Lists are comma separated.
SweepSpec parse_sweep(std::string_view text);
SweepSpec load_sweep_file(const std::filesystem::path& file);
/// Canonical text that parse_sweep reads back to the same spec.
std::string to_text(const SweepSpec& spec);

struct SweepRow {
    std::string sweep_id;
    std::string scheme;
    std::string param;
    std::string value;
    std::uint64_t seed = 0;
    std::string metric;
    double metric_value = 0.0;
};

/// Runs every (value, seed, scheme) point. Up to `parallel` runs execute at
/// once; rows come back in spec order regardless. A run that throws is
/// recorded as a single "failed" row and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int parallel = 1);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct TradeoffPoint {
    std::string scheme;
    std::string value;
    double reach_percent = 0.0;
    double overhead_per_node = 0.0; // selection + backtrack + maintenance
    bool meets_target = false;      // reach_percent >= 50
};

/// One point per CARD (scheme, value), averaged over seeds, in first-seen order.
std::vector<TradeoffPoint> tradeoff_report(const std::vector<SweepRow>& rows);

/// Points not dominated by any other (less overhead and more reach), sorted
/// by overhead.
std::vector<TradeoffPoint> pareto_frontier(std::vector<TradeoffPoint> points);

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffPoint>& points);

} // namespace card
