#include "card/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace card {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> items;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty())
            items.emplace_back(item);
        if (comma == std::string_view::npos)
            break;
        text = text.substr(comma + 1);
    }
    return items;
}

std::uint64_t parse_u64(std::string_view text, std::string_view key) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError(fmt::format("invalid value '{}' for key '{}'", text, key));
    return v;
}

// "a..b" expands to every integer in [a, b].
std::vector<std::uint64_t> parse_seeds(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(text)) {
        const std::string_view s = item;
        if (const auto dots = s.find(".."); dots != std::string_view::npos) {
            const auto lo = parse_u64(trim(s.substr(0, dots)), "seeds");
            const auto hi = parse_u64(trim(s.substr(dots + 2)), "seeds");
            if (hi < lo)
                throw ConfigError(fmt::format("invalid seed range '{}'", item));
            for (auto v = lo; v <= hi; ++v)
                seeds.push_back(v);
        } else {
            seeds.push_back(parse_u64(s, "seeds"));
        }
    }
    return seeds;
}

std::string join(const auto& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty())
            out += ',';
        out += fmt::format("{}", item);
    }
    return out;
}

const std::vector<std::string>& known_schemes() {
    static const std::vector<std::string> s = {"CARD-PM", "CARD-PM1", "CARD-PM2", "CARD-EM", "flood",
                                               "bordercast"};
    return s;
}

struct RunPoint {
    std::size_t value_index;
    std::uint64_t seed;
    std::size_t scheme_index;
};

std::vector<std::pair<std::string, double>> run_point(const SweepSpec& spec, const RunPoint& pt,
                                                      Exec exec) {
    const std::string& scheme = spec.schemes[pt.scheme_index];
    RunOptions opts;
    opts.config = spec.derived(spec.values[pt.value_index], pt.seed);
    opts.mobility = spec.mobility;
    opts.query_count = spec.query_count;
    opts.exec = exec;
    opts.run_card = is_card_scheme(scheme);
    opts.run_baselines = !opts.run_card;
    if (opts.run_card)
        opts.method = scheme_method(scheme);
    else if (opts.query_count <= 0)
        opts.query_count = 50;

    const RunResult res = run_simulation(opts);
    std::vector<std::pair<std::string, double>> metrics;
    const std::string_view summary_name = opts.run_card ? std::string_view{"card"} : std::string_view{scheme};
    if (opts.run_card) {
        double final_mean = 0.0;
        for (double r : res.reach_final)
            final_mean += r;
        if (!res.reach_final.empty())
            final_mean /= static_cast<double>(res.reach_final.size());
        metrics.emplace_back("reach_mean", res.mean_reach());
        metrics.emplace_back("reach_final_mean", final_mean);
        metrics.emplace_back("contacts_mean", res.mean_contacts_final);
        metrics.emplace_back("selection_per_node", res.ledger.per_node(Category::selection_csq));
        metrics.emplace_back("backtrack_per_node", res.ledger.per_node(Category::backtrack));
        metrics.emplace_back("maintenance_per_node", res.ledger.per_node(Category::maintenance));
    }
    for (const auto& s : summarize_comparison(res)) {
        if (s.scheme != summary_name)
            continue;
        metrics.emplace_back("query_per_node", s.query_traffic_per_node);
        metrics.emplace_back("query_success_rate", s.success_rate);
        metrics.emplace_back("query_success_rate_connected", s.success_rate_connected);
    }
    return metrics;
}

} // namespace

std::string swept_key(std::string_view parameter) {
    if (parameter == "R")
        return "neighborhood_radius";
    if (parameter == "r")
        return "max_contact_distance";
    if (parameter == "NoC")
        return "max_contacts";
    if (parameter == "D")
        return "max_depth";
    if (parameter == "N")
        return "node_count";
    const auto& keys = scenario_keys();
    if (std::find(keys.begin(), keys.end(), parameter) == keys.end())
        throw ConfigError(fmt::format("unknown swept parameter '{}'", parameter));
    return std::string(parameter);
}

bool is_card_scheme(std::string_view scheme) { return scheme.starts_with("CARD-"); }

Method scheme_method(std::string_view scheme) {
    if (scheme == "CARD-EM")
        return Method::em;
    if (scheme == "CARD-PM1")
        return Method::pm1;
    if (scheme == "CARD-PM" || scheme == "CARD-PM2")
        return Method::pm2;
    throw ConfigError(fmt::format("unknown scheme '{}'", scheme));
}

ScenarioConfig SweepSpec::derived(std::string_view value, std::uint64_t seed) const {
    ScenarioConfig cfg = base;
    set_field(cfg, swept_key(swept_parameter), value);
    if (swept_parameter == "N" && base.node_count > 0) {
        // Network-size sweeps keep the base density.
        const double scale = std::sqrt(static_cast<double>(cfg.node_count) / base.node_count);
        cfg.area_width = base.area_width * scale;
        cfg.area_height = base.area_height * scale;
    }
    cfg.rng_seed = seed;
    return cfg;
}

void SweepSpec::validate() const {
    if (values.empty())
        throw ConfigError("sweep values must not be empty");
    if (seeds.empty())
        throw ConfigError("sweep seeds must not be empty");
    if (schemes.empty())
        throw ConfigError("sweep schemes must not be empty");
    for (const auto& s : schemes)
        if (std::find(known_schemes().begin(), known_schemes().end(), s) == known_schemes().end())
            throw ConfigError(fmt::format("unknown scheme '{}'", s));
    if (query_count < 0)
        throw ConfigError("queries must be >= 0");
    for (const auto& v : values) {
        try {
            derived(v, seeds.front()).validate();
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}={}: {}", swept_parameter, v, e.what()));
        }
    }
}

SweepSpec parse_sweep(std::string_view text) {
    SweepSpec spec;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("line {}: expected key=value", line_no));
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "sweep_id")
            spec.sweep_id = value;
        else if (key == "param" || key == "swept_parameter")
            spec.swept_parameter = value;
        else if (key == "values")
            spec.values = split_list(value);
        else if (key == "seeds")
            spec.seeds = parse_seeds(value);
        else if (key == "schemes")
            spec.schemes = split_list(value);
        else if (key == "queries")
            spec.query_count = static_cast<int>(parse_u64(value, key));
        else if (key == "mobility")
            spec.mobility = parse_u64(value, key) != 0;
        else
            set_field(spec.base, key, value);
    }
    swept_key(spec.swept_parameter);
    return spec;
}

SweepSpec load_sweep_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError(fmt::format("cannot read sweep file '{}'", file.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep(ss.str());
}

std::string to_text(const SweepSpec& spec) {
    std::string out = fmt::format("sweep_id={}\nparam={}\nvalues={}\nseeds={}\nschemes={}\nqueries={}\nmobility={}\n",
                                  spec.sweep_id, spec.swept_parameter, join(spec.values), join(spec.seeds),
                                  join(spec.schemes), spec.query_count, spec.mobility ? 1 : 0);
    return out + to_key_values(spec.base);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int parallel) {
    std::vector<RunPoint> points;
    for (std::size_t v = 0; v < spec.values.size(); ++v)
        for (std::uint64_t seed : spec.seeds)
            for (std::size_t s = 0; s < spec.schemes.size(); ++s)
                points.push_back({v, seed, s});

    // Outer runs in parallel, each run serial inside; otherwise the reverse.
    const bool outer = parallel > 1;
    std::vector<std::vector<std::pair<std::string, double>>> results(points.size());
    std::vector<bool> failed(points.size(), false);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(parallel, 1)) if (outer)
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            results[i] = run_point(spec, points[i], outer ? Exec::serial : Exec::parallel);
        } catch (const std::exception&) {
            failed[i] = true;
        }
    }

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        SweepRow base{spec.sweep_id, spec.schemes[pt.scheme_index], spec.swept_parameter,
                      spec.values[pt.value_index], pt.seed, "", 0.0};
        if (failed[i]) {
            base.metric = "failed";
            base.metric_value = 1.0;
            rows.push_back(base);
            continue;
        }
        for (const auto& [metric, value] : results[i]) {
            base.metric = metric;
            base.metric_value = value;
            rows.push_back(base);
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "sweep_id,scheme,param,value,seed,metric,metric_value\n";
    for (const auto& r : rows)
        fmt::print(out, "{},{},{},{},{},{},{}\n", r.sweep_id, r.scheme, r.param, r.value, r.seed, r.metric,
                   r.metric_value);
}

std::vector<TradeoffPoint> tradeoff_report(const std::vector<SweepRow>& rows) {
    struct Acc {
        double reach = 0.0;
        double overhead = 0.0;
        int runs = 0;
    };
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto& r : rows) {
        if (!is_card_scheme(r.scheme))
            continue;
        const auto key = std::make_pair(r.scheme, r.value);
        if (!acc.contains(key))
            order.push_back(key);
        auto& a = acc[key];
        if (r.metric == "reach_mean") {
            a.reach += r.metric_value;
            ++a.runs;
        } else if (r.metric == "selection_per_node" || r.metric == "backtrack_per_node" ||
                   r.metric == "maintenance_per_node") {
            a.overhead += r.metric_value;
        }
    }
    std::vector<TradeoffPoint> points;
    for (const auto& key : order) {
        const auto& a = acc[key];
        if (a.runs == 0)
            continue;
        TradeoffPoint p;
        p.scheme = key.first;
        p.value = key.second;
        p.reach_percent = 100.0 * a.reach / a.runs;
        p.overhead_per_node = a.overhead / a.runs;
        p.meets_target = p.reach_percent >= 50.0;
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<TradeoffPoint> pareto_frontier(std::vector<TradeoffPoint> points) {
    std::stable_sort(points.begin(), points.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
        if (a.overhead_per_node != b.overhead_per_node)
            return a.overhead_per_node < b.overhead_per_node;
        return a.reach_percent > b.reach_percent;
    });
    std::vector<TradeoffPoint> frontier;
    for (auto& p : points)
        if (frontier.empty() || p.reach_percent > frontier.back().reach_percent)
            frontier.push_back(std::move(p));
    return frontier;
}

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffPoint>& points) {
    const auto frontier = pareto_frontier(points);
    out << "scheme,value,reach_percent,overhead_per_node,meets_50_percent,pareto\n";
    for (const auto& p : points) {
        const bool on_frontier = std::any_of(frontier.begin(), frontier.end(), [&](const TradeoffPoint& f) {
            return f.scheme == p.scheme && f.value == p.value;
        });
        fmt::print(out, "{},{},{},{},{},{}\n", p.scheme, p.value, p.reach_percent, p.overhead_per_node,
                   p.meets_target ? 1 : 0, on_frontier ? 1 : 0);
    }
}

} // namespace card
