// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "card/cli.hpp"
#include "card/contacts.hpp"
#include "card/scenario.hpp"
#include "card/simulation.hpp"

using namespace card;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

constexpr int seed_count = 10;

std::vector<int> bfs(const ConnectivityGraph& g, NodeId s) {
    std::vector<int> dist(g.size(), -1);
    std::deque<NodeId> q{s};
    dist[s] = 0;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        for (NodeId v : g.neighbors(u))
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

bool adjacent(const ConnectivityGraph& g, NodeId a, NodeId b) {
    const auto& nb = g.neighbors(a);
    return std::find(nb.begin(), nb.end(), b) != nb.end();
}

bool valid_walk(const ConnectivityGraph& g, const Path& p) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!adjacent(g, p[i], p[i + 1]))
            return false;
    return true;
}

// Uniform placement at the density of reference scenario 5.
ScenarioConfig row5_density(int nodes) {
    ScenarioConfig cfg = table1_preset(5);
    const double side = 710.0 * std::sqrt(nodes / 500.0);
    cfg.node_count = nodes;
    cfg.area_width = side;
    cfg.area_height = side;
    return cfg;
}

RunResult simulate(ScenarioConfig cfg, std::uint64_t seed, Method method, int queries = 0,
                   bool baselines = false) {
    cfg.rng_seed = seed;
    RunOptions opts;
    opts.config = cfg;
    opts.method = method;
    opts.query_count = queries;
    opts.run_baselines = baselines;
    return run_simulation(opts);
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string series(const std::vector<double>& v, int precision = 3) {
    std::string s;
    for (double x : v)
        s += fmt::format("{}{:.{}f}", s.empty() ? "" : " ", x, precision);
    return s;
}

// 1. Mean degree of the reference scenarios within 15% of the published value.
Verdict topology_fidelity() {
    struct Row {
        int row;
        double degree;
    };
    const Row rows[] = {{1, 6.75}, {2, 5.223}, {5, 7.416}, {8, 8.156}};
    Verdict v{true, ""};
    for (const auto& r : rows) {
        const auto cfg = table1_preset(r.row);
        double sum = 0.0;
        for (int s = 1; s <= seed_count; ++s)
            sum += graph_stats(build_connectivity(place_nodes(cfg, s), cfg.tx_range)).avg_degree;
        const double got = sum / seed_count;
        const double err = std::abs(got - r.degree) / r.degree;
        const bool ok = err <= 0.15;
        v.pass = v.pass && ok;
        v.detail += fmt::format("row {} {:.3f} vs {} ({:+.1f}%){}; ", r.row, got, r.degree,
                                100.0 * (got - r.degree) / r.degree, ok ? "" : " out of tolerance");
    }
    return v;
}

// 2. pm_probability against the closed forms, clamped to [0, 1].
Verdict formula_correctness() {
    int checked = 0, wrong = 0;
    for (int R = 1; R <= 6; ++R)
        for (int r = 2 * R + 1; r <= 40; ++r)
            for (int d : {R, 2 * R, (2 * R + r) / 2, r}) {
                const double e1 = std::clamp(double(d - R) / double(r - R), 0.0, 1.0);
                const double e2 = std::clamp(double(d - 2 * R) / double(r - 2 * R), 0.0, 1.0);
                wrong += pm_probability(d, R, r, PmVariant::eq1) != e1;
                wrong += pm_probability(d, R, r, PmVariant::eq2) != e2;
                checked += 2;
            }
    return {wrong == 0, fmt::format("{} grid points, {} mismatches", checked, wrong)};
}

// 3. Every EM contact lies at distance >= 2R+1 with a disjoint R-neighborhood.
Verdict em_separation() {
    int snapshots = 0, contacts = 0, violations = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto cfg = row5_density(250);
        const int R = 2 + static_cast<int>(seed % 2);
        const ContactParams p{R, 2 * R + 4 + static_cast<int>(seed % 7), 6, Method::em};
        const auto g = build_connectivity(place_nodes(cfg, seed), cfg.tx_range);
        const Topology topo(g, R);
        MetricsLedger ledger(g.size());
        LinkLayer link(g, ledger);
        ++snapshots;
        for (NodeId s = 0; s < g.size(); ++s) {
            ContactState st;
            auto rng = make_rng(seed, s);
            const auto chosen = select_contacts(s, st, topo, p, link, rng, 0.0);
            const auto ds = bfs(g, s);
            for (const auto& c : chosen) {
                ++contacts;
                const auto dc = bfs(g, c.contact);
                bool ok = ds[c.contact] >= 2 * R + 1;
                for (NodeId w = 0; w < g.size() && ok; ++w)
                    if (ds[w] >= 0 && ds[w] <= R && dc[w] >= 0 && dc[w] <= R)
                        ok = false;
                ok = ok && c.source_path.front() == s && c.source_path.back() == c.contact &&
                     valid_walk(g, c.source_path);
                violations += !ok;
            }
        }
    }
    return {violations == 0 && contacts > 0,
            fmt::format("{} snapshots, {} contacts, {} violations", snapshots, contacts, violations)};
}

// 4. EM beats PM on reachability and on backtracking, seed by seed.
Verdict pm_vs_em() {
    auto cfg = table1_preset(5);
    cfg.neighborhood_radius = 3;
    cfg.max_contact_distance = 20;
    cfg.max_depth = 1;
    cfg.max_contacts = 6;
    int reach_wins = 0, backtrack_wins = 0;
    std::vector<double> em_reach, pm_reach, em_bt, pm_bt;
    for (int s = 1; s <= seed_count; ++s) {
        const auto em = simulate(cfg, s, Method::em);
        const auto pm = simulate(cfg, s, Method::pm2);
        em_reach.push_back(em.mean_reach());
        pm_reach.push_back(pm.mean_reach());
        em_bt.push_back(em.ledger.per_node(Category::backtrack));
        pm_bt.push_back(pm.ledger.per_node(Category::backtrack));
        reach_wins += em_reach.back() >= pm_reach.back();
        backtrack_wins += em_bt.back() < pm_bt.back();
    }
    const bool pass = mean(em_reach) >= mean(pm_reach) && reach_wins >= 9 && mean(em_bt) < mean(pm_bt) &&
                      backtrack_wins >= 9;
    return {pass, fmt::format("reach EM {:.3f} PM {:.3f} ({}/10 seeds); backtrack/node EM {:.1f} PM {:.1f} "
                              "({}/10 seeds)",
                              mean(em_reach), mean(pm_reach), reach_wins, mean(em_bt), mean(pm_bt),
                              backtrack_wins)};
}

// 5. Monotone trends in D, NoC and r, and diminishing returns in r.
Verdict trends() {
    Verdict v{true, ""};
    const auto cfg = table1_preset(5);

    // D and NoC on fixed snapshots.
    bool depth_ok = true, noc_ok = true;
    const int max_noc = 12;
    std::vector<double> noc_curve(max_noc + 1, 0.0);
    for (int s = 1; s <= seed_count; ++s) {
        const auto g = build_connectivity(place_nodes(cfg, s), cfg.tx_range);
        const Topology topo(g, 3);
        {
            MetricsLedger ledger(g.size());
            CardNetwork net(g.size(), ContactParams{3, 20, 6, Method::em}, s, ledger);
            net.set_topology(topo);
            net.selection_round(0.0);
            std::vector<double> prev(g.size(), 0.0);
            for (int d = 1; d <= 6; ++d) {
                const auto reach = net.reachability(d);
                for (std::size_t i = 0; i < reach.size(); ++i)
                    depth_ok = depth_ok && reach[i] >= prev[i];
                prev = reach;
            }
        }
        double prev = -1.0;
        for (int noc = 0; noc <= max_noc; ++noc) {
            MetricsLedger ledger(g.size());
            CardNetwork net(g.size(), ContactParams{3, 20, noc, Method::em}, s, ledger);
            net.set_topology(topo);
            net.selection_round(0.0);
            const double reach = mean(net.reachability(3));
            noc_ok = noc_ok && reach >= prev;
            prev = reach;
            noc_curve[noc] += reach / seed_count;
        }
    }
    const double first_step = noc_curve[1] - noc_curve[0];
    const double last_step = noc_curve[max_noc] - noc_curve[max_noc - 1];
    const bool flat_tail = last_step <= 0.1 * first_step;
    v.pass = depth_ok && noc_ok && flat_tail;
    v.detail += fmt::format("D monotone {}; NoC monotone {}, first step {:.4f} last step {:.4f}; ",
                            depth_ok ? "yes" : "no", noc_ok ? "yes" : "no", first_step, last_step);

    // Backtracking and reachability over r with mobility.
    std::vector<double> backtrack, reach;
    for (int r = 8; r <= 18; ++r) {
        auto c = cfg;
        c.max_contact_distance = r;
        double bt = 0.0, re = 0.0;
        for (int s = 1; s <= seed_count; ++s) {
            const auto res = simulate(c, s, Method::em);
            bt += res.ledger.per_node(Category::backtrack);
            re += res.mean_reach();
        }
        backtrack.push_back(bt / seed_count);
        reach.push_back(re / seed_count);
    }
    bool bt_ok = true;
    for (std::size_t i = 1; i < backtrack.size(); ++i)
        bt_ok = bt_ok && backtrack[i] <= backtrack[i - 1];
    const double near_gain = reach[6] - reach[0]; // r = 8 -> 14
    const double far_gain = reach[10] - reach[6]; // r = 14 -> 18
    const bool gain_ok = far_gain < 0.2 * near_gain;
    v.pass = v.pass && bt_ok && gain_ok;
    v.detail += fmt::format("backtrack/node over r=8..18 [{}] non-increasing {}; reach gain 8->14 {:.4f}, "
                            "14->18 {:.4f}",
                            series(backtrack, 1), bt_ok ? "yes" : "no", near_gain, far_gain);
    return v;
}

// 6. Growing R at fixed r first raises, then lowers reachability.
Verdict neighborhood_collapse() {
    auto cfg = table1_preset(5);
    cfg.max_contact_distance = 16;
    std::vector<double> reach;
    for (int R = 1; R <= 7; ++R) {
        cfg.neighborhood_radius = R;
        double sum = 0.0;
        for (int s = 1; s <= 5; ++s)
            sum += simulate(cfg, s, Method::em).mean_reach();
        reach.push_back(sum / 5);
    }
    const auto peak = static_cast<std::size_t>(std::max_element(reach.begin(), reach.end()) - reach.begin());
    const bool pass = peak > 0 && peak + 1 < reach.size() && reach.back() < reach[peak];
    return {pass, fmt::format("mean reach over R=1..7 at r=16: [{}], peak at R={}", series(reach), peak + 1)};
}

// 7. Query traffic ordering against flooding and bordercasting.
Verdict comparison_ordering() {
    auto cfg = table1_preset(5);
    cfg.neighborhood_radius = 3;
    cfg.max_contact_distance = 20;
    cfg.max_contacts = 6;
    cfg.max_depth = 3;
    int ordered = 0;
    std::vector<double> card_q, card_total, flood_q, bc_q;
    std::size_t card_ok = 0, card_conn = 0, flood_ok = 0, flood_conn = 0;
    for (int s = 1; s <= seed_count; ++s) {
        const auto res = simulate(cfg, s, Method::em, 50, true);
        const auto rows = summarize_comparison(res);
        const auto& card = rows[0];
        const auto& flood = rows[1];
        const auto& bc = rows[2];
        ordered += flood.query_traffic_per_node > bc.query_traffic_per_node &&
                   bc.query_traffic_per_node > card.query_traffic_per_node;
        card_q.push_back(card.query_traffic_per_node);
        card_total.push_back(card.query_traffic_per_node + card.selection_maintenance_per_node);
        flood_q.push_back(flood.query_traffic_per_node);
        bc_q.push_back(bc.query_traffic_per_node);
        for (const auto& c : res.comparison) {
            if (!c.connected)
                continue;
            if (c.scheme == "card") {
                ++card_conn;
                card_ok += c.success;
            } else if (c.scheme == "flood") {
                ++flood_conn;
                flood_ok += c.success;
            }
        }
    }
    const double card_rate = card_conn ? double(card_ok) / double(card_conn) : 0.0;
    const double flood_rate = flood_conn ? double(flood_ok) / double(flood_conn) : 0.0;
    const bool every_seed = ordered == seed_count;
    const bool total_ok = mean(card_total) < mean(flood_q) && mean(card_total) < mean(bc_q);
    const bool pass = every_seed && total_ok && card_rate >= 0.85 && flood_rate == 1.0;
    return {pass,
            fmt::format("per-node query traffic flood {:.1f} bordercast {:.1f} CARD {:.1f}, ordered in {}/10 "
                        "seeds; CARD total {:.1f}; success on connected pairs CARD {:.3f} flood {:.3f}",
                        mean(flood_q), mean(bc_q), mean(card_q), ordered, mean(card_total), card_rate,
                        flood_rate)};
}

// 8. Randomized broken paths: repairs are valid walks, and exist exactly when
// a later path node is inside the detector's neighborhood.
Verdict local_recovery_correctness() {
    std::mt19937_64 rng(2024);
    int scenarios = 0, repaired = 0, failures = 0;
    while (scenarios < 1000) {
        const int n = 60 + static_cast<int>(rng() % 90);
        ScenarioConfig cfg = row5_density(n);
        cfg.tx_range = 45.0 + static_cast<double>(rng() % 30);
        const auto g = build_connectivity(place_nodes(cfg, rng()), cfg.tx_range);

        // A random simple path from a random depth-first walk.
        const auto s = static_cast<NodeId>(rng() % g.size());
        Path path{s};
        std::vector<bool> on_path(g.size(), false);
        on_path[s] = true;
        const std::size_t want = 3 + rng() % 12;
        while (path.size() < want) {
            std::vector<NodeId> next;
            for (NodeId w : g.neighbors(path.back()))
                if (!on_path[w])
                    next.push_back(w);
            if (next.empty())
                break;
            const NodeId w = next[rng() % next.size()];
            on_path[w] = true;
            path.push_back(w);
        }
        if (path.size() < 3)
            continue;

        // Break the hop after the detector: drop the link or the whole next node.
        const std::size_t k = rng() % (path.size() - 1);
        const NodeId a = path[k], b = path[k + 1];
        const bool drop_node = rng() % 2 == 0 && k + 1 + 1 < path.size();
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId u = 0; u < g.size(); ++u)
            for (NodeId w : g.neighbors(u)) {
                if (u >= w)
                    continue;
                if ((u == a && w == b) || (u == b && w == a))
                    continue;
                if (drop_node && (u == b || w == b))
                    continue;
                edges.emplace_back(u, w);
            }
        const auto broken = ConnectivityGraph::from_edges(g.size(), edges);
        const int R = 1 + static_cast<int>(rng() % 3);
        const auto table = compute_neighborhood(broken, a, R);
        const auto result = local_recovery(table, path, k);
        ++scenarios;

        const auto da = bfs(broken, a);
        bool expect = false;
        for (std::size_t j = k + 1; j < path.size(); ++j)
            expect = expect || (da[path[j]] >= 1 && da[path[j]] <= R);

        bool ok = result.has_value() == expect;
        if (result) {
            ++repaired;
            ok = ok && result->front() == path.front() && result->back() == path.back() &&
                 valid_walk(broken, *result);
        }
        failures += !ok;
    }
    return {failures == 0,
            fmt::format("{} scenarios, {} repaired, {} oracle mismatches", scenarios, repaired, failures)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "card");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

// 9. Replaying a manifest reproduces every CSV byte for byte.
Verdict determinism() {
    const auto root = fs::temp_directory_path() / "card_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto sweep_file = root / "noc.sweep";
    std::ofstream(sweep_file) << "param=NoC\nvalues=2,6\nseeds=1,2\nschemes=CARD-EM,bordercast\nqueries=10\n"
                                 "node_count=200\narea_width=450\narea_height=450\nsim_duration=10\n";

    const std::vector<std::vector<std::string>> commands = {
        {"run", "--preset", "table1-5", "--replicates", "2", "--queries", "20"},
        {"compare", "--preset", "table1-5", "--queries", "20", "--zone-radius", "2"},
        {"sweep", sweep_file.string(), "--parallel", "2"},
    };
    int files = 0, differing = 0, errors = 0;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto first = root / fmt::format("first_{}", i);
        const auto second = root / fmt::format("second_{}", i);
        auto args = commands[i];
        args.insert(args.end(), {"--out", first.string()});
        errors += cli(args) != 0;
        errors += cli({"replay", (first / "manifest.json").string(), "--out", second.string()}) != 0;
        for (const auto& e : fs::recursive_directory_iterator(first)) {
            if (!e.is_regular_file() || e.path().extension() != ".csv")
                continue;
            ++files;
            const auto other = second / fs::relative(e.path(), first);
            differing += !fs::exists(other) || slurp(e.path()) != slurp(other);
        }
    }
    fs::remove_all(root);
    return {errors == 0 && differing == 0 && files > 0,
            fmt::format("{} CSV files compared across run, compare and sweep, {} differ, {} command errors",
                        files, differing, errors)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"topology fidelity", topology_fidelity},
        {"formula correctness", formula_correctness},
        {"EM separation", em_separation},
        {"PM vs EM ordering", pm_vs_em},
        {"trend suite", trends},
        {"neighborhood collapse", neighborhood_collapse},
        {"comparison ordering", comparison_ordering},
        {"local recovery", local_recovery_correctness},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, check] = criteria[i];
        const Verdict v = check();
        failed += !v.pass;
        std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
