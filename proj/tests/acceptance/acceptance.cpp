// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nobcr/forwarding/cover.hpp"
#include "nobcr/harness/experiment.hpp"
#include "nobcr/harness/script.hpp"
#include "nobcr/termination/source_window.hpp"

using namespace nobcr;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kScenarios = NOBCR_SCENARIO_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------- runs

/// Runs configs once each; identical configs (same serialized text) share one run.
class RunCache {
public:
    const RunMetrics& get(const ScenarioConfig& cfg) {
        const std::string key = serialize_config(cfg);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Simulator sim(cfg);
        ++runs_;
        return cache_.emplace(key, sim.run()).first->second;
    }
    [[nodiscard]] std::size_t runs() const { return runs_; }

private:
    std::map<std::string, RunMetrics> cache_;
    std::size_t runs_ = 0;
};

RunCache g_runs;

/// Seed-averaged metric for one (preset, variant, sweep label) cell over the preset's trials.
double cell_mean(const ExperimentPreset& p, const std::string& variant, const std::string& label,
                 const std::function<double(const RunMetrics&)>& metric) {
    const auto pt = std::find_if(p.sweep.begin(), p.sweep.end(), [&](const SweepPoint& s) { return s.label == label; });
    if (pt == p.sweep.end()) throw ConfigError("preset " + p.name + " has no sweep value " + label);
    std::vector<double> xs;
    for (std::uint64_t s = p.first_seed; s < p.first_seed + p.trials; ++s)
        xs.push_back(metric(g_runs.get(p.config_for(variant, *pt, s))));
    std::sort(xs.begin(), xs.end());
    return mean(xs);
}

double delivery(const RunMetrics& m) { return m.delivery_ratio; }
double transmissions(const RunMetrics& m) { return static_cast<double>(m.total_transmissions); }
double median_delay(const RunMetrics& m) { return m.median_delay; }
double stored(const RunMetrics& m) { return m.stored_items_avg; }

// ---------------------------------------------------------------- 1, 2

Outcome mcu_oracle_equivalence() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::vector<std::uint8_t> seen;
    std::uint64_t decisions = 0, mismatches = 0, out_of_window = 0;
    constexpr std::uint64_t kStreams = 1'000'000;
    for (std::uint64_t stream = 0; stream < kStreams; ++stream) {
        const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 128);
        const std::size_t len = 1 + rng() % 24;
        SourceWindow w(k);
        seen.assign(len * (3 * k + 2) + 2, 0);
        std::uint64_t top = 0, next = 0;
        for (std::size_t i = 0; i < len; ++i) {
            std::uint64_t sn;
            const auto r = rng() % 8;
            if (r < 4 || next == 0) {
                next += 1 + (r == 0 ? rng() % (2 * k) : 0);
                sn = next;
            } else if (r < 7) {
                sn = next - std::min<std::uint64_t>(next - 1, rng() % k);  // late or duplicate, within depth k
            } else {
                sn = 1 + rng() % next;  // anything, possibly out of window
            }
            const bool in_window = top < k || sn > top - k;
            const bool dup = seen[sn] != 0;
            const Verdict got = mcu_relay_or_not(PacketId{0, sn}, w);
            ++decisions;
            if (in_window) {
                if (got != (dup ? Verdict::Drop : Verdict::RelayEligible)) ++mismatches;
                seen[sn] = 1;
            } else {
                ++out_of_window;
                if (got != Verdict::Drop) ++mismatches;
            }
            top = std::max(top, sn);
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 10.0,
            fmt("%llu streams, %llu decisions (%llu out of window), %llu mismatches, %.2f s",
                static_cast<unsigned long long>(kStreams), static_cast<unsigned long long>(decisions),
                static_cast<unsigned long long>(out_of_window), static_cast<unsigned long long>(mismatches), secs)};
}

Outcome bitmap_rollover() {
    std::mt19937_64 rng(202);
    constexpr int kTrials = 100'000;
    int identical = 0;
    std::uint64_t branch[3] = {0, 0, 0};  // no rollover, one, several
    for (int trial = 0; trial < kTrials; ++trial) {
        const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 200);
        SourceWindow w(k);
        std::set<std::uint64_t> accepted;
        std::uint64_t top = 0;
        const int steps = 1 + static_cast<int>(rng() % 12);
        for (int s = 0; s < steps; ++s) {
            std::uint64_t sn;
            switch (rng() % 4) {
                case 0: sn = top + 1 + rng() % std::max<std::uint32_t>(1, k / 2); break;
                case 1: sn = top + 1 + rng() % (k + 1); break;
                case 2: sn = top + k + 1 + rng() % (4 * k); break;
                default: sn = top > 0 ? 1 + rng() % top : 1; break;
            }
            if (sn > top) {
                const std::uint64_t roll = (w.mindex() + (sn - top)) / k;
                ++branch[std::min<std::uint64_t>(roll, 2)];
            }
            if (mcu_relay_or_not(PacketId{0, sn}, w) == Verdict::RelayEligible) accepted.insert(sn);
            top = std::max(top, sn);
        }
        // rebuild from the accepted history alone: bit (sn mod k) for every sn still in the window
        std::vector<std::uint64_t> rebuilt((k + 63) / 64, 0);
        for (std::uint64_t sn : accepted)
            if (sn + k > top) rebuilt[(sn % k) >> 6] |= std::uint64_t{1} << ((sn % k) & 63);
        if (rebuilt == w.bits() && w.mindex() == top % k) ++identical;
    }
    const bool all_branches = branch[0] > 0 && branch[1] > 0 && branch[2] > 0;
    return {identical == kTrials && all_branches,
            fmt("%d/%d identical; updates by rollover count 0/1/many: %llu/%llu/%llu", identical, kTrials,
                static_cast<unsigned long long>(branch[0]), static_cast<unsigned long long>(branch[1]),
                static_cast<unsigned long long>(branch[2]))};
}

// ---------------------------------------------------------------- 3, 4

Outcome reordering_regression() {
    ScriptRunner cu({"termination=CU"}), mcu({"termination=MCU"});
    const auto a = cu.run_file(kScenarios + "/fig4.script");
    const auto b = mcu.run_file(kScenarios + "/fig4.script");
    const bool cu_ok = a.has("v", "drop", "p1") && !a.received("z", "p1") && !a.received("x", "p1");
    bool mcu_ok = true;
    for (const char* n : {"u", "v", "z", "x"}) mcu_ok = mcu_ok && b.received(n, "p1");
    // the fifth node is the source itself
    mcu_ok = mcu_ok && b.has("s", "gen", "p1");
    return {cu_ok && mcu_ok, fmt("C/U drops p1 at v and starves z, x: %s; MC/U delivers p1 to all: %s",
                                 cu_ok ? "yes" : "no", mcu_ok ? "yes" : "no")};
}

Outcome gratis_rule_regression() {
    ScriptRunner on, off({"gratis_receiving_rule=false"});
    const auto a = on.run_file(kScenarios + "/fig13.script");
    const auto b = off.run_file(kScenarios + "/fig13.script");
    int reached_on = 0, reached_off = 0;
    for (const char* n : {"z", "v", "u", "x", "n", "e", "a"}) reached_on += a.received(n, "p1") ? 1 : 0;
    for (const char* n : {"n", "e", "a"}) reached_off += b.received(n, "p1") ? 1 : 0;
    return {reached_on == 7 && reached_off == 0,
            fmt("rule on: p1 reaches %d/7 receivers; rule off: p1 reaches %d/3 of n, e, a", reached_on,
                reached_off)};
}

// ---------------------------------------------------------------- 5

Outcome perfect_information_decoding() {
    std::uint64_t failures = 0, encoded = 0;
    double dr = 0;
    const int seeds = 3;
    for (int seed = 1; seed <= seeds; ++seed) {
        ScenarioConfig c;
        apply_variant(c, find_variant("nobcr"));
        c.n_nodes = 50;
        c.n_sources = 20;
        c.sim_duration = 60;
        c.area_side = side_for_degree(50, 15.0);
        c.speed_min = c.speed_max = 0;
        c.collisions = false;
        c.hellos = true;
        c.seed = static_cast<std::uint64_t>(seed);
        const RunMetrics& m = g_runs.get(c);
        failures += m.decode_failures;
        encoded += m.encoded_tx;
        dr += m.delivery_ratio / seeds;
    }
    return {failures == 0 && encoded > 0,
            fmt("%d seeds: %llu encoded transmissions, %llu decode failures, delivery %.4f", seeds,
                static_cast<unsigned long long>(encoded), static_cast<unsigned long long>(failures), dr)};
}

// ---------------------------------------------------------------- 6, 7

Outcome subset_property() {
    std::mt19937_64 rng(606);
    constexpr int kGraphs = 10'000;
    std::uint64_t checks = 0, violations = 0;
    for (int g = 0; g < kGraphs; ++g) {
        const NodeId n = 20 + static_cast<NodeId>(rng() % 41);
        const double side = 400.0 + uniform01(rng) * 800.0;
        std::vector<Vec2> pts(n);
        for (auto& p : pts) p = {uniform(rng, 0, side), uniform(rng, 0, side)};
        std::vector<NodeSet> adj(n);
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j)
                if (distance(pts[i], pts[j]) <= 250.0) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
        for (int probe = 0; probe < 5; ++probe) {
            const NodeId v = static_cast<NodeId>(rng() % n);
            const auto nbrs = adj[v].to_vector();
            if (nbrs.empty()) continue;
            NeighborView view(v);
            for (NodeId u : nbrs) view.on_hello(u, adj[u], 0.0);
            const NodeId u = nbrs[rng() % nbrs.size()];
            NodeSet hops;
            hops.insert(u);
            for (NodeId w : nbrs)
                if (rng() % 3 == 0) hops.insert(w);
            ++checks;
            if (!multiprev_cover_target(view, hops).is_subset_of(pdp_cover_target(view, u))) ++violations;
        }
    }
    return {violations == 0 && checks > 0,
            fmt("%d graphs, %llu (v, u, H) checks, %llu violations", kGraphs, static_cast<unsigned long long>(checks),
                static_cast<unsigned long long>(violations))};
}

Outcome greedy_cover_quality() {
    std::mt19937_64 rng(707);
    constexpr int kInstances = 20'000;
    int incomplete = 0, over_bound = 0;
    double worst_ratio = 0;
    for (int t = 0; t < kInstances; ++t) {
        CoverProblem p;
        const NodeId universe = 1 + static_cast<NodeId>(rng() % 12);
        for (NodeId i = 0; i < universe; ++i) p.universe.insert(i);
        const std::size_t m = 1 + rng() % 12;
        for (std::size_t c = 0; c < m; ++c) {
            NodeSet s;
            for (NodeId i = 0; i < universe; ++i)
                if (rng() % 3 == 0) s.insert(i);
            p.candidates.emplace_back(static_cast<NodeId>(c), s);
        }
        const CoverResult got = greedy_set_cover(p);
        NodeSet covered, reachable;
        for (const auto& [id, s] : p.candidates) {
            reachable |= s;
            if (got.picked.contains(id)) covered |= s;
        }
        const NodeSet need = p.universe & reachable;
        if (!need.is_subset_of(covered)) ++incomplete;

        std::size_t opt = need.empty() ? 0 : m;
        for (std::uint32_t mask = 1; mask < (1u << m) && opt > 0; ++mask) {
            const auto k = static_cast<std::size_t>(std::popcount(mask));
            if (k >= opt) continue;
            NodeSet u;
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1u << i)) u |= p.candidates[i].second;
            if (need.is_subset_of(u)) opt = k;
        }
        double h = 0;
        for (std::size_t i = 1; i <= need.size(); ++i) h += 1.0 / static_cast<double>(i);
        if (static_cast<double>(got.picked.size()) > h * static_cast<double>(opt) + 1e-9) ++over_bound;
        if (opt > 0) worst_ratio = std::max(worst_ratio, static_cast<double>(got.picked.size()) / opt);
    }
    return {incomplete == 0 && over_bound == 0,
            fmt("%d instances: %d incomplete covers, %d above H(n) x optimum, worst greedy/optimum %.2f", kInstances,
                incomplete, over_bound, worst_ratio)};
}

// ---------------------------------------------------------------- 8 to 12

Outcome rad_insensitivity() {
    const auto p = make_preset("rad-sweep", true);
    const double cu0 = cell_mean(p, "pdp-cu", "0", delivery);
    const double cu4 = cell_mean(p, "pdp-cu", "0.4", delivery);
    double lo = 1, hi = 0;
    std::string mcu;
    for (const auto& pt : p.sweep) {
        const double d = cell_mean(p, "pdp-mcu", pt.label, delivery);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        mcu += fmt(" %s:%.4f", pt.label.c_str(), d);
    }
    const double cu_drop = 100 * (cu0 - cu4), mcu_spread = 100 * (hi - lo);
    return {cu_drop >= 15.0 && mcu_spread <= 3.0,
            fmt("C/U delivery %.4f at rad 0 vs %.4f at rad 0.4 (drop %.2f pts, need >= 15); MC/U spread %.2f pts "
                "(need <= 3):%s",
                cu0, cu4, cu_drop, mcu_spread, mcu.c_str())};
}

std::string highest_load(const ExperimentPreset& p) { return p.sweep.back().label; }

Outcome transmission_ordering() {
    const auto p = make_preset("sparse-sources", true);
    const std::string hl = highest_load(p);
    const double tx_nob = cell_mean(p, "nobcr", hl, transmissions);
    const double tx_cu = cell_mean(p, "pdp-cu", hl, transmissions);
    const double tx_mu = cell_mean(p, "pdp-mu", hl, transmissions);
    const double dr_nob = cell_mean(p, "nobcr", hl, delivery);
    const double dr_codeb = cell_mean(p, "codeb", hl, delivery);
    return {tx_nob < tx_cu && tx_cu < tx_mu && dr_nob >= dr_codeb,
            fmt("%s=%s, %u seeds: transmissions NOB-CR %.1f < C/U %.1f < M/U %.1f; delivery NOB-CR %.4f >= "
                "M/U+table coding %.4f",
                p.sweep_key.c_str(), hl.c_str(), p.trials, tx_nob, tx_cu, tx_mu, dr_nob, dr_codeb)};
}

Outcome coded_redundancy_delay() {
    const auto p = make_preset("sparse-sources", true);
    const std::string hl = highest_load(p);
    const double d_on = cell_mean(p, "nobcr", hl, median_delay);
    const double d_off = cell_mean(p, "nobcr-nocr", hl, median_delay);
    const double dr_on = cell_mean(p, "nobcr", hl, delivery);
    const double dr_off = cell_mean(p, "nobcr-nocr", hl, delivery);
    return {d_on <= d_off && dr_on >= dr_off,
            fmt("%s=%s: median delay on %.4f s <= off %.4f s; delivery on %.4f >= off %.4f", p.sweep_key.c_str(),
                hl.c_str(), d_on, d_off, dr_on, dr_off)};
}

Outcome storage_gain() {
    const auto p = make_preset("storage", true);
    std::string detail;
    double dense_ratio = 0;
    for (const auto& pt : p.sweep) {
        const double light = cell_mean(p, "nobcr", pt.label, stored);
        const double table = cell_mean(p, "nobcr-table", pt.label, stored);
        const double ratio = light > 0 ? table / light : 0;
        if (pt.label == "dense") dense_ratio = ratio;
        detail += fmt("%s%s: table %.1f vs lightweight %.2f items/node = %.2fx", detail.empty() ? "" : "; ",
                      pt.label.c_str(), table, light, ratio);
    }
    return {dense_ratio >= 10.0, detail + " (dense topology needs >= 10x)"};
}

Outcome detector_parity() {
    const auto p = make_preset("coding-compare", true);
    const double light = cell_mean(p, "nobcr", "static", delivery);
    const double table = cell_mean(p, "nobcr-table", "static", delivery);
    const double diff = 100 * std::abs(light - table);
    return {diff <= 1.0, fmt("static, %u seeds: delivery lightweight %.4f vs reception table %.4f (%.2f pts, need <= 1)",
                             p.trials, light, table, diff)};
}

// ---------------------------------------------------------------- 13

Outcome determinism() {
    ExperimentPreset p = make_preset("sparse-sources", true);
    p.trials = 2;
    p.sweep = {p.sweep.front()};
    p.variants = {"nobcr", "codeb", "pdp-cu"};
    std::ostringstream a, b;
    write_raw(a, run_experiment(p));
    write_raw(b, run_experiment(p));
    const bool same = a.str() == b.str();
    return {same, fmt("%zu raw rows written twice, byte-identical: %s", p.variants.size() * p.trials,
                      same ? "yes" : "no")};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*fn)();
    };
    const Criterion criteria[] = {
        {"mcu-oracle-equivalence", mcu_oracle_equivalence},
        {"bitmap-rollover", bitmap_rollover},
        {"reordering-regression", reordering_regression},
        {"gratis-rule-regression", gratis_rule_regression},
        {"zero-decode-failures", perfect_information_decoding},
        {"multiprev-subset", subset_property},
        {"greedy-cover-quality", greedy_cover_quality},
        {"rad-insensitivity", rad_insensitivity},
        {"transmission-ordering", transmission_ordering},
        {"coded-redundancy-delay", coded_redundancy_delay},
        {"storage-gain", storage_gain},
        {"detector-parity", detector_parity},
        {"determinism", determinism},
    };
    int failed = 0, index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2d %-24s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed (%zu simulation runs)\n", index - failed, index, g_runs.runs());
    return failed == 0 ? 0 : 1;
}
