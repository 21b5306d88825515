#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nobcr/harness/csv.hpp"
#include "nobcr/harness/presets.hpp"
#include "nobcr/harness/stats.hpp"
#include "nobcr/sim/simulator.hpp"

namespace nobcr {

inline constexpr const char* kRawSchema = "nobcr-raw v1";
inline constexpr const char* kAggregateSchema = "nobcr-aggregate v1";
inline constexpr const char* kCdfSchema = "nobcr-cdf v1";

struct MetricColumn {
    std::string name;
    std::function<double(const RunMetrics&)> get;
    bool integral = false;
};

inline const std::vector<MetricColumn>& metric_columns() {
    auto d = [](std::string n, auto f) { return MetricColumn{std::move(n), f, false}; };
    auto i = [](std::string n, auto f) { return MetricColumn{std::move(n), f, true}; };
    static const std::vector<MetricColumn> cols = {
        d("delivery_ratio", [](const RunMetrics& m) { return m.delivery_ratio; }),
        i("total_transmissions", [](const RunMetrics& m) { return double(m.total_transmissions); }),
        d("forwards_per_packet", [](const RunMetrics& m) { return m.forwards_per_packet; }),
        d("median_delay", [](const RunMetrics& m) { return m.median_delay; }),
        d("mean_delay", [](const RunMetrics& m) { return m.mean_delay; }),
        i("native_tx", [](const RunMetrics& m) { return double(m.native_tx); }),
        i("encoded_tx", [](const RunMetrics& m) { return double(m.encoded_tx); }),
        i("encoded_with_gratis", [](const RunMetrics& m) { return double(m.encoded_with_gratis); }),
        d("coded_fraction", [](const RunMetrics& m) { return m.coded_fraction; }),
        d("coded_fraction_gratis", [](const RunMetrics& m) { return m.coded_fraction_gratis; }),
        i("decode_failures", [](const RunMetrics& m) { return double(m.decode_failures); }),
        i("coding_opportunities", [](const RunMetrics& m) { return double(m.coding_opportunities); }),
        d("stored_items_avg", [](const RunMetrics& m) { return m.stored_items_avg; }),
        d("stored_items_lightweight_avg", [](const RunMetrics& m) { return m.stored_items_lightweight_avg; }),
        d("stored_items_table_avg", [](const RunMetrics& m) { return m.stored_items_table_avg; }),
        i("generated", [](const RunMetrics& m) { return double(m.generated); }),
        i("deliveries", [](const RunMetrics& m) { return double(m.deliveries); }),
        i("hello_tx", [](const RunMetrics& m) { return double(m.hello_tx); }),
        i("collisions", [](const RunMetrics& m) { return double(m.collisions); }),
        i("queue_drops", [](const RunMetrics& m) { return double(m.queue_drops); }),
        i("termination_drops", [](const RunMetrics& m) { return double(m.termination_drops); }),
        i("gratis_expired", [](const RunMetrics& m) { return double(m.gratis_expired); }),
        i("payload_mismatches", [](const RunMetrics& m) { return double(m.payload_mismatches); }),
        i("gratis_state_violations", [](const RunMetrics& m) { return double(m.gratis_state_violations); }),
        i("repeat_native_tx", [](const RunMetrics& m) { return double(m.repeat_native_tx); }),
    };
    return cols;
}

inline const std::vector<std::string>& raw_key_columns() {
    static const std::vector<std::string> k = {"preset",      "variant", "sweep_key", "sweep_value", "seed",
                                               "termination", "coding",  "pruning",   "coded_redundancy"};
    return k;
}

inline std::vector<std::string> raw_header() {
    std::vector<std::string> h = raw_key_columns();
    for (const auto& c : metric_columns()) h.push_back(c.name);
    return h;
}

struct RunRecord {
    std::string preset;
    std::string variant;
    std::string sweep_key;
    std::string sweep_value;
    std::uint64_t seed = 0;
    ScenarioConfig config;
    RunMetrics metrics;
};

inline std::vector<std::string> raw_row(const RunRecord& r) {
    std::vector<std::string> row = {r.preset,
                                    r.variant,
                                    r.sweep_key,
                                    r.sweep_value,
                                    std::to_string(r.seed),
                                    std::string(to_string(r.config.termination)),
                                    std::string(to_string(r.config.coding)),
                                    std::string(to_string(r.config.pruning)),
                                    r.config.coded_redundancy ? "true" : "false"};
    for (const auto& c : metric_columns()) {
        const double v = c.get(r.metrics);
        row.push_back(c.integral ? std::to_string(static_cast<std::uint64_t>(v)) : csv::format_double(v));
    }
    return row;
}

inline void write_raw(std::ostream& out, const std::vector<RunRecord>& records) {
    out << "# " << kRawSchema << '\n';
    csv::write_row(out, raw_header());
    for (const auto& r : records) csv::write_row(out, raw_row(r));
}

/**
 * Mean and 95% half-width of every numeric column per (variant, sweep value).
 * Groups appear in first-seen order of the input; values are sorted before
 * summing so the numbers do not depend on row order.
 */
inline csv::Table aggregate(const csv::Table& raw) {
    const std::size_t c_variant = raw.column("variant");
    const std::size_t c_key = raw.column("sweep_key");
    const std::size_t c_value = raw.column("sweep_value");
    const std::size_t c_preset = raw.column("preset");

    std::vector<std::size_t> metric_cols;
    for (std::size_t i = 0; i < raw.header.size(); ++i) {
        const auto& h = raw.header[i];
        if (std::find(raw_key_columns().begin(), raw_key_columns().end(), h) == raw_key_columns().end())
            metric_cols.push_back(i);
    }

    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<const std::vector<std::string>*>> groups;
    for (const auto& row : raw.rows) {
        const auto key = std::make_pair(row[c_variant], row[c_value]);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.push_back(&row);
    }
    // first-seen order still depends on input order; sort for a canonical layout
    std::stable_sort(order.begin(), order.end());

    csv::Table out;
    out.schema = kAggregateSchema;
    out.header = {"preset", "variant", "sweep_key", "sweep_value", "n"};
    for (std::size_t c : metric_cols) {
        out.header.push_back(raw.header[c] + "_mean");
        out.header.push_back(raw.header[c] + "_ci95");
    }
    for (const auto& key : order) {
        const auto& rows = groups.at(key);
        std::vector<std::string> line = {(*rows.front())[c_preset], key.first, (*rows.front())[c_key], key.second,
                                         std::to_string(rows.size())};
        for (std::size_t c : metric_cols) {
            std::vector<double> xs;
            for (const auto* r : rows) xs.push_back(csv::to_double((*r)[c]));
            std::sort(xs.begin(), xs.end());
            line.push_back(csv::format_double(mean(xs)));
            line.push_back(csv::format_double(ci95_halfwidth(xs)));
        }
        out.rows.push_back(std::move(line));
    }
    return out;
}

inline void write_table(std::ostream& out, const csv::Table& t) {
    if (!t.schema.empty()) out << "# " << t.schema << '\n';
    csv::write_row(out, t.header);
    for (const auto& r : t.rows) csv::write_row(out, r);
}

inline csv::Table to_table(const std::vector<RunRecord>& records) {
    csv::Table t;
    t.schema = kRawSchema;
    t.header = raw_header();
    for (const auto& r : records) t.rows.push_back(raw_row(r));
    return t;
}

/**
 * Cumulative delivered fraction against delay, pooled over seeds per
 * (variant, sweep value). The fraction is normalized by generated x (N-1),
 * so each curve levels off at the delivery ratio. At most `max_points`
 * points per curve are written.
 */
inline void write_cdf(std::ostream& out, const std::vector<RunRecord>& records, std::size_t max_points = 200) {
    out << "# " << kCdfSchema << '\n';
    csv::write_row(out, {"variant", "sweep_value", "delay", "cumulative_delivered"});
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, double>> pooled;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.variant, r.sweep_value);
        auto [it, fresh] = pooled.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.first.insert(it->second.first.end(), r.metrics.delays.begin(), r.metrics.delays.end());
        it->second.second += static_cast<double>(r.metrics.generated) * static_cast<double>(r.config.n_nodes - 1);
    }
    for (const auto& key : order) {
        auto& [delays, denom] = pooled.at(key);
        if (delays.empty() || denom <= 0) continue;
        std::sort(delays.begin(), delays.end());
        const std::size_t m = delays.size();
        const std::size_t k = std::min(max_points, m);
        for (std::size_t j = 1; j <= k; ++j) {
            const std::size_t idx = (j * m + k - 1) / k - 1;
            csv::write_row(out, {key.first, key.second, csv::format_double(delays[idx]),
                                 csv::format_double(static_cast<double>(idx + 1) / denom)});
        }
    }
}

struct RunOptions {
    std::vector<std::string> overrides;  // key=value applied last
    std::vector<std::string> variants;   // empty: the preset's list
    std::uint64_t seed_first = 0;        // 0: the preset's seeds
    std::uint64_t seed_last = 0;
    unsigned jobs = 1;
    std::ostream* progress = nullptr;
};

struct RunTuple {
    std::string variant;
    SweepPoint point;
    std::uint64_t seed = 0;
};

inline std::vector<RunTuple> expand_tuples(const ExperimentPreset& preset, const RunOptions& opt) {
    const auto& variants = opt.variants.empty() ? preset.variants : opt.variants;
    std::uint64_t first = preset.first_seed;
    std::uint64_t last = preset.first_seed + preset.trials - 1;
    if (opt.seed_first != 0) {
        first = opt.seed_first;
        last = opt.seed_last;
    }
    if (last < first) throw ConfigError("empty seed range");
    std::vector<RunTuple> out;
    for (const auto& v : variants)
        for (const auto& p : preset.sweep)
            for (std::uint64_t s = first; s <= last; ++s) out.push_back({v, p, s});
    return out;
}

inline std::string describe(const RunTuple& t) {
    return "variant=" + t.variant + " sweep=" + t.point.label + " seed=" + std::to_string(t.seed);
}

/**
 * Runs every tuple, optionally on several threads (each run is isolated and
 * single-threaded). Any failure aborts the batch naming the offending tuple.
 */
inline std::vector<RunRecord> run_experiment(const ExperimentPreset& preset, const RunOptions& opt = {}) {
    const auto tuples = expand_tuples(preset, opt);
    // validate everything up front so a bad override fails before any work
    std::vector<ScenarioConfig> configs;
    for (const auto& t : tuples) {
        try {
            configs.push_back(preset.config_for(t.variant, t.point, t.seed, opt.overrides));
        } catch (const std::exception& e) {
            throw ConfigError(describe(t) + ": " + e.what());
        }
    }

    std::vector<RunRecord> records(tuples.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex mu;

    auto worker = [&] {
        for (std::size_t i = next++; i < tuples.size() && !failed; i = next++) {
            const auto& t = tuples[i];
            try {
                Simulator sim(configs[i]);
                RunRecord r{preset.name, t.variant, preset.sweep_key, t.point.label, t.seed, configs[i], sim.run()};
                records[i] = std::move(r);
                if (opt.progress) {
                    std::lock_guard lock(mu);
                    *opt.progress << "[" << (i + 1) << "/" << tuples.size() << "] " << describe(t) << '\n';
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                if (!failed.exchange(true))
                    error = std::make_exception_ptr(std::runtime_error("run failed for " + describe(t) + ": " + e.what()));
            }
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(tuples.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return records;
}

struct ExperimentFiles {
    std::filesystem::path raw;
    std::filesystem::path aggregate;
    std::filesystem::path cdf;
};

inline ExperimentFiles write_experiment(const std::filesystem::path& dir, const std::string& stem,
                                        const std::vector<RunRecord>& records) {
    std::filesystem::create_directories(dir);
    ExperimentFiles f{dir / (stem + "_raw.csv"), dir / (stem + "_aggregate.csv"), dir / (stem + "_cdf.csv")};
    auto open = [](const std::filesystem::path& p) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        return out;
    };
    {
        auto out = open(f.raw);
        write_raw(out, records);
    }
    {
        auto out = open(f.aggregate);
        write_table(out, aggregate(to_table(records)));
    }
    {
        auto out = open(f.cdf);
        write_cdf(out, records);
    }
    return f;
}

}  // namespace nobcr
