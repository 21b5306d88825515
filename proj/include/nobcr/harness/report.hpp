#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nobcr/harness/csv.hpp"
#include "nobcr/harness/stats.hpp"

namespace nobcr {

/// 100 x (1 - candidate / baseline); empty when the baseline is zero. Negative values are kept.
inline std::optional<double> reduction_percent(double baseline, double candidate) {
    if (baseline == 0.0) return std::nullopt;
    return 100.0 * (1.0 - candidate / baseline);
}

struct ReductionRow {
    std::string sweep_value;
    double baseline = 0.0;
    double candidate = 0.0;
    std::optional<double> reduction;
};

namespace detail {

/// Mean total transmissions per sweep value, from either a raw or an aggregate table.
inline std::map<std::string, double> tx_by_sweep(const csv::Table& t, const std::string& variant,
                                                 std::vector<std::string>& order) {
    const bool aggregated = t.has_column("total_transmissions_mean");
    const std::size_t c_tx = t.column(aggregated ? "total_transmissions_mean" : "total_transmissions");
    const std::size_t c_value = t.column("sweep_value");
    const std::size_t c_variant = t.column("variant");

    std::string chosen = variant;
    if (chosen.empty()) {
        for (const auto& r : t.rows) {
            if (chosen.empty()) chosen = r[c_variant];
            if (r[c_variant] != chosen)
                throw csv::CsvError("table holds several variants; pick one with --baseline-variant/--candidate-variant");
        }
    }

    std::map<std::string, std::vector<double>> values;
    for (const auto& r : t.rows) {
        if (r[c_variant] != chosen) continue;
        auto [it, fresh] = values.try_emplace(r[c_value]);
        if (fresh) order.push_back(r[c_value]);
        it->second.push_back(csv::to_double(r[c_tx]));
    }
    if (values.empty()) throw csv::CsvError("no rows for variant " + chosen);
    std::map<std::string, double> out;
    for (auto& [k, xs] : values) out[k] = mean(xs);
    return out;
}

}  // namespace detail

/// Pairs the two tables on sweep value; every baseline sweep value must exist in the candidate.
inline std::vector<ReductionRow> transmission_reduction(const csv::Table& baseline, const csv::Table& candidate,
                                                        const std::string& baseline_variant = {},
                                                        const std::string& candidate_variant = {}) {
    std::vector<std::string> order, ignored;
    const auto base = detail::tx_by_sweep(baseline, baseline_variant, order);
    const auto cand = detail::tx_by_sweep(candidate, candidate_variant, ignored);
    std::vector<ReductionRow> rows;
    for (const auto& v : order) {
        auto it = cand.find(v);
        if (it == cand.end()) throw csv::CsvError("sweep value " + v + " missing from candidate");
        rows.push_back({v, base.at(v), it->second, reduction_percent(base.at(v), it->second)});
    }
    return rows;
}

inline std::string format_reduction(const std::optional<double>& r) {
    if (!r) return "undefined";
    const double rounded = std::round(*r * 100.0) / 100.0;
    return csv::format_double(rounded == 0.0 ? 0.0 : rounded);
}

inline void write_reduction(std::ostream& out, const std::vector<ReductionRow>& rows) {
    csv::write_row(out, {"sweep_value", "baseline_tx", "candidate_tx", "reduction_pct"});
    for (const auto& r : rows)
        csv::write_row(out, {r.sweep_value, csv::format_double(r.baseline), csv::format_double(r.candidate),
                             format_reduction(r.reduction)});
}

}  // namespace nobcr
