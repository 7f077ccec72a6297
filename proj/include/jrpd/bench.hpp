#pragma once

// Benchmark harness: every (instance, algorithm) cell with cost, optimum,
// ratio and prediction-error measures.

#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jrpd/algorithms.hpp"
#include "jrpd/metrics.hpp"
#include "jrpd/opt.hpp"

namespace jrpd {

struct NamedInstance {
    std::string name;
    Instance instance;
};

struct BenchRow {
    std::string instance;
    std::string algorithm;
    Mode mode = Mode::predicted;
    std::optional<Weight> cost;
    OptKind opt_kind = OptKind::exact;
    Weight opt_lower;
    Weight opt_upper;
    std::optional<Weight> ratio;
    std::size_t eta = 1;
    std::size_t item_inversions = 0;
    std::size_t request_inversions = 0;
    std::size_t services = 0;
    double runtime_ms = 0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

/// Exact optimum when the instance is small enough, bounds otherwise.
inline OptResult best_available_opt(const Instance& instance, std::size_t limit = opt_limit_from_env()) {
    try {
        return optimal_exact(instance, limit);
    } catch (const OracleLimitExceeded&) {
        return optimal_bounds(instance);
    }
}

/// Decimal rendering with 15 significant digits.
inline std::string decimal(const Rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", r.to_double());
    return buf;
}

inline std::vector<BenchRow> run_bench(const std::vector<NamedInstance>& instances,
                                       const std::vector<std::string>& algorithms, Mode mode) {
    std::vector<BenchRow> rows;
    for (const auto& [name, inst] : instances) {
        const OptResult opt = best_available_opt(inst);
        const MetricsReport metrics = compute_metrics(inst);
        const Catalog catalog = Catalog::of(inst);
        for (const auto& alg_name : algorithms) {
            BenchRow row;
            row.instance = name;
            row.algorithm = alg_name;
            row.mode = mode;
            row.opt_kind = opt.kind;
            row.opt_lower = opt.lower;
            row.opt_upper = opt.upper;
            row.eta = metrics.eta;
            row.item_inversions = metrics.item_inversions.count();
            row.request_inversions = metrics.request_inversions.count();
            const auto start = std::chrono::steady_clock::now();
            try {
                auto alg = make_algorithm(alg_name, catalog);
                const Schedule schedule = simulate(inst, *alg, mode).schedule;
                row.cost = schedule_cost(schedule, inst).total;
                row.services = schedule.services.size();
                if (!opt.upper.is_zero()) row.ratio = *row.cost / opt.upper;
            } catch (const std::exception& e) {
                row.status = std::string("failed: ") + e.what();
            }
            row.runtime_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string to_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "instance,algorithm,mode,cost,opt_kind,opt_lower,opt_upper,ratio,ratio_decimal,eta,item_inversions,"
           "request_inversions,services,runtime_ms,status\n";
    for (const auto& r : rows) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.runtime_ms);
        out << csv_field(r.instance) << ',' << csv_field(r.algorithm) << ',' << to_string(r.mode) << ','
            << (r.cost ? r.cost->str() : "") << ',' << to_string(r.opt_kind) << ',' << r.opt_lower.str() << ','
            << r.opt_upper.str() << ',' << (r.ratio ? r.ratio->str() : "") << ','
            << (r.ratio ? decimal(*r.ratio) : "") << ',' << r.eta << ',' << r.item_inversions << ','
            << r.request_inversions << ',' << r.services << ',' << ms << ',' << csv_field(r.status) << '\n';
    }
    return out.str();
}

/// One gnuplot data block per algorithm: eta and ratio columns, blocks
/// separated by two blank lines.
inline std::string to_plot_data(const std::vector<BenchRow>& rows) {
    std::map<std::string, std::vector<const BenchRow*>> by_alg;
    std::vector<std::string> order;
    for (const auto& r : rows) {
        if (!r.ok() || !r.ratio) continue;
        if (!by_alg.count(r.algorithm)) order.push_back(r.algorithm);
        by_alg[r.algorithm].push_back(&r);
    }
    std::ostringstream out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k) out << "\n\n";
        out << "# " << order[k] << "\n# eta ratio\n";
        for (const BenchRow* r : by_alg[order[k]]) out << r->eta << ' ' << decimal(*r->ratio) << '\n';
    }
    return out.str();
}

}  // namespace jrpd
