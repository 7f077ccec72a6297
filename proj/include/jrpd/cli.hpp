#pragma once

// The jrpd command line: gen, run, opt, metrics, bench, verify.
//
// Exit codes: 0 ok, 1 some bench cells failed, 2 usage or parse error,
// 3 protocol violation, 4 exact oracle limit, 5 infeasible schedule.

#include <glob.h>

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jrpd/algorithms.hpp"
#include "jrpd/bench.hpp"
#include "jrpd/generators.hpp"
#include "jrpd/io.hpp"
#include "jrpd/metrics.hpp"
#include "jrpd/opt.hpp"

namespace jrpd {

enum ExitCode : int {
    exit_ok = 0,
    exit_partial = 1,
    exit_usage = 2,
    exit_protocol = 3,
    exit_oracle_limit = 4,
    exit_infeasible = 5,
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace cli_detail {

inline Mode parse_mode(const std::string& s) {
    if (s == "predicted") return Mode::predicted;
    if (s == "clairvoyant") return Mode::clairvoyant;
    throw UsageError("unknown mode '" + s + "' (expected predicted or clairvoyant)");
}

inline NoiseModel parse_noise(const std::string& s, std::uint64_t seed) {
    auto number = [&](const std::string& text) -> std::int64_t {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(text, &pos);
            if (pos == text.size() && v >= 0) return v;
        } catch (const std::exception&) {
        }
        throw UsageError("bad noise parameter in '" + s + "'");
    };
    if (s == "exact") return NoiseModel::exact();
    if (s.rfind("shift:", 0) == 0) return NoiseModel::shift(number(s.substr(6)));
    if (s.rfind("target:", 0) == 0) {
        return NoiseModel::target_inversions(static_cast<std::size_t>(number(s.substr(7))), seed);
    }
    throw UsageError("unknown noise model '" + s + "' (expected exact, shift:K or target:B)");
}

inline WeightModel parse_weights(const std::string& s) {
    try {
        if (s.rfind("grid:", 0) == 0) {
            std::int64_t steps = std::stoll(s.substr(5));
            if (steps >= 1) return WeightModel::grid(steps);
        } else if (s.rfind("constant:", 0) == 0) {
            return WeightModel::constant(Weight::parse(s.substr(9)));
        }
    } catch (const std::exception&) {
    }
    throw UsageError("unknown weight model '" + s + "' (expected grid:G or constant:W)");
}

inline std::string sidecar_path(const std::string& out) {
    const std::string ext = ".json";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
        return out.substr(0, out.size() - ext.size()) + ".meta.json";
    }
    return out + ".meta.json";
}

inline std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
    std::vector<std::string> paths;
    for (const auto& p : patterns) {
        glob_t g{};
        if (::glob(p.c_str(), 0, nullptr, &g) == 0) {
            for (std::size_t k = 0; k < g.gl_pathc; ++k) {
                const std::string path = g.gl_pathv[k];
                // Adversary sidecars sit next to their instances.
                if (!path.ends_with(".meta.json")) paths.push_back(path);
            }
        } else {
            paths.push_back(p);  // let the reader report it
        }
        ::globfree(&g);
    }
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    return paths;
}

inline std::vector<std::string> split_list(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& entry : raw) {
        std::size_t start = 0;
        while (start <= entry.size()) {
            std::size_t comma = entry.find(',', start);
            std::string part = entry.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!part.empty()) out.push_back(part);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    return out;
}

inline Json metrics_json(const MetricsReport& m) {
    Json j;
    j["request_inversions"] = m.request_inversions.count();
    j["request_inversions_floored"] = m.request_inversions.floored();
    Json rp = Json::array();
    for (const auto& [a, b] : m.request_inversions.pairs) rp.push_back({a, b});
    j["request_inversion_pairs"] = std::move(rp);
    j["item_inversions"] = m.item_inversions.count();
    Json ip = Json::array();
    for (const auto& [a, b] : m.item_inversions.pairs) ip.push_back({a, b});
    j["item_inversion_pairs"] = std::move(ip);
    j["instantaneous"] = m.instantaneous_item_inversions;
    j["eta"] = m.eta;
    j["peak_time"] = m.peak_time ? Json(*m.peak_time) : Json(nullptr);
    return j;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using namespace cli_detail;
    CLI::App app{"Online joint replenishment with predicted deadlines", "jrpd"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate an instance file");
    gen->require_subcommand(1);
    std::string gen_out;
    std::size_t rb_k = 0, ce_n = 0, adv_n = 0;
    std::string adv_c = "1", adv_alg = "local-greedy";
    std::size_t rnd_items = 0, rnd_requests = 0;
    Tick rnd_horizon = 0;
    std::string rnd_noise = "exact", rnd_weights = "grid:4";
    std::uint64_t rnd_seed = 0;

    auto* gen_rb = gen->add_subcommand("red-black", "Red/black instance");
    gen_rb->add_option("--k", rb_k, "Items per color")->required()->check(CLI::PositiveNumber);
    auto* gen_ce = gen->add_subcommand("cheap-expensive", "Cheap/expensive instance");
    gen_ce->add_option("--n", ce_n, "Items per class")->required()->check(CLI::Range(2, 1 << 20));
    auto* gen_adv = gen->add_subcommand("adversary", "Adaptive adversary against a policy");
    gen_adv->add_option("--n", adv_n, "Item count (perfect square)")->required();
    gen_adv->add_option("--c", adv_c, "Threshold c >= 1, integer or p/q")->capture_default_str();
    gen_adv->add_option("--alg", adv_alg, "Policy to play against")->capture_default_str();
    auto* gen_rnd = gen->add_subcommand("random", "Seeded random instance");
    gen_rnd->add_option("--items", rnd_items)->required()->check(CLI::PositiveNumber);
    gen_rnd->add_option("--requests", rnd_requests)->required()->check(CLI::PositiveNumber);
    gen_rnd->add_option("--horizon", rnd_horizon)->required()->check(CLI::PositiveNumber);
    gen_rnd->add_option("--noise", rnd_noise, "exact, shift:K or target:B")->capture_default_str();
    gen_rnd->add_option("--weights", rnd_weights, "grid:G or constant:W")->capture_default_str();
    gen_rnd->add_option("--seed", rnd_seed)->capture_default_str();
    for (auto* sub : {gen_rb, gen_ce, gen_adv, gen_rnd}) sub->add_option("--out", gen_out, "Output path")->required();

    // run
    auto* run = app.add_subcommand("run", "Run a policy on an instance and print its cost");
    std::string run_alg, run_instance, run_mode = "predicted", run_out;
    run->add_option("--alg", run_alg, "Policy name")->required();
    run->add_option("instance", run_instance)->required();
    run->add_option("--mode", run_mode, "predicted or clairvoyant")->capture_default_str();
    run->add_option("--out", run_out, "Schedule output path");

    // opt
    auto* opt = app.add_subcommand("opt", "Offline optimum or bounds");
    std::string opt_instance, opt_witness;
    bool opt_exact = false, opt_bounds = false;
    opt->add_option("instance", opt_instance)->required();
    auto* exact_flag = opt->add_flag("--exact", opt_exact, "Exact optimum by enumeration");
    auto* bounds_flag = opt->add_flag("--bounds", opt_bounds, "Lower bound and heuristic upper bound");
    exact_flag->excludes(bounds_flag);
    opt->add_option("--witness", opt_witness, "Write the witness schedule here");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Prediction error measures as JSON");
    std::string metrics_instance;
    metrics->add_option("instance", metrics_instance)->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark policies over instance files");
    std::vector<std::string> bench_algs, bench_instances;
    std::string bench_out, bench_plot, bench_mode = "predicted";
    bench->add_option("--algs", bench_algs, "Comma separated policy names")->required();
    bench->add_option("--instances", bench_instances, "Instance files or glob patterns")->required();
    bench->add_option("--out", bench_out, "CSV output path")->required();
    bench->add_option("--plot-data", bench_plot, "eta/ratio data file");
    bench->add_option("--mode", bench_mode, "predicted or clairvoyant");

    // verify
    auto* verify = app.add_subcommand("verify", "Check a schedule against an instance");
    std::string verify_instance, verify_schedule;
    verify->add_option("instance", verify_instance)->required();
    verify->add_option("schedule", verify_schedule)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (gen->parsed()) {
            if (gen_rb->parsed()) {
                write_instance(gen_out, gen_red_black(rb_k));
            } else if (gen_ce->parsed()) {
                write_instance(gen_out, gen_cheap_expensive(ce_n));
            } else if (gen_adv->parsed()) {
                Rational c = Rational::parse(adv_c);
                AdversaryOutcome outcome = gen_adversary(algorithm_factory(adv_alg), adv_n, c);
                write_instance(gen_out, outcome.instance);
                Json meta;
                meta["algorithm"] = adv_alg;
                meta["n"] = outcome.n;
                meta["c"] = c.str();
                meta["case"] = to_string(outcome.kind);
                meta["x"] = outcome.services_per_phase;
                meta["phases"] = outcome.phases;
                meta["triggering_items"] = outcome.triggering_items;
                write_text(sidecar_path(gen_out), dump(meta));
            } else if (gen_rnd->parsed()) {
                auto generated = gen_random(rnd_items, rnd_requests, rnd_horizon, parse_weights(rnd_weights),
                                            parse_noise(rnd_noise, rnd_seed), rnd_seed);
                write_instance(gen_out, generated.instance);
                if (rnd_noise.rfind("target:", 0) == 0) {
                    err << "achieved request inversions: " << generated.request_inversions << "\n";
                }
            }
            return exit_ok;
        }

        if (run->parsed()) {
            const Instance inst = read_instance(run_instance);
            const Mode mode = parse_mode(run_mode);
            auto alg = make_algorithm(run_alg, Catalog::of(inst));
            const SimulationResult result = simulate(inst, *alg, mode);
            if (!run_out.empty()) write_schedule(run_out, result.schedule);
            out << schedule_cost(result.schedule, inst).total << "\n";
            return exit_ok;
        }

        if (opt->parsed()) {
            const Instance inst = read_instance(opt_instance);
            const OptResult result = opt_bounds ? optimal_bounds(inst) : optimal_exact(inst);
            if (result.kind == OptKind::exact) {
                out << result.cost() << "\n";
            } else {
                out << "lower " << result.lower << "\nupper " << result.upper << "\n";
            }
            if (!opt_witness.empty() && result.schedule) write_schedule(opt_witness, *result.schedule);
            return exit_ok;
        }

        if (metrics->parsed()) {
            const Instance inst = read_instance(metrics_instance);
            out << metrics_json(compute_metrics(inst)).dump(1) << "\n";
            return exit_ok;
        }

        if (bench->parsed()) {
            const Mode mode = parse_mode(bench_mode);
            const auto algs = split_list(bench_algs);
            for (const auto& a : algs) algorithm_factory(a);
            std::vector<NamedInstance> instances;
            for (const auto& path : expand_globs(bench_instances)) {
                instances.push_back({std::filesystem::path(path).stem().string(), read_instance(path)});
            }
            const auto rows = run_bench(instances, algs, mode);
            write_text(bench_out, to_csv(rows));
            if (!bench_plot.empty()) write_text(bench_plot, to_plot_data(rows));
            std::size_t failed = 0;
            for (const auto& r : rows) {
                if (!r.ok()) {
                    ++failed;
                    err << r.instance << " / " << r.algorithm << ": " << r.status << "\n";
                }
            }
            out << rows.size() << " rows, " << failed << " failed\n";
            return failed ? exit_partial : exit_ok;
        }

        if (verify->parsed()) {
            const Instance inst = read_instance(verify_instance);
            const Schedule schedule = read_schedule(verify_schedule);
            const FeasibilityReport report = validate_schedule(schedule, inst);
            if (!report.feasible()) {
                out << "infeasible\n";
                for (const auto& s : report.structural) out << "  " << s << "\n";
                for (const auto& v : report.requests) out << "  request " << v.request << ": " << v.reason << "\n";
                return exit_infeasible;
            }
            out << "feasible\ncost " << schedule_cost(schedule, inst).total << "\n";
            return exit_ok;
        }
    } catch (const SimulationError& e) {
        err << "protocol violation: " << e.what() << "\n" << trace_excerpt(e.partial_trace());
        return exit_protocol;
    } catch (const AdversaryError& e) {
        err << "protocol violation: " << e.what() << "\n";
        return exit_protocol;
    } catch (const OracleLimitExceeded& e) {
        err << e.what() << "\n";
        return exit_oracle_limit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace jrpd
