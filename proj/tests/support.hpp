#pragma once

// Test-side oracles and fixtures. The oracles here deliberately avoid the
// library's own algorithms: brute force over assignments, per-tick sweeps.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "jrpd/jrpd.hpp"

namespace jrpd::testing {

struct Req {
    ItemId item;
    Tick arrival;
    Tick deadline;
    Tick predicted;
};

inline Instance make_instance(Weight joint, std::vector<Weight> weights, std::vector<Req> reqs) {
    Instance inst;
    inst.joint_cost = joint;
    for (ItemId i = 0; i < weights.size(); ++i) inst.items.push_back({i, weights[i]});
    for (const auto& r : reqs) inst.requests.push_back({inst.requests.size(), r.item, r.arrival, r.deadline, r.predicted});
    inst.tie_permutation = identity_permutation(weights.size());
    return inst;
}

/// Minimum cost over every assignment of requests to candidate service
/// times (all arrivals and deadlines), each request to a time inside its
/// window. The set of used times is the service set.
inline Weight brute_force_opt(const Instance& inst) {
    std::vector<Tick> candidates;
    for (const auto& q : inst.requests) {
        candidates.push_back(q.arrival);
        candidates.push_back(q.deadline);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<std::vector<Tick>> options;
    for (const auto& q : inst.requests) {
        std::vector<Tick> opts;
        for (Tick t : candidates)
            if (q.arrival <= t && t <= q.deadline) opts.push_back(t);
        options.push_back(opts);
    }
    std::optional<Weight> best;
    std::vector<std::size_t> choice(inst.requests.size(), 0);
    while (true) {
        std::set<Tick> times;
        std::set<std::pair<Tick, ItemId>> sends;
        for (std::size_t r = 0; r < choice.size(); ++r) {
            times.insert(options[r][choice[r]]);
            sends.insert({options[r][choice[r]], inst.requests[r].item});
        }
        Weight cost = inst.joint_cost * Weight(static_cast<std::int64_t>(times.size()));
        for (const auto& [t, i] : sends) cost += inst.items[i].weight;
        if (!best || cost < *best) best = cost;

        std::size_t r = 0;
        while (r < choice.size() && ++choice[r] == options[r].size()) choice[r++] = 0;
        if (r == choice.size()) break;
    }
    return best.value_or(Weight{});
}

/// Instantaneous item inversions by checking every tick of the horizon.
inline std::size_t dense_instantaneous(const Instance& inst) {
    if (inst.requests.empty()) return 0;
    Tick lo = inst.requests[0].arrival, hi = inst.requests[0].deadline;
    for (const auto& q : inst.requests) {
        lo = std::min(lo, q.arrival);
        hi = std::max(hi, q.deadline);
    }
    std::size_t best = 0;
    for (Tick t = lo; t <= hi; ++t) {
        std::set<std::pair<ItemId, ItemId>> pairs;
        for (const auto& a : inst.requests) {
            for (const auto& b : inst.requests) {
                if (a.item >= b.item) continue;
                if (a.arrival > t || a.deadline < t || b.arrival > t || b.deadline < t) continue;
                const Tick dd = a.deadline - b.deadline, dp = a.predicted - b.predicted;
                if ((dd < 0 && dp > 0) || (dd > 0 && dp < 0)) pairs.insert({a.item, b.item});
            }
        }
        best = std::max(best, pairs.size());
    }
    return best;
}

inline Weight cost_of(const Instance& inst, const std::string& alg, Mode mode = Mode::predicted) {
    auto a = make_algorithm(alg, Catalog::of(inst));
    return schedule_cost(simulate(inst, *a, mode).schedule, inst).total;
}

inline SimulationResult run(const Instance& inst, const std::string& alg, Mode mode = Mode::predicted) {
    auto a = make_algorithm(alg, Catalog::of(inst));
    return simulate(inst, *a, mode);
}

struct RemovalOutcome {
    bool identical = false;
    std::size_t removed = 0;
    std::string detail;
};

/// Runs `alg` on a random subset Q' of the requests, and again on all of Q
/// with Q \ Q' removed at random times inside their windows. A removal time
/// is pulled earlier (never before arrival) whenever the full run would have
/// served that request first, until no removed request is served.
inline RemovalOutcome check_removal_insensitive(const Instance& inst, const std::string& alg, std::uint64_t seed,
                                                Mode mode = Mode::predicted) {
    std::mt19937_64 rng(seed);
    std::vector<RequestId> keep;
    std::vector<Removal> removals;
    for (const auto& q : inst.requests) {
        if (rng() % 2) {
            keep.push_back(q.id);
        } else {
            removals.push_back({q.id, std::uniform_int_distribution<Tick>(q.arrival, q.deadline)(rng)});
        }
    }
    const Restriction sub = restrict_requests(inst, keep);
    const Schedule alone = lift_schedule(run(sub.instance, alg, mode).schedule, sub);

    RemovalOutcome out;
    out.removed = removals.size();
    for (int round = 0; round < 64; ++round) {
        auto a = make_algorithm(alg, Catalog::of(inst));
        const Schedule full = simulate(inst, *a, mode, removals).schedule;
        bool adjusted = false;
        for (const auto& s : full.services) {
            for (auto& r : removals) {
                if (std::binary_search(s.served.begin(), s.served.end(), r.request)) {
                    r.tick = std::uniform_int_distribution<Tick>(inst.requests[r.request].arrival, s.time)(rng);
                    adjusted = true;
                }
            }
        }
        if (!adjusted) {
            out.identical = full == alone;
            if (!out.identical) out.detail = alg + ": schedules differ (seed " + std::to_string(seed) + ")";
            return out;
        }
        if (round == 32) {
            for (auto& r : removals) r.tick = inst.requests[r.request].arrival;
        }
    }
    out.detail = alg + ": removal times did not settle";
    return out;
}

/// Small random instance for property tests.
inline Instance random_small(std::uint64_t seed, std::size_t max_items = 8, std::size_t max_requests = 12,
                             NoiseModel::Kind noise = NoiseModel::Kind::exact, std::int64_t steps = 8) {
    std::mt19937_64 rng(seed * 7919 + 17);
    auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
    const auto n = static_cast<std::size_t>(pick(1, static_cast<std::int64_t>(max_items)));
    const auto m = static_cast<std::size_t>(pick(1, static_cast<std::int64_t>(max_requests)));
    const Tick horizon = pick(4, 40);
    NoiseModel nm;
    switch (noise) {
    case NoiseModel::Kind::exact: nm = NoiseModel::exact(); break;
    case NoiseModel::Kind::shift: nm = NoiseModel::shift(pick(1, 10)); break;
    case NoiseModel::Kind::target_inversions:
        nm = NoiseModel::target_inversions(static_cast<std::size_t>(pick(0, 20)), seed);
        break;
    }
    return gen_random(n, m, horizon, WeightModel::grid(steps), nm, seed).instance;
}

struct CorpusEntry {
    std::string name;
    Instance instance;
};

/// Every instance family the suites sweep over: the fixed constructions,
/// adversary outputs against several policies, and seeded random instances
/// with each noise model.
inline const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = [] {
        std::vector<CorpusEntry> out;
        for (std::size_t k = 1; k <= 10; ++k) out.push_back({"red-black-" + std::to_string(k), gen_red_black(k)});
        for (std::size_t n = 2; n <= 8; ++n) {
            out.push_back({"cheap-expensive-" + std::to_string(n), gen_cheap_expensive(n)});
        }
        struct Adv {
            const char* alg;
            std::size_t n;
            std::int64_t c;
        };
        for (const Adv a : {Adv{"local-greedy", 4, 1}, Adv{"local-greedy", 9, 2}, Adv{"local-greedy", 16, 2},
                            Adv{"trigger-only", 4, 1}, Adv{"trivial", 4, 1}, Adv{"heavy-light", 9, 1},
                            Adv{"folklore-greedy", 9, 1}}) {
            try {
                auto outcome = gen_adversary(algorithm_factory(a.alg), a.n, Rational(a.c));
                out.push_back({std::string("adversary-") + a.alg + "-" + std::to_string(a.n), outcome.instance});
            } catch (const AdversaryError&) {
            }
        }
        const NoiseModel::Kind kinds[] = {NoiseModel::Kind::exact, NoiseModel::Kind::shift,
                                          NoiseModel::Kind::target_inversions};
        for (std::uint64_t seed = 0; seed < 900; ++seed) {
            out.push_back({"random-" + std::to_string(seed), random_small(seed, 8, 12, kinds[seed % 3])});
        }
        for (std::uint64_t seed = 0; seed < 150; ++seed) {
            out.push_back({"tiny-" + std::to_string(seed), random_small(100000 + seed, 4, 6, kinds[seed % 3], 4)});
        }
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            out.push_back({"uniform-" + std::to_string(seed),
                           gen_random(1 + seed % 8, 12, 30, WeightModel::constant(Weight(1, 1 + seed % 5)),
                                      NoiseModel::shift(6), seed)
                               .instance});
        }
        return out;
    }();
    return entries;
}

}  // namespace jrpd::testing
