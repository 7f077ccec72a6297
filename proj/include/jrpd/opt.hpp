#pragma once

// Offline optimum: exact subset enumeration over deadline times for small
// instances, and certified lower/upper bounds for anything larger.

#include <algorithm>
#include <bit>
#include <map>
#include <cstdlib>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jrpd/algorithms.hpp"
#include "jrpd/core.hpp"
#include "jrpd/engine.hpp"

namespace jrpd {

enum class OptKind { exact, bounds_only };

inline const char* to_string(OptKind k) { return k == OptKind::exact ? "exact" : "bounds"; }

struct OptResult {
    OptKind kind = OptKind::exact;
    Weight lower;
    Weight upper;  // equals lower for exact results
    std::optional<Schedule> schedule;
    CostBreakdown breakdown;
    /// Which heuristic produced the upper witness (bounds only).
    std::string witness_source;

    const Weight& cost() const { return upper; }
};

class OracleLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultOptLimit = 20;

/// Deadline-count limit for the exact oracle, overridable by JRPD_OPT_LIMIT.
inline std::size_t opt_limit_from_env() {
    if (const char* env = std::getenv("JRPD_OPT_LIMIT")) {
        try {
            std::size_t pos = 0;
            unsigned long v = std::stoul(env, &pos);
            if (pos == std::string(env).size() && v > 0 && v < 63) return v;
        } catch (const std::exception&) {
        }
    }
    return kDefaultOptLimit;
}

/// Minimum number of transmissions of one item using only `chosen_times`
/// (ascending). Returns nullopt when some request has no chosen time in its
/// window. `picks`, when given, receives the chosen transmission times and
/// `assignment` the pick index covering each request (in input order).
inline std::optional<std::size_t> min_item_transmissions(std::span<const Request> item_requests,
                                                         std::span<const Tick> chosen_times,
                                                         std::vector<Tick>* picks = nullptr,
                                                         std::vector<std::size_t>* assignment = nullptr) {
    std::vector<std::size_t> order(item_requests.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return item_requests[a].deadline < item_requests[b].deadline;
    });
    std::vector<Tick> local;
    if (assignment) assignment->assign(item_requests.size(), 0);
    for (std::size_t k : order) {
        const Request& q = item_requests[k];
        if (local.empty() || local.back() < q.arrival) {
            auto it = std::upper_bound(chosen_times.begin(), chosen_times.end(), q.deadline);
            if (it == chosen_times.begin() || *std::prev(it) < q.arrival) return std::nullopt;
            local.push_back(*std::prev(it));
        }
        if (assignment) (*assignment)[k] = local.size() - 1;
    }
    if (picks) *picks = local;
    return local.size();
}

namespace detail {

inline std::vector<Tick> distinct_deadlines(const Instance& instance) {
    std::vector<Tick> out;
    for (const auto& q : instance.requests) out.push_back(q.deadline);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Witness schedule for a fixed set of service times.
inline Schedule schedule_for_times(const Instance& instance, const std::vector<Tick>& times) {
    std::map<Tick, Service> by_time;
    for (ItemId i = 0; i < instance.items.size(); ++i) {
        std::vector<Request> reqs;
        for (const auto& q : instance.requests)
            if (q.item == i) reqs.push_back(q);
        if (reqs.empty()) continue;
        std::vector<Tick> picks;
        std::vector<std::size_t> assignment;
        if (!min_item_transmissions(reqs, times, &picks, &assignment)) {
            throw std::logic_error("witness times do not cover item " + std::to_string(i));
        }
        for (std::size_t k = 0; k < reqs.size(); ++k) {
            Service& s = by_time[picks[assignment[k]]];
            s.time = picks[assignment[k]];
            s.served.push_back(reqs[k].id);
            if (s.items.empty() || s.items.back() != i) s.items.push_back(i);
        }
    }
    Schedule out;
    for (auto& [t, s] : by_time) {
        std::sort(s.items.begin(), s.items.end());
        std::sort(s.served.begin(), s.served.end());
        out.services.push_back(std::move(s));
    }
    return out;
}

}  // namespace detail

/// Exact optimum. Some optimum serves only at request deadlines (any service
/// can move right to the earliest deadline it serves), so it is enough to
/// try every subset of the distinct deadlines.
inline OptResult optimal_exact(const Instance& instance, std::size_t limit = opt_limit_from_env()) {
    const std::vector<Tick> deadlines = detail::distinct_deadlines(instance);
    const std::size_t k = deadlines.size();
    if (k > limit) {
        throw OracleLimitExceeded("instance has " + std::to_string(k) + " distinct deadlines, above the exact limit " +
                                  std::to_string(limit) + "; use the bounds oracle instead");
    }
    if (k >= 63) throw OracleLimitExceeded("too many distinct deadlines for subset enumeration");

    // Per item: requests sorted by deadline, with deadline index and the
    // lowest deadline index not before the arrival.
    struct Slot {
        int deadline_index;
        int arrival_index;
    };
    std::vector<std::vector<Slot>> per_item(instance.items.size());
    {
        std::vector<Request> sorted = instance.requests;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.deadline < b.deadline; });
        for (const auto& q : sorted) {
            int di = static_cast<int>(std::lower_bound(deadlines.begin(), deadlines.end(), q.deadline) - deadlines.begin());
            int ai = static_cast<int>(std::lower_bound(deadlines.begin(), deadlines.end(), q.arrival) - deadlines.begin());
            per_item.at(q.item).push_back({di, ai});
        }
    }

    std::optional<Weight> best;
    std::uint64_t best_mask = 0;
    const std::uint64_t end = std::uint64_t{1} << k;
    for (std::uint64_t mask = instance.requests.empty() ? 0 : 1; mask < end; ++mask) {
        Weight cost = instance.joint_cost * Weight(std::popcount(mask));
        if (best && cost > *best) continue;
        bool feasible = true;
        for (ItemId i = 0; i < per_item.size() && feasible; ++i) {
            int last = -1;
            std::int64_t picks = 0;
            for (const Slot& s : per_item[i]) {
                if (last >= s.arrival_index) continue;
                std::uint64_t upto = mask & ((std::uint64_t{2} << s.deadline_index) - 1);
                int pick = upto ? 63 - std::countl_zero(upto) : -1;
                if (pick < s.arrival_index) {
                    feasible = false;
                    break;
                }
                last = pick;
                ++picks;
            }
            if (feasible && picks) cost += instance.items[i].weight * Weight(picks);
        }
        if (!feasible) continue;
        bool better = !best || cost < *best;
        if (!better && cost == *best) {
            int a = std::popcount(mask), b = std::popcount(best_mask);
            // Fewer services, then the lexicographically earliest time vector.
            if (a != b) {
                better = a < b;
            } else {
                std::uint64_t diff = mask ^ best_mask;
                better = (mask & (diff & (~diff + 1))) != 0;
            }
        }
        if (better) {
            best = cost;
            best_mask = mask;
        }
        if (mask == 0) break;
    }
    if (!best) throw std::logic_error("no feasible service set; instance invalid?");

    std::vector<Tick> times;
    for (std::size_t b = 0; b < k; ++b)
        if (best_mask >> b & 1) times.push_back(deadlines[b]);
    OptResult out;
    out.kind = OptKind::exact;
    out.schedule = detail::schedule_for_times(instance, times);
    out.breakdown = schedule_cost(*out.schedule, instance);
    out.lower = out.upper = *best;
    if (out.breakdown.total != *best) throw std::logic_error("exact oracle witness cost mismatch");
    return out;
}

/// Size of a maximum set of pairwise-disjoint closed request windows.
inline std::size_t max_disjoint(std::vector<Request> requests) {
    std::sort(requests.begin(), requests.end(), [](const auto& a, const auto& b) { return a.deadline < b.deadline; });
    std::size_t count = 0;
    std::optional<Tick> last;
    for (const auto& q : requests) {
        if (!last || q.arrival > *last) {
            ++count;
            last = q.deadline;
        }
    }
    return count;
}

/// w_0 times the disjoint-request count plus, per item, w_i times its own
/// disjoint-request count.
inline Weight opt_lower_bound(const Instance& instance) {
    Weight lower = instance.joint_cost * Weight(static_cast<std::int64_t>(max_disjoint(instance.requests)));
    std::vector<std::vector<Request>> per_item(instance.items.size());
    for (const auto& q : instance.requests) per_item.at(q.item).push_back(q);
    for (ItemId i = 0; i < per_item.size(); ++i) {
        lower += instance.items[i].weight * Weight(static_cast<std::int64_t>(max_disjoint(per_item[i])));
    }
    return lower;
}

/// Moves each service to the earliest deadline among the requests it
/// serves and merges services landing on the same tick. Feasibility is
/// preserved and cost never increases.
inline Schedule shift_to_deadlines(const Schedule& schedule, const Instance& instance) {
    std::map<Tick, Service> by_time;
    for (const auto& s : schedule.services) {
        if (s.served.empty()) continue;
        Tick t = instance.requests.at(s.served.front()).deadline;
        for (RequestId r : s.served) t = std::min(t, instance.requests.at(r).deadline);
        Service& merged = by_time[t];
        merged.time = t;
        merged.served.insert(merged.served.end(), s.served.begin(), s.served.end());
        for (RequestId r : s.served) merged.items.push_back(instance.requests[r].item);
    }
    Schedule out;
    for (auto& [t, s] : by_time) {
        std::sort(s.items.begin(), s.items.end());
        s.items.erase(std::unique(s.items.begin(), s.items.end()), s.items.end());
        std::sort(s.served.begin(), s.served.end());
        out.services.push_back(std::move(s));
    }
    return out;
}

namespace detail {

/// Cost of the best schedule that serves only at `times`, or nullopt.
inline std::optional<Weight> cost_for_times(const Instance& instance,
                                            const std::vector<std::vector<Request>>& per_item,
                                            const std::vector<Tick>& times) {
    std::set<Tick> used;
    Weight cost;
    std::vector<Tick> picks;
    for (ItemId i = 0; i < per_item.size(); ++i) {
        if (per_item[i].empty()) continue;
        auto count = min_item_transmissions(per_item[i], times, &picks);
        if (!count) return std::nullopt;
        cost += instance.items[i].weight * Weight(static_cast<std::int64_t>(*count));
        used.insert(picks.begin(), picks.end());
    }
    return cost + instance.joint_cost * Weight(static_cast<std::int64_t>(used.size()));
}

/// Drops service times one at a time, latest first, whenever that makes the
/// best schedule on the remaining times strictly cheaper. Repeats until a
/// full pass changes nothing.
inline std::vector<Tick> prune_times(const Instance& instance, std::vector<Tick> times) {
    std::vector<std::vector<Request>> per_item(instance.items.size());
    for (const auto& q : instance.requests) per_item.at(q.item).push_back(q);
    std::optional<Weight> current = cost_for_times(instance, per_item, times);
    if (!current) return times;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t k = times.size(); k-- > 0;) {
            std::vector<Tick> trial = times;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
            auto cost = cost_for_times(instance, per_item, trial);
            if (cost && *cost < *current) {
                times = std::move(trial);
                current = cost;
                changed = true;
            }
        }
    }
    return times;
}

}  // namespace detail

/// Lower bound from disjoint windows. Upper bound from the cheapest of a
/// trivial run, a clairvoyant local-greedy run, and pruning of service
/// times started from each of those and from the full deadline set.
inline OptResult optimal_bounds(const Instance& instance) {
    OptResult out;
    out.kind = OptKind::bounds_only;
    out.lower = opt_lower_bound(instance);
    const Catalog catalog = Catalog::of(instance);

    struct Candidate {
        const char* name;
        Mode mode;
    };
    std::vector<Schedule> starts;
    for (const Candidate c : {Candidate{"trivial", Mode::clairvoyant}, Candidate{"local-greedy", Mode::clairvoyant}}) {
        auto alg = make_algorithm(c.name, catalog);
        Schedule s = simulate(instance, *alg, c.mode).schedule;
        starts.push_back(s);
        CostBreakdown cost = schedule_cost(s, instance);
        if (!out.schedule || cost.total < out.upper) {
            out.upper = cost.total;
            out.schedule = std::move(s);
            out.breakdown = cost;
            out.witness_source = std::string(c.name) + " (clairvoyant)";
        }
    }
    if (instance.requests.empty()) return out;
    std::vector<std::vector<Tick>> seeds = {detail::distinct_deadlines(instance)};
    for (const auto& s : starts) {
        std::vector<Tick> times;
        for (const auto& service : shift_to_deadlines(s, instance).services) times.push_back(service.time);
        seeds.push_back(std::move(times));
    }
    const char* names[] = {"pruned deadline set", "pruned trivial run", "pruned local-greedy run"};
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        Schedule s = detail::schedule_for_times(instance, detail::prune_times(instance, seeds[k]));
        CostBreakdown cost = schedule_cost(s, instance);
        if (cost.total < out.upper) {
            out.upper = cost.total;
            out.schedule = std::move(s);
            out.breakdown = cost;
            out.witness_source = names[k];
        }
    }
    return out;
}

}  // namespace jrpd
