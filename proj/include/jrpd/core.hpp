#pragma once

// Instance and schedule model for the joint replenishment problem with
// deadlines, with exact cost arithmetic and feasibility checks.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jrpd/rational.hpp"

namespace jrpd {

using Weight = Rational;
using Tick = std::int64_t;
using ItemId = std::size_t;
using RequestId = std::size_t;

struct Item {
    ItemId id = 0;
    Weight weight;

    friend bool operator==(const Item&, const Item&) = default;
};

struct Request {
    RequestId id = 0;
    ItemId item = 0;
    Tick arrival = 0;
    Tick deadline = 0;
    Tick predicted = 0;

    friend bool operator==(const Request&, const Request&) = default;
};

struct Instance {
    Weight joint_cost{1};
    std::vector<Item> items;
    std::vector<Request> requests;
    /// tie_permutation[i] is the rank of item i when breaking deadline ties.
    std::vector<std::size_t> tie_permutation;

    std::size_t item_count() const { return items.size(); }
    std::size_t request_count() const { return requests.size(); }

    friend bool operator==(const Instance&, const Instance&) = default;
};

inline std::vector<std::size_t> identity_permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
}

struct Service {
    Tick time = 0;
    std::vector<ItemId> items;     // sorted, unique
    std::vector<RequestId> served; // sorted, unique

    friend bool operator==(const Service&, const Service&) = default;
};

struct Schedule {
    std::vector<Service> services;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct CostBreakdown {
    Weight total;
    Weight joint;
    std::vector<Weight> per_item;  // indexed by item id

    Weight item_total() const {
        Weight sum;
        for (const auto& w : per_item) sum += w;
        return sum;
    }
};

/// Totally ordered key: (time, tie rank of item, request id).
struct OrderKey {
    Tick time = 0;
    std::size_t rank = 0;
    RequestId id = 0;

    friend auto operator<=>(const OrderKey&, const OrderKey&) = default;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_instance(const Instance& instance) {
    ValidationReport report;
    auto add = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    if (instance.joint_cost <= Weight{0}) {
        add("joint cost must be positive");
    }
    const std::size_t n = instance.items.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Item& item = instance.items[i];
        if (item.id != i) {
            add("item " + std::to_string(i) + ": id " + std::to_string(item.id) + " is not its index");
        }
        if (item.weight < Weight{0}) {
            add("item " + std::to_string(i) + ": negative weight");
        }
        if (item.weight > instance.joint_cost) {
            add("item " + std::to_string(i) + ": item weight exceeds joint cost");
        }
    }
    for (std::size_t r = 0; r < instance.requests.size(); ++r) {
        const Request& q = instance.requests[r];
        const std::string tag = "request " + std::to_string(r) + ": ";
        if (q.id != r) add(tag + "id " + std::to_string(q.id) + " is not its index");
        if (q.item >= n) add(tag + "unknown item " + std::to_string(q.item));
        if (q.deadline < q.arrival) add(tag + "deadline before arrival");
        if (q.predicted < q.arrival) add(tag + "predicted deadline before arrival");
    }
    if (instance.tie_permutation.size() != n) {
        add("tie permutation has " + std::to_string(instance.tie_permutation.size()) +
            " entries for " + std::to_string(n) + " items");
    } else {
        std::vector<bool> seen(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t rank = instance.tie_permutation[i];
            if (rank >= n || seen[rank]) {
                add("tie permutation is not a bijection (item " + std::to_string(i) + ")");
                break;
            }
            seen[rank] = true;
        }
    }
    return report;
}

inline std::size_t tie_rank(const Instance& instance, ItemId item) {
    return item < instance.tie_permutation.size() ? instance.tie_permutation[item] : item;
}

inline OrderKey order_key_true(const Request& request, const Instance& instance) {
    return {request.deadline, tie_rank(instance, request.item), request.id};
}

inline OrderKey order_key_pred(const Request& request, const Instance& instance) {
    return {request.predicted, tie_rank(instance, request.item), request.id};
}

inline const Item& item_at(const Instance& instance, ItemId id) {
    if (id >= instance.items.size()) {
        throw std::out_of_range("unknown item id " + std::to_string(id));
    }
    return instance.items[id];
}

/// Joint cost plus the weights of the transmitted items.
inline Weight service_cost(const Service& service, const Instance& instance) {
    Weight cost = instance.joint_cost;
    for (ItemId i : service.items) cost += item_at(instance, i).weight;
    return cost;
}

inline CostBreakdown schedule_cost(const Schedule& schedule, const Instance& instance) {
    CostBreakdown out;
    out.per_item.assign(instance.items.size(), Weight{});
    std::vector<std::int64_t> transmissions(instance.items.size(), 0);
    for (const auto& service : schedule.services) {
        for (ItemId i : service.items) {
            item_at(instance, i);
            ++transmissions[i];
        }
    }
    out.joint = instance.joint_cost * Weight(static_cast<std::int64_t>(schedule.services.size()));
    out.total = out.joint;
    for (std::size_t i = 0; i < transmissions.size(); ++i) {
        out.per_item[i] = instance.items[i].weight * Weight(transmissions[i]);
        out.total += out.per_item[i];
    }
    return out;
}

struct RequestViolation {
    RequestId request = 0;
    std::string reason;
};

struct FeasibilityReport {
    std::vector<RequestViolation> requests;
    std::vector<std::string> structural;

    bool feasible() const { return requests.empty() && structural.empty(); }
};

inline FeasibilityReport validate_schedule(const Schedule& schedule, const Instance& instance) {
    FeasibilityReport report;
    const std::size_t m = instance.requests.size();
    std::vector<std::size_t> times_served(m, 0);
    std::vector<std::string> first_problem(m);

    for (std::size_t s = 0; s < schedule.services.size(); ++s) {
        const Service& service = schedule.services[s];
        const std::string tag = "service " + std::to_string(s) + " at t=" + std::to_string(service.time);
        for (ItemId i : service.items) {
            if (i >= instance.items.size()) report.structural.push_back(tag + ": unknown item " + std::to_string(i));
        }
        for (RequestId r : service.served) {
            if (r >= m) {
                report.structural.push_back(tag + ": unknown request " + std::to_string(r));
                continue;
            }
            ++times_served[r];
            const Request& q = instance.requests[r];
            if (service.time < q.arrival) {
                if (first_problem[r].empty()) first_problem[r] = tag + " is before arrival " + std::to_string(q.arrival);
            } else if (service.time > q.deadline) {
                if (first_problem[r].empty()) first_problem[r] = tag + " is after deadline " + std::to_string(q.deadline);
            }
            if (std::find(service.items.begin(), service.items.end(), q.item) == service.items.end()) {
                if (first_problem[r].empty()) first_problem[r] = tag + " does not transmit item " + std::to_string(q.item);
            }
        }
    }
    for (RequestId r = 0; r < m; ++r) {
        if (times_served[r] == 0) {
            report.requests.push_back({r, "not served"});
        } else if (times_served[r] > 1) {
            report.requests.push_back({r, "served " + std::to_string(times_served[r]) + " times"});
        } else if (!first_problem[r].empty()) {
            report.requests.push_back({r, first_problem[r]});
        }
    }
    return report;
}

/// Sub-instance holding only the kept requests (renumbered densely, original
/// relative order preserved). Items and the tie permutation are unchanged.
struct Restriction {
    Instance instance;
    std::vector<RequestId> original_id;
};

inline Restriction restrict_requests(const Instance& instance, std::span<const RequestId> keep) {
    std::vector<RequestId> ids(keep.begin(), keep.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Restriction out;
    out.instance.joint_cost = instance.joint_cost;
    out.instance.items = instance.items;
    out.instance.tie_permutation = instance.tie_permutation;
    for (RequestId old : ids) {
        if (old >= instance.requests.size()) throw std::out_of_range("unknown request id " + std::to_string(old));
        Request q = instance.requests[old];
        q.id = out.instance.requests.size();
        out.instance.requests.push_back(q);
        out.original_id.push_back(old);
    }
    return out;
}

/// Requests whose item is in `items`.
inline Restriction restrict_items(const Instance& instance, std::span<const ItemId> items) {
    std::vector<bool> keep_item(instance.items.size(), false);
    for (ItemId i : items) keep_item.at(i) = true;
    std::vector<RequestId> keep;
    for (const auto& q : instance.requests) {
        if (q.item < keep_item.size() && keep_item[q.item]) keep.push_back(q.id);
    }
    return restrict_requests(instance, keep);
}

/// Maps a schedule of a restriction back to original request ids.
inline Schedule lift_schedule(const Schedule& schedule, const Restriction& restriction) {
    Schedule out = schedule;
    for (auto& service : out.services) {
        for (auto& r : service.served) r = restriction.original_id.at(r);
        std::sort(service.served.begin(), service.served.end());
    }
    return out;
}

/// Drops requests outside `keep` from every service, then drops services
/// left empty and items left without a served request.
inline Schedule project_schedule(const Schedule& schedule, const Instance& instance,
                                 std::span<const RequestId> keep) {
    std::vector<bool> kept(instance.requests.size(), false);
    for (RequestId r : keep) kept.at(r) = true;
    Schedule out;
    for (const auto& service : schedule.services) {
        Service s;
        s.time = service.time;
        for (RequestId r : service.served) {
            if (r < kept.size() && kept[r]) s.served.push_back(r);
        }
        if (s.served.empty()) continue;
        for (RequestId r : s.served) s.items.push_back(instance.requests[r].item);
        std::sort(s.items.begin(), s.items.end());
        s.items.erase(std::unique(s.items.begin(), s.items.end()), s.items.end());
        out.services.push_back(std::move(s));
    }
    return out;
}

}  // namespace jrpd
