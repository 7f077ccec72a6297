#pragma once

// Prediction-error measures: request inversions, item inversions and
// instantaneous item inversions (eta).

#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "jrpd/core.hpp"

namespace jrpd {

using RequestPair = std::pair<RequestId, RequestId>;
using ItemPair = std::pair<ItemId, ItemId>;

struct RequestInversions {
    std::vector<RequestPair> pairs;  // (lower id, higher id), lexicographic

    std::size_t count() const { return pairs.size(); }
    /// Count with the convention that an inversion-free input reports 1.
    std::size_t floored() const { return std::max<std::size_t>(1, pairs.size()); }
};

struct ItemInversions {
    std::set<ItemPair> pairs;  // (lower id, higher id)

    std::size_t count() const { return pairs.size(); }
    bool contains(ItemId a, ItemId b) const { return pairs.count(std::minmax(a, b)) > 0; }
};

struct InstantaneousInversions {
    std::size_t count = 0;
    std::optional<Tick> peak_time;
};

struct MetricsReport {
    RequestInversions request_inversions;
    ItemInversions item_inversions;
    std::size_t instantaneous_item_inversions = 0;
    std::size_t eta = 1;
    std::optional<Tick> peak_time;
};

/// Different items, and true and predicted deadlines strictly disagree on
/// the order of the two requests. Equal ticks on either side never invert.
inline bool inverted(const Request& a, const Request& b) {
    if (a.item == b.item) return false;
    return (a.deadline < b.deadline && a.predicted > b.predicted) ||
           (a.deadline > b.deadline && a.predicted < b.predicted);
}

inline bool alive_at(const Request& q, Tick t) { return q.arrival <= t && t <= q.deadline; }

inline RequestInversions request_inversions(const Instance& instance) {
    RequestInversions out;
    const auto& qs = instance.requests;
    for (std::size_t a = 0; a < qs.size(); ++a) {
        for (std::size_t b = a + 1; b < qs.size(); ++b) {
            if (inverted(qs[a], qs[b])) out.pairs.emplace_back(a, b);
        }
    }
    return out;
}

inline ItemPair item_pair_of(const Instance& instance, const RequestPair& p) {
    return std::minmax(instance.requests[p.first].item, instance.requests[p.second].item);
}

inline ItemInversions item_inversions(const Instance& instance, const RequestInversions& raw) {
    ItemInversions out;
    for (const auto& p : raw.pairs) out.pairs.insert(item_pair_of(instance, p));
    return out;
}

inline ItemInversions item_inversions(const Instance& instance) {
    return item_inversions(instance, request_inversions(instance));
}

/// |I_t| for a single tick.
inline std::size_t item_inversions_at(const Instance& instance, const RequestInversions& raw, Tick t) {
    std::set<ItemPair> live;
    for (const auto& p : raw.pairs) {
        if (alive_at(instance.requests[p.first], t) && alive_at(instance.requests[p.second], t)) {
            live.insert(item_pair_of(instance, p));
        }
    }
    return live.size();
}

/// max_t |I_t|, evaluated at every arrival and deadline. The witness is the
/// earliest event tick attaining the maximum.
inline InstantaneousInversions instantaneous_item_inversions(const Instance& instance,
                                                             const RequestInversions& raw) {
    std::vector<Tick> events;
    events.reserve(instance.requests.size() * 2);
    for (const auto& q : instance.requests) {
        events.push_back(q.arrival);
        events.push_back(q.deadline);
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    InstantaneousInversions out;
    for (Tick t : events) {
        std::size_t here = item_inversions_at(instance, raw, t);
        if (!out.peak_time || here > out.count) {
            out.count = here;
            out.peak_time = t;
        }
    }
    return out;
}

inline InstantaneousInversions instantaneous_item_inversions(const Instance& instance) {
    return instantaneous_item_inversions(instance, request_inversions(instance));
}

inline std::size_t eta(const Instance& instance) {
    return std::max<std::size_t>(1, instantaneous_item_inversions(instance).count);
}

inline MetricsReport compute_metrics(const Instance& instance) {
    MetricsReport report;
    report.request_inversions = request_inversions(instance);
    report.item_inversions = item_inversions(instance, report.request_inversions);
    auto inst = instantaneous_item_inversions(instance, report.request_inversions);
    report.instantaneous_item_inversions = inst.count;
    report.peak_time = inst.peak_time;
    report.eta = std::max<std::size_t>(1, inst.count);
    return report;
}

}  // namespace jrpd
