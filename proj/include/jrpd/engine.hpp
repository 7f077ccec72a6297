#pragma once

// Online simulation under the limited-information protocol.
//
// At every event tick the engine delivers arrivals first, then external
// removals, then deadline events for still-pending requests in true-key
// order. A request served before its deadline never produces a deadline
// event, so its true deadline is never shown to the algorithm.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jrpd/core.hpp"

namespace jrpd {

/// What an online algorithm sees of a request. Deliberately has no deadline.
struct OnlineRequestView {
    RequestId id = 0;
    ItemId item = 0;
    Tick arrival = 0;
    Tick predicted = 0;

    friend bool operator==(const OnlineRequestView&, const OnlineRequestView&) = default;
};

/// Public, request-independent parameters an algorithm is built from.
struct Catalog {
    Weight joint_cost{1};
    std::vector<Weight> weights;
    std::vector<std::size_t> tie_rank;

    static Catalog of(const Instance& instance) {
        Catalog c;
        c.joint_cost = instance.joint_cost;
        for (const auto& item : instance.items) c.weights.push_back(item.weight);
        c.tie_rank = instance.tie_permutation.size() == instance.items.size()
                         ? instance.tie_permutation
                         : identity_permutation(instance.items.size());
        return c;
    }

    std::size_t item_count() const { return weights.size(); }

    OrderKey key(const OnlineRequestView& v) const { return {v.predicted, tie_rank.at(v.item), v.id}; }
};

struct Decision {
    std::vector<ItemId> items;
    /// Request that caused each item to be added, when the policy knows it.
    std::vector<std::pair<ItemId, RequestId>> causes;
    /// Independent sub-policy that produced the decision (bucket index).
    int lane = 0;
    /// Set when this service opens a new phase, holding the phase anchor.
    std::optional<Tick> phase_start;
};

class OnlineAlgorithm {
public:
    virtual ~OnlineAlgorithm() = default;

    virtual std::string name() const = 0;
    virtual void on_arrival(const OnlineRequestView& request) = 0;
    /// The deadline of pending request `trigger` is `now`; decide what to transmit.
    virtual Decision on_deadline(RequestId trigger, Tick now) = 0;
    /// The requests were served or removed by someone else.
    virtual void on_external_service(std::span<const RequestId> /*requests*/) {}
};

using AlgorithmFactory = std::function<std::unique_ptr<OnlineAlgorithm>(const Catalog&)>;

enum class Mode { predicted, clairvoyant };

inline const char* to_string(Mode m) { return m == Mode::predicted ? "predicted" : "clairvoyant"; }

struct ArrivalEvent {
    Tick tick = 0;
    RequestId request = 0;
    friend bool operator==(const ArrivalEvent&, const ArrivalEvent&) = default;
};

struct RemovalEvent {
    Tick tick = 0;
    RequestId request = 0;
    friend bool operator==(const RemovalEvent&, const RemovalEvent&) = default;
};

struct DeadlineEvent {
    Tick tick = 0;
    RequestId request = 0;
    friend bool operator==(const DeadlineEvent&, const DeadlineEvent&) = default;
};

struct PhaseMarkEvent {
    Tick tick = 0;
    int lane = 0;
    Tick anchor = 0;
    friend bool operator==(const PhaseMarkEvent&, const PhaseMarkEvent&) = default;
};

struct ServiceEvent {
    Tick tick = 0;
    RequestId trigger = 0;
    int lane = 0;
    std::vector<ItemId> items;
    std::vector<RequestId> served;
    std::vector<std::pair<ItemId, RequestId>> causes;
    friend bool operator==(const ServiceEvent&, const ServiceEvent&) = default;
};

using TraceEvent = std::variant<ArrivalEvent, RemovalEvent, DeadlineEvent, PhaseMarkEvent, ServiceEvent>;

struct Trace {
    std::vector<TraceEvent> events;

    std::vector<ServiceEvent> services() const {
        std::vector<ServiceEvent> out;
        for (const auto& e : events) {
            if (const auto* s = std::get_if<ServiceEvent>(&e)) out.push_back(*s);
        }
        return out;
    }

    friend bool operator==(const Trace&, const Trace&) = default;
};

inline Tick tick_of(const TraceEvent& e) {
    return std::visit([](const auto& ev) { return ev.tick; }, e);
}

inline std::string describe(const TraceEvent& e) {
    struct Visitor {
        std::string operator()(const ArrivalEvent& a) const {
            return "t=" + std::to_string(a.tick) + " arrival q" + std::to_string(a.request);
        }
        std::string operator()(const RemovalEvent& a) const {
            return "t=" + std::to_string(a.tick) + " removal q" + std::to_string(a.request);
        }
        std::string operator()(const DeadlineEvent& a) const {
            return "t=" + std::to_string(a.tick) + " deadline q" + std::to_string(a.request);
        }
        std::string operator()(const PhaseMarkEvent& a) const {
            return "t=" + std::to_string(a.tick) + " phase lane=" + std::to_string(a.lane) +
                   " anchor=" + std::to_string(a.anchor);
        }
        std::string operator()(const ServiceEvent& a) const {
            std::string s = "t=" + std::to_string(a.tick) + " service items={";
            for (std::size_t k = 0; k < a.items.size(); ++k) s += (k ? "," : "") + std::to_string(a.items[k]);
            s += "} served=" + std::to_string(a.served.size());
            return s;
        }
    };
    return std::visit(Visitor{}, e);
}

/// Last `count` events, one per line.
inline std::string trace_excerpt(const Trace& trace, std::size_t count = 8) {
    std::string out;
    std::size_t start = trace.events.size() > count ? trace.events.size() - count : 0;
    for (std::size_t k = start; k < trace.events.size(); ++k) out += "  " + describe(trace.events[k]) + "\n";
    return out;
}

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, Trace partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const Trace& partial_trace() const { return partial_; }

private:
    Trace partial_;
};

class ProtocolViolation : public SimulationError {
public:
    using SimulationError::SimulationError;
};

struct SimulationResult {
    Schedule schedule;
    Trace trace;
};

/// A request taken away at no cost at `tick`, as if another party served it.
struct Removal {
    RequestId request = 0;
    Tick tick = 0;
};

inline OnlineRequestView make_view(const Request& q, Mode mode) {
    return {q.id, q.item, q.arrival, mode == Mode::clairvoyant ? q.deadline : q.predicted};
}

inline SimulationResult simulate(const Instance& instance, OnlineAlgorithm& algorithm, Mode mode,
                                 std::span<const Removal> removals = {}) {
    const auto& qs = instance.requests;
    const std::size_t m = qs.size();
    const std::size_t n = instance.items.size();

    std::map<Tick, std::vector<RequestId>> arrivals, deadlines, removed_at;
    for (const auto& q : qs) {
        if (q.item >= n) throw std::invalid_argument("request " + std::to_string(q.id) + " has unknown item");
        arrivals[q.arrival].push_back(q.id);
        deadlines[q.deadline].push_back(q.id);
    }
    for (const auto& r : removals) {
        if (r.request >= m) throw std::invalid_argument("removal of unknown request " + std::to_string(r.request));
        const auto& q = qs[r.request];
        if (r.tick < q.arrival || r.tick > q.deadline) {
            throw std::invalid_argument("removal of request " + std::to_string(r.request) + " outside its window");
        }
        removed_at[r.tick].push_back(r.request);
    }
    for (auto& [t, ids] : deadlines) {
        std::sort(ids.begin(), ids.end(), [&](RequestId a, RequestId b) {
            return order_key_true(qs[a], instance) < order_key_true(qs[b], instance);
        });
    }
    std::vector<Tick> ticks;
    for (const auto* events : {&arrivals, &deadlines, &removed_at}) {
        for (const auto& [t, ids] : *events) ticks.push_back(t);
    }
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());

    SimulationResult result;
    std::vector<bool> pending(m, false);
    std::vector<std::vector<RequestId>> pending_by_item(n);

    auto fail = [&](Tick t, const std::string& what) -> ProtocolViolation {
        return ProtocolViolation(algorithm.name() + " at t=" + std::to_string(t) + ": " + what, result.trace);
    };
    auto guarded = [&](Tick t, auto&& call) {
        try {
            return call();
        } catch (const SimulationError& e) {
            // Nested policies cannot see the trace; attach it here.
            if (e.partial_trace().events.empty() && dynamic_cast<const ProtocolViolation*>(&e)) {
                throw ProtocolViolation(e.what(), result.trace);
            }
            throw;
        } catch (const std::exception& e) {
            throw SimulationError(algorithm.name() + " failed at t=" + std::to_string(t) + ": " + e.what(),
                                  result.trace);
        }
    };
    auto drop_pending = [&](RequestId id) {
        pending[id] = false;
        auto& bucket = pending_by_item[qs[id].item];
        bucket.erase(std::find(bucket.begin(), bucket.end(), id));
    };

    for (Tick t : ticks) {
        if (auto it = arrivals.find(t); it != arrivals.end()) {
            for (RequestId id : it->second) {
                pending[id] = true;
                pending_by_item[qs[id].item].push_back(id);
                result.trace.events.push_back(ArrivalEvent{t, id});
                guarded(t, [&] { algorithm.on_arrival(make_view(qs[id], mode)); });
            }
        }
        if (auto it = removed_at.find(t); it != removed_at.end()) {
            for (RequestId id : it->second) {
                if (!pending[id]) continue;
                drop_pending(id);
                result.trace.events.push_back(RemovalEvent{t, id});
                RequestId one[] = {id};
                guarded(t, [&] { algorithm.on_external_service(one); });
            }
        }
        auto it = deadlines.find(t);
        if (it == deadlines.end()) continue;
        for (RequestId trigger : it->second) {
            if (!pending[trigger]) continue;
            result.trace.events.push_back(DeadlineEvent{t, trigger});
            Decision decision = guarded(t, [&] { return algorithm.on_deadline(trigger, t); });

            std::vector<ItemId> items = decision.items;
            std::sort(items.begin(), items.end());
            items.erase(std::unique(items.begin(), items.end()), items.end());
            for (ItemId i : items) {
                if (i >= n) throw fail(t, "decision names unknown item " + std::to_string(i));
            }
            if (!std::binary_search(items.begin(), items.end(), qs[trigger].item)) {
                throw fail(t, "decision omits the triggering item " + std::to_string(qs[trigger].item) +
                                  " of request " + std::to_string(trigger));
            }
            Service service;
            service.time = t;
            for (ItemId i : items) {
                if (pending_by_item[i].empty()) continue;
                service.items.push_back(i);
                for (RequestId id : pending_by_item[i]) service.served.push_back(id);
            }
            std::sort(service.served.begin(), service.served.end());
            for (RequestId id : service.served) pending[id] = false;
            for (ItemId i : service.items) pending_by_item[i].clear();

            if (decision.phase_start) {
                result.trace.events.push_back(PhaseMarkEvent{t, decision.lane, *decision.phase_start});
            }
            ServiceEvent ev{t, trigger, decision.lane, service.items, service.served, {}};
            for (const auto& cause : decision.causes) {
                if (std::binary_search(service.items.begin(), service.items.end(), cause.first)) {
                    ev.causes.push_back(cause);
                }
            }
            result.trace.events.push_back(std::move(ev));
            result.schedule.services.push_back(std::move(service));
        }
    }
    return result;
}

inline SimulationResult run_clairvoyant(const Instance& instance, OnlineAlgorithm& algorithm) {
    return simulate(instance, algorithm, Mode::clairvoyant);
}

}  // namespace jrpd
