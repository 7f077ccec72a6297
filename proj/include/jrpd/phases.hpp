#pragma once

// Phase reconstruction for Local-Greedy style traces: charged services,
// phase boundaries and safe/unsafe requests.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jrpd/engine.hpp"

namespace jrpd {

struct PhaseService {
    std::size_t index = 0;  // position in the run's schedule
    Tick tick = 0;
    RequestId trigger = 0;
    std::vector<ItemId> items;
    std::vector<RequestId> served;
    /// Per transmitted item, the request that caused the item to be added.
    std::vector<std::pair<ItemId, RequestId>> causes;
    Weight item_weight;  // w(lambda)
    bool charged = false;

    /// Causing requests whose deadline is later than the phase boundary.
    std::size_t unsafe_causes = 0;
    /// Served requests of any kind whose deadline is later than the boundary.
    std::size_t unsafe_served = 0;

    bool safe() const { return unsafe_causes == 0; }
    Rational unsafe_fraction() const {
        if (causes.empty()) return Rational{};
        return Rational(static_cast<std::int64_t>(unsafe_causes), static_cast<std::int64_t>(causes.size()));
    }
    /// At least a `tau` fraction of the causing requests are unsafe.
    bool tau_unsafe(const Rational& tau) const { return charged && !causes.empty() && unsafe_fraction() >= tau; }
};

struct Phase {
    int lane = 0;
    Tick start = 0;
    Tick boundary = 0;
    std::vector<PhaseService> services;
    std::map<ItemId, std::size_t> transmissions;

    std::size_t max_transmissions() const {
        std::size_t out = 0;
        for (const auto& [item, count] : transmissions) out = std::max(out, count);
        return out;
    }
};

struct PhaseReport {
    std::vector<Phase> phases;

    std::size_t charged_count() const {
        std::size_t out = 0;
        for (const auto& p : phases)
            for (const auto& s : p.services) out += s.charged;
        return out;
    }
    std::size_t unsafe_in_charged() const {
        std::size_t out = 0;
        for (const auto& p : phases)
            for (const auto& s : p.services)
                if (s.charged) out += s.unsafe_causes;
        return out;
    }
    std::size_t unsafe_charged_services() const {
        std::size_t out = 0;
        for (const auto& p : phases)
            for (const auto& s : p.services)
                if (s.charged && !s.safe()) ++out;
        return out;
    }
    bool items_once_per_phase() const {
        for (const auto& p : phases)
            if (p.max_transmissions() > 1) return false;
        return true;
    }
};

class PhaseAnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline PhaseReport analyze_phases(const Trace& trace, const Instance& instance) {
    PhaseReport report;
    std::map<int, std::size_t> open;  // lane -> index of its current phase
    std::optional<PhaseMarkEvent> mark;
    std::size_t service_index = 0;

    for (const auto& event : trace.events) {
        if (const auto* m = std::get_if<PhaseMarkEvent>(&event)) {
            mark = *m;
            continue;
        }
        const auto* s = std::get_if<ServiceEvent>(&event);
        if (!s) continue;
        if (mark && mark->tick == s->tick && mark->lane == s->lane) {
            report.phases.push_back(Phase{s->lane, mark->anchor, s->tick, {}, {}});
            open[s->lane] = report.phases.size() - 1;
        } else if (!open.count(s->lane)) {
            throw PhaseAnalysisError("service at t=" + std::to_string(s->tick) + " in lane " +
                                     std::to_string(s->lane) + " has no phase mark");
        }
        mark.reset();

        Phase& phase = report.phases[open[s->lane]];
        PhaseService ps;
        ps.index = service_index++;
        ps.tick = s->tick;
        ps.trigger = s->trigger;
        ps.items = s->items;
        ps.served = s->served;
        ps.causes = s->causes;
        for (ItemId i : s->items) {
            ps.item_weight += item_at(instance, i).weight;
            ++phase.transmissions[i];
        }
        phase.boundary = s->tick;
        phase.services.push_back(std::move(ps));
    }

    for (auto& phase : report.phases) {
        for (std::size_t k = 0; k < phase.services.size(); ++k) {
            auto& ps = phase.services[k];
            ps.charged = k + 1 < phase.services.size();
            for (const auto& [item, r] : ps.causes) {
                if (instance.requests.at(r).deadline > phase.boundary) ++ps.unsafe_causes;
            }
            for (RequestId r : ps.served) {
                if (instance.requests.at(r).deadline > phase.boundary) ++ps.unsafe_served;
            }
        }
    }
    return report;
}

}  // namespace jrpd
