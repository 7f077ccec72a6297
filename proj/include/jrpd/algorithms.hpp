#pragma once

// Online policies: the greedy family, Local-Greedy with and without weight
// bucketing, the heavy/light nonclairvoyant policy, and the union combiner.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jrpd/engine.hpp"

namespace jrpd {

/// Requests an algorithm currently believes to be pending.
class PendingRequests {
public:
    void add(const OnlineRequestView& v) { by_id_[v.id] = v; }
    void remove(RequestId id) { by_id_.erase(id); }
    void remove(std::span<const RequestId> ids) {
        for (RequestId id : ids) by_id_.erase(id);
    }

    /// Drops every request on one of `items` and returns their ids.
    std::vector<RequestId> remove_items(std::span<const ItemId> items) {
        std::vector<RequestId> gone;
        for (auto it = by_id_.begin(); it != by_id_.end();) {
            if (std::find(items.begin(), items.end(), it->second.item) != items.end()) {
                gone.push_back(it->first);
                it = by_id_.erase(it);
            } else {
                ++it;
            }
        }
        return gone;
    }

    const OnlineRequestView& at(RequestId id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw std::logic_error("request " + std::to_string(id) + " is not pending");
        return it->second;
    }
    bool contains(RequestId id) const { return by_id_.count(id) > 0; }
    bool empty() const { return by_id_.empty(); }
    std::size_t size() const { return by_id_.size(); }

    /// Pending requests in ascending predicted-key order, optionally filtered.
    template <typename Pred>
    std::vector<OnlineRequestView> sorted(const Catalog& catalog, Pred keep) const {
        std::vector<OnlineRequestView> out;
        for (const auto& [id, v] : by_id_) {
            if (keep(v)) out.push_back(v);
        }
        std::sort(out.begin(), out.end(),
                  [&](const auto& a, const auto& b) { return catalog.key(a) < catalog.key(b); });
        return out;
    }
    std::vector<OnlineRequestView> sorted(const Catalog& catalog) const {
        return sorted(catalog, [](const OnlineRequestView&) { return true; });
    }

private:
    std::map<RequestId, OnlineRequestView> by_id_;
};

/// Base for policies that keep their own pending set and drop requests on the
/// items they transmit.
class TrackingAlgorithm : public OnlineAlgorithm {
public:
    explicit TrackingAlgorithm(Catalog catalog) : catalog_(std::move(catalog)) {}

    void on_arrival(const OnlineRequestView& request) override { pending_.add(request); }
    void on_external_service(std::span<const RequestId> requests) override { pending_.remove(requests); }

    const Catalog& catalog() const { return catalog_; }

protected:
    Decision finish(Decision d) {
        std::sort(d.items.begin(), d.items.end());
        pending_.remove_items(d.items);
        return d;
    }

    Catalog catalog_;
    PendingRequests pending_;
};

/// Serves every pending request whenever any deadline is reached.
class TrivialPolicy : public TrackingAlgorithm {
public:
    explicit TrivialPolicy(Catalog catalog, int lane = 0) : TrackingAlgorithm(std::move(catalog)), lane_(lane) {}

    std::string name() const override { return "trivial"; }

    Decision on_deadline(RequestId trigger, Tick now) override {
        Decision d;
        d.lane = lane_;
        d.phase_start = now;
        const ItemId own = pending_.at(trigger).item;
        d.items.push_back(own);
        d.causes.emplace_back(own, trigger);
        for (const auto& v : pending_.sorted(catalog_)) {
            if (std::find(d.items.begin(), d.items.end(), v.item) != d.items.end()) continue;
            d.items.push_back(v.item);
            d.causes.emplace_back(v.item, v.id);
        }
        return finish(std::move(d));
    }

private:
    int lane_;
};

/// Transmits only the triggering item.
class TriggerOnlyPolicy : public TrackingAlgorithm {
public:
    using TrackingAlgorithm::TrackingAlgorithm;

    std::string name() const override { return "trigger-only"; }

    Decision on_deadline(RequestId trigger, Tick now) override {
        Decision d;
        const ItemId own = pending_.at(trigger).item;
        d.items = {own};
        d.causes = {{own, trigger}};
        d.phase_start = now;
        return finish(std::move(d));
    }
};

enum class GreedyStop {
    /// Stop before an add that would bring w(I) to w_0 or more.
    before_reaching,
    /// Stop right after the add that brings w(I) to w_0 or more.
    after_reaching,
};

/// Classic-Greedy and Folklore-Greedy: scan all pending requests by predicted
/// deadline and grow the transmission set until the weight budget stops it.
class GreedyPolicy : public TrackingAlgorithm {
public:
    GreedyPolicy(Catalog catalog, GreedyStop stop) : TrackingAlgorithm(std::move(catalog)), stop_(stop) {}

    std::string name() const override {
        return stop_ == GreedyStop::before_reaching ? "classic-greedy" : "folklore-greedy";
    }

    Decision on_deadline(RequestId trigger, Tick /*now*/) override {
        Decision d;
        const ItemId own = pending_.at(trigger).item;
        d.items.push_back(own);
        d.causes.emplace_back(own, trigger);
        Weight load = catalog_.weights.at(own);
        const Weight& budget = catalog_.joint_cost;

        for (const auto& v : pending_.sorted(catalog_)) {
            if (stop_ == GreedyStop::after_reaching && load >= budget) break;
            if (std::find(d.items.begin(), d.items.end(), v.item) != d.items.end()) continue;
            const Weight& w = catalog_.weights.at(v.item);
            if (stop_ == GreedyStop::before_reaching && load + w >= budget) break;
            d.items.push_back(v.item);
            d.causes.emplace_back(v.item, v.id);
            load += w;
        }
        return finish(std::move(d));
    }

private:
    GreedyStop stop_;
};

struct LocalGreedyConfig {
    enum class Anchor {
        /// New phase anchor s is the trigger's deadline (the current tick).
        deadline_of_trigger,
        /// New phase anchor s is the trigger's arrival.
        arrival_of_trigger,
    };
    Anchor eligibility_anchor = Anchor::deadline_of_trigger;
};

/// Greedy restricted to requests that had arrived by the start of the current
/// phase. A deadline of a request that arrived after the anchor opens a new
/// phase.
class LocalGreedy : public TrackingAlgorithm {
public:
    explicit LocalGreedy(Catalog catalog, LocalGreedyConfig config = {}, int lane = 0)
        : TrackingAlgorithm(std::move(catalog)), config_(config), lane_(lane) {}

    std::string name() const override {
        return config_.eligibility_anchor == LocalGreedyConfig::Anchor::deadline_of_trigger
                   ? "local-greedy"
                   : "local-greedy-arrival-anchor";
    }

    Decision on_deadline(RequestId trigger, Tick now) override {
        const OnlineRequestView q = pending_.at(trigger);
        Decision d;
        d.lane = lane_;
        if (!anchor_ || q.arrival > *anchor_) {
            anchor_ = config_.eligibility_anchor == LocalGreedyConfig::Anchor::deadline_of_trigger ? now : q.arrival;
            d.phase_start = anchor_;
        }
        const Tick s = *anchor_;
        d.items.push_back(q.item);
        d.causes.emplace_back(q.item, trigger);
        Weight load = catalog_.weights.at(q.item);

        auto eligible = pending_.sorted(catalog_, [s](const OnlineRequestView& v) { return v.arrival <= s; });
        for (const auto& v : eligible) {
            if (load >= catalog_.joint_cost) break;
            if (std::find(d.items.begin(), d.items.end(), v.item) != d.items.end()) continue;
            d.items.push_back(v.item);
            d.causes.emplace_back(v.item, v.id);
            load += catalog_.weights.at(v.item);
        }
        return finish(std::move(d));
    }

    std::optional<Tick> phase_anchor() const { return anchor_; }

private:
    LocalGreedyConfig config_;
    int lane_;
    std::optional<Tick> anchor_;
};

/// Items partitioned by weight: dyadic classes (w_0/2^j, w_0/2^(j-1)] for
/// j = 1..ceil(log2 n), then a tail class of the remaining light items.
struct BucketPlan {
    struct Bucket {
        std::vector<ItemId> items;
        /// Rounded-up weight used inside the bucket; empty for the tail.
        std::optional<Weight> ceiling;
    };
    std::vector<Bucket> buckets;  // dyadic buckets in order, tail last
    std::vector<std::size_t> bucket_of;

    std::size_t tail_index() const { return buckets.size() - 1; }
};

inline std::size_t ceil_log2(std::size_t n) {
    std::size_t levels = 0;
    while ((std::size_t{1} << levels) < n) ++levels;
    return levels;
}

inline BucketPlan plan_buckets(const Catalog& catalog) {
    const std::size_t n = catalog.item_count();
    const std::size_t levels = ceil_log2(n);
    BucketPlan plan;
    plan.buckets.resize(levels + 1);
    plan.bucket_of.assign(n, levels);
    Weight ceiling = catalog.joint_cost;
    for (std::size_t j = 0; j < levels; ++j) {
        plan.buckets[j].ceiling = ceiling;
        ceiling = ceiling / Weight(2);
    }
    // `ceiling` is now w_0 / 2^levels, the floor of the last dyadic bucket.
    for (ItemId i = 0; i < n; ++i) {
        const Weight& w = catalog.weights[i];
        for (std::size_t j = 0; j < levels; ++j) {
            const Weight& top = *plan.buckets[j].ceiling;
            if (w <= top && w > top / Weight(2)) {
                plan.bucket_of[i] = j;
                break;
            }
        }
        plan.buckets[plan.bucket_of[i]].items.push_back(i);
    }
    return plan;
}

/// Catalog with every item of bucket `b` rounded up to the bucket ceiling.
inline Catalog rounded_catalog(const Catalog& catalog, const BucketPlan& plan, std::size_t b) {
    Catalog out = catalog;
    if (const auto& ceiling = plan.buckets.at(b).ceiling) {
        for (ItemId i : plan.buckets[b].items) out.weights[i] = *ceiling;
    }
    return out;
}

/// One Local-Greedy per dyadic bucket on rounded weights, the trivial policy
/// on the tail bucket. Buckets never serve each other's requests.
class BucketedLocalGreedy : public OnlineAlgorithm {
public:
    explicit BucketedLocalGreedy(const Catalog& catalog) : plan_(plan_buckets(catalog)) {
        for (std::size_t b = 0; b < plan_.buckets.size(); ++b) {
            const int lane = static_cast<int>(b);
            if (b == plan_.tail_index()) {
                lanes_.push_back(std::make_unique<TrivialPolicy>(catalog, lane));
            } else {
                lanes_.push_back(std::make_unique<LocalGreedy>(rounded_catalog(catalog, plan_, b), LocalGreedyConfig{}, lane));
            }
        }
    }

    std::string name() const override { return "local-greedy-bucketed"; }

    void on_arrival(const OnlineRequestView& request) override {
        const std::size_t b = plan_.bucket_of.at(request.item);
        owner_[request.id] = b;
        lanes_[b]->on_arrival(request);
    }

    Decision on_deadline(RequestId trigger, Tick now) override {
        const std::size_t b = owner_.at(trigger);
        Decision d = lanes_[b]->on_deadline(trigger, now);
        d.lane = static_cast<int>(b);
        return d;
    }

    void on_external_service(std::span<const RequestId> requests) override {
        for (RequestId id : requests) {
            auto it = owner_.find(id);
            if (it == owner_.end()) continue;
            RequestId one[] = {id};
            lanes_[it->second]->on_external_service(one);
        }
    }

    const BucketPlan& plan() const { return plan_; }

private:
    BucketPlan plan_;
    std::vector<std::unique_ptr<OnlineAlgorithm>> lanes_;
    std::map<RequestId, std::size_t> owner_;
};

/// Nonclairvoyant policy: heavy items are served alone, light items are
/// served together with their whole group.
class HeavyLight : public OnlineAlgorithm {
public:
    explicit HeavyLight(const Catalog& catalog) : catalog_(catalog) {
        const std::size_t n = catalog.item_count();
        const Weight w0_sq = catalog.joint_cost * catalog.joint_cost;
        std::size_t root = 0;
        while (root * root < n) ++root;  // ceil(sqrt(n))

        group_of_.assign(n, std::nullopt);
        Weight group_load;
        for (ItemId i = 0; i < n; ++i) {
            const Weight& w = catalog.weights[i];
            if (Weight(static_cast<std::int64_t>(n)) * w * w >= w0_sq) continue;  // heavy
            bool open_new = groups_.empty() || groups_.back().size() >= root ||
                            group_load + w > catalog.joint_cost;
            if (open_new) {
                groups_.emplace_back();
                group_load = Weight{};
            }
            groups_.back().push_back(i);
            group_load += w;
            group_of_[i] = groups_.size() - 1;
        }
    }

    std::string name() const override { return "heavy-light"; }

    bool is_heavy(ItemId i) const { return !group_of_.at(i).has_value(); }
    const std::vector<std::vector<ItemId>>& groups() const { return groups_; }

    void on_arrival(const OnlineRequestView& request) override { item_of_[request.id] = request.item; }

    Decision on_deadline(RequestId trigger, Tick now) override {
        const ItemId i = item_of_.at(trigger);
        Decision d;
        d.phase_start = now;
        if (auto g = group_of_[i]) {
            d.items = groups_[*g];
        } else {
            d.items = {i};
        }
        d.causes = {{i, trigger}};
        return d;
    }

private:
    Catalog catalog_;
    std::vector<std::optional<std::size_t>> group_of_;
    std::vector<std::vector<ItemId>> groups_;
    std::map<RequestId, ItemId> item_of_;
};

/// Runs several policies side by side and transmits the union of their
/// decisions. Each constituent is told about requests the union served on
/// items it did not pick itself.
class CombinedPolicy : public OnlineAlgorithm {
public:
    struct ServiceLog {
        Tick tick = 0;
        RequestId trigger = 0;
        std::vector<std::vector<ItemId>> constituent_items;
        std::vector<ItemId> transmitted;
    };

    CombinedPolicy(Catalog catalog, std::vector<std::unique_ptr<OnlineAlgorithm>> parts)
        : catalog_(std::move(catalog)), parts_(std::move(parts)) {
        if (parts_.empty()) throw std::invalid_argument("combined policy needs at least one constituent");
    }

    std::string name() const override {
        std::string out = "combined:";
        for (std::size_t k = 0; k < parts_.size(); ++k) out += (k ? "+" : "") + parts_[k]->name();
        return out;
    }

    void on_arrival(const OnlineRequestView& request) override {
        pending_.add(request);
        for (auto& p : parts_) p->on_arrival(request);
    }

    Decision on_deadline(RequestId trigger, Tick now) override {
        const ItemId own = pending_.at(trigger).item;
        ServiceLog log{now, trigger, {}, {}};
        std::vector<ItemId> all;
        for (auto& p : parts_) {
            Decision d = p->on_deadline(trigger, now);
            std::sort(d.items.begin(), d.items.end());
            d.items.erase(std::unique(d.items.begin(), d.items.end()), d.items.end());
            if (!std::binary_search(d.items.begin(), d.items.end(), own)) {
                throw ProtocolViolation(p->name() + " at t=" + std::to_string(now) +
                                            ": constituent decision omits the triggering item " + std::to_string(own),
                                        Trace{});
            }
            all.insert(all.end(), d.items.begin(), d.items.end());
            log.constituent_items.push_back(std::move(d.items));
        }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());

        std::vector<OnlineRequestView> served = pending_.sorted(catalog_, [&](const OnlineRequestView& v) {
            return std::binary_search(all.begin(), all.end(), v.item);
        });
        pending_.remove_items(all);
        for (ItemId i : all) {
            bool has_pending = std::any_of(served.begin(), served.end(), [i](const auto& v) { return v.item == i; });
            if (has_pending) log.transmitted.push_back(i);
        }
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            const auto& mine = log.constituent_items[k];
            std::vector<RequestId> foreign;
            for (const auto& v : served) {
                if (!std::binary_search(mine.begin(), mine.end(), v.item)) foreign.push_back(v.id);
            }
            std::sort(foreign.begin(), foreign.end());
            if (!foreign.empty()) parts_[k]->on_external_service(foreign);
        }
        log_.push_back(log);

        Decision d;
        d.items = std::move(all);
        d.causes = {{own, trigger}};
        return d;
    }

    void on_external_service(std::span<const RequestId> requests) override {
        pending_.remove(requests);
        for (auto& p : parts_) p->on_external_service(requests);
    }

    std::size_t constituent_count() const { return parts_.size(); }
    const std::vector<ServiceLog>& log() const { return log_; }

    /// Cost each constituent would be charged for its own share of every
    /// union service: w_0 plus the weights of its items that were transmitted.
    std::vector<Weight> in_context_costs() const {
        std::vector<Weight> out(parts_.size());
        for (const auto& s : log_) {
            for (std::size_t k = 0; k < parts_.size(); ++k) {
                out[k] += catalog_.joint_cost;
                for (ItemId i : s.constituent_items[k]) {
                    if (std::binary_search(s.transmitted.begin(), s.transmitted.end(), i)) out[k] += catalog_.weights[i];
                }
            }
        }
        return out;
    }

private:
    Catalog catalog_;
    std::vector<std::unique_ptr<OnlineAlgorithm>> parts_;
    PendingRequests pending_;
    std::vector<ServiceLog> log_;
};

class UnknownAlgorithm : public std::invalid_argument {
public:
    explicit UnknownAlgorithm(const std::string& name) : std::invalid_argument("unknown algorithm '" + name + "'") {}
};

inline std::vector<std::string> algorithm_names() {
    return {"classic-greedy", "folklore-greedy",      "local-greedy", "local-greedy-arrival-anchor",
            "local-greedy-bucketed", "heavy-light", "trivial", "trigger-only"};
}

inline std::unique_ptr<OnlineAlgorithm> make_algorithm(std::string_view name, const Catalog& catalog);

inline std::unique_ptr<OnlineAlgorithm> make_combined(std::string_view list, const Catalog& catalog) {
    std::vector<std::unique_ptr<OnlineAlgorithm>> parts;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t plus = list.find('+', start);
        std::string_view part = list.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
        if (part.empty() || part.starts_with("combined:")) {
            throw UnknownAlgorithm("combined:" + std::string(list));
        }
        parts.push_back(make_algorithm(part, catalog));
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    return std::make_unique<CombinedPolicy>(catalog, std::move(parts));
}

/// Builds a policy by registry name, including "combined:a+b[+c]".
inline std::unique_ptr<OnlineAlgorithm> make_algorithm(std::string_view name, const Catalog& catalog) {
    if (name == "classic-greedy") return std::make_unique<GreedyPolicy>(catalog, GreedyStop::before_reaching);
    if (name == "folklore-greedy") return std::make_unique<GreedyPolicy>(catalog, GreedyStop::after_reaching);
    if (name == "local-greedy") return std::make_unique<LocalGreedy>(catalog);
    if (name == "local-greedy-arrival-anchor") {
        return std::make_unique<LocalGreedy>(catalog,
                                             LocalGreedyConfig{LocalGreedyConfig::Anchor::arrival_of_trigger});
    }
    if (name == "local-greedy-bucketed") return std::make_unique<BucketedLocalGreedy>(catalog);
    if (name == "heavy-light") return std::make_unique<HeavyLight>(catalog);
    if (name == "trivial") return std::make_unique<TrivialPolicy>(catalog);
    if (name == "trigger-only") return std::make_unique<TriggerOnlyPolicy>(catalog);
    if (name.starts_with("combined:")) return make_combined(name.substr(9), catalog);
    throw UnknownAlgorithm(std::string(name));
}

inline AlgorithmFactory algorithm_factory(std::string name) {
    // Fail early on unknown names.
    make_algorithm(name, Catalog{});
    return [name](const Catalog& catalog) { return make_algorithm(name, catalog); };
}

inline std::unique_ptr<OnlineAlgorithm> classic_greedy(const Catalog& c) {
    return std::make_unique<GreedyPolicy>(c, GreedyStop::before_reaching);
}
inline std::unique_ptr<OnlineAlgorithm> folklore_greedy(const Catalog& c) {
    return std::make_unique<GreedyPolicy>(c, GreedyStop::after_reaching);
}
inline std::unique_ptr<OnlineAlgorithm> local_greedy(const Catalog& c, LocalGreedyConfig config = {}) {
    return std::make_unique<LocalGreedy>(c, config);
}
inline std::unique_ptr<OnlineAlgorithm> bucketed_local_greedy(const Catalog& c) {
    return std::make_unique<BucketedLocalGreedy>(c);
}
inline std::unique_ptr<OnlineAlgorithm> heavy_light(const Catalog& c) { return std::make_unique<HeavyLight>(c); }

}  // namespace jrpd
