#include <gtest/gtest.h>

#include "support.hpp"

using namespace jrpd;
using jrpd::testing::make_instance;

template <typename T>
concept ExposesDeadline = requires(T v) { v.deadline; };
static_assert(!ExposesDeadline<OnlineRequestView>, "online view must not expose true deadlines");
static_assert(ExposesDeadline<Request>);

namespace {

/// Records every callback and serves only the trigger (or a scripted set).
class Spy : public OnlineAlgorithm {
public:
    std::vector<std::string> log;
    std::vector<OnlineRequestView> views;
    std::map<RequestId, ItemId> item_of;
    std::function<Decision(RequestId, Tick)> script;

    std::string name() const override { return "spy"; }
    void on_arrival(const OnlineRequestView& v) override {
        views.push_back(v);
        item_of[v.id] = v.item;
        log.push_back("arrive " + std::to_string(v.id) + "@" + std::to_string(v.arrival));
    }
    Decision on_deadline(RequestId trigger, Tick now) override {
        log.push_back("deadline " + std::to_string(trigger) + "@" + std::to_string(now));
        if (script) return script(trigger, now);
        Decision d;
        d.items = {item_of.at(trigger)};
        return d;
    }
    void on_external_service(std::span<const RequestId> ids) override {
        for (RequestId id : ids) log.push_back("removed " + std::to_string(id));
    }
};

Instance sample() {
    return make_instance(Weight(1), {Weight(1, 2), Weight(1, 2), Weight(1, 2)},
                         {{0, 0, 4, 2}, {1, 4, 6, 5}, {2, 1, 4, 9}, {1, 0, 9, 1}});
}

}  // namespace

TEST(Engine, ArrivalsBeforeDeadlinesInTrueKeyOrder) {
    Spy spy;
    simulate(sample(), spy, Mode::predicted);
    const std::vector<std::string> expected = {"arrive 0@0", "arrive 3@0", "arrive 2@1", "arrive 1@4",
                                               "deadline 0@4", "deadline 2@4", "deadline 1@6"};
    EXPECT_EQ(spy.log, expected);
}

TEST(Engine, ViewsCarryPredictionsOrTruthByMode) {
    Spy p, c;
    simulate(sample(), p, Mode::predicted);
    simulate(sample(), c, Mode::clairvoyant);
    EXPECT_EQ(p.views[0].predicted, 2);
    EXPECT_EQ(c.views[0].predicted, 4);
}

TEST(Engine, EarlyServedRequestsNeverRevealDeadlines) {
    // Serving item 1 at t=4 takes requests 1 and 3 along; neither may produce
    // a deadline event afterwards.
    Spy spy;
    spy.script = [&](RequestId trigger, Tick) {
        Decision d;
        d.items = {spy.item_of.at(trigger), 1};
        return d;
    };
    auto result = simulate(sample(), spy, Mode::predicted);
    for (const auto& line : spy.log) {
        EXPECT_EQ(line.find("deadline 3"), std::string::npos);
        EXPECT_EQ(line.find("deadline 1"), std::string::npos);
    }
    ASSERT_FALSE(result.schedule.services.empty());
    EXPECT_EQ(result.schedule.services[0].served, (std::vector<RequestId>{0, 1, 3}));
    // Request 2 shares tick 4 but is pending until its own event.
    EXPECT_EQ(result.schedule.services[1].served, (std::vector<RequestId>{2}));
    EXPECT_TRUE(validate_schedule(result.schedule, sample()).feasible());
}

TEST(Engine, DecidedItemsWithoutPendingRequestsAreDropped) {
    Spy spy;
    spy.script = [&](RequestId trigger, Tick) {
        Decision d;
        d.items = {spy.item_of.at(trigger), 2, 2};
        return d;
    };
    auto result = simulate(sample(), spy, Mode::predicted);
    // Item 2's only request leaves with the t=4 service, so the t=6 service
    // has nothing left on item 2.
    EXPECT_EQ(result.schedule.services[0].items, (std::vector<ItemId>{0, 2}));
    EXPECT_EQ(result.schedule.services.back().items, (std::vector<ItemId>{1}));
}

TEST(Engine, MissingTriggerItemIsProtocolViolation) {
    Spy spy;
    spy.script = [](RequestId, Tick) { return Decision{}; };
    try {
        simulate(sample(), spy, Mode::predicted);
        FAIL() << "expected a protocol violation";
    } catch (const ProtocolViolation& e) {
        EXPECT_NE(std::string(e.what()).find("triggering item"), std::string::npos);
        EXPECT_FALSE(e.partial_trace().events.empty());
        EXPECT_NE(trace_excerpt(e.partial_trace()).find("deadline q0"), std::string::npos);
    }
}

TEST(Engine, UnknownItemIsProtocolViolation) {
    Spy spy;
    spy.script = [&](RequestId trigger, Tick) {
        Decision d;
        d.items = {spy.item_of.at(trigger), 99};
        return d;
    };
    EXPECT_THROW(simulate(sample(), spy, Mode::predicted), ProtocolViolation);
}

TEST(Engine, AlgorithmExceptionsCarryTrace) {
    Spy spy;
    spy.script = [](RequestId, Tick) -> Decision { throw std::runtime_error("boom"); };
    try {
        simulate(sample(), spy, Mode::predicted);
        FAIL();
    } catch (const ProtocolViolation&) {
        FAIL() << "plain failures are not protocol violations";
    } catch (const SimulationError& e) {
        EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
        EXPECT_FALSE(e.partial_trace().events.empty());
    }
}

TEST(Engine, RemovalsArriveAfterArrivalsAndSuppressDeadlines) {
    Spy spy;
    const Removal removals[] = {{3, 0}, {1, 5}};
    auto result = simulate(sample(), spy, Mode::predicted, removals);
    const std::vector<std::string> expected = {"arrive 0@0", "arrive 3@0", "removed 3", "arrive 2@1",
                                               "arrive 1@4", "deadline 0@4", "deadline 2@4", "removed 1"};
    EXPECT_EQ(spy.log, expected);
    for (const auto& s : result.schedule.services) {
        for (RequestId r : s.served) EXPECT_TRUE(r != 1 && r != 3);
    }
}

TEST(Engine, RemovalOutsideWindowRejected) {
    Spy spy;
    const Removal late[] = {{0, 5}};
    EXPECT_THROW(simulate(sample(), spy, Mode::predicted, late), std::invalid_argument);
    const Removal unknown[] = {{17, 0}};
    EXPECT_THROW(simulate(sample(), spy, Mode::predicted, unknown), std::invalid_argument);
}

TEST(Engine, TraceRecordsServicesAndIsDeterministic) {
    const Instance inst = gen_red_black(3);
    auto a = jrpd::testing::run(inst, "local-greedy");
    auto b = jrpd::testing::run(inst, "local-greedy");
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.trace.services().size(), a.schedule.services.size());
    std::size_t marks = 0;
    for (const auto& e : a.trace.events) marks += std::holds_alternative<PhaseMarkEvent>(e);
    EXPECT_EQ(marks, 2u);
}

TEST(Engine, EmptyInstanceRunsToEmptySchedule) {
    Spy spy;
    Instance empty = make_instance(Weight(1), {Weight(1)}, {});
    EXPECT_TRUE(simulate(empty, spy, Mode::predicted).schedule.services.empty());
}
