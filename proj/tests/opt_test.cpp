#include <gtest/gtest.h>

#include <cstdlib>

#include "support.hpp"

using namespace jrpd;
using jrpd::testing::brute_force_opt;
using jrpd::testing::make_instance;

namespace {

std::optional<std::size_t> stab(std::vector<std::pair<Tick, Tick>> windows, std::vector<Tick> times) {
    std::vector<Request> reqs;
    for (const auto& [a, d] : windows) reqs.push_back({reqs.size(), 0, a, d, d});
    return min_item_transmissions(reqs, times);
}

Weight cost_of_clairvoyant_local_greedy(const Instance& inst) {
    return jrpd::testing::cost_of(inst, "local-greedy", Mode::clairvoyant);
}

}  // namespace

TEST(MinItemTransmissions, Examples) {
    EXPECT_EQ(stab({{0, 10}, {2, 8}}, {5}), 1u);
    EXPECT_EQ(stab({{0, 2}, {5, 9}}, {1, 6}), 2u);
    EXPECT_EQ(stab({{0, 2}}, {5}), std::nullopt);
    EXPECT_EQ(stab({}, {}), 0u);
    // Picks the latest usable time so it also covers the later window.
    EXPECT_EQ(stab({{0, 4}, {3, 9}}, {1, 3, 4}), 1u);
}

TEST(OptimalExact, KnownOptima) {
    EXPECT_EQ(optimal_exact(gen_red_black(3)).cost(), Weight(4));
    EXPECT_EQ(optimal_exact(make_instance(Weight(1), {Weight(1, 2)}, {{0, 2, 5, 5}})).cost(), Weight(3, 2));
    // The expensive requests all share [24, 48], so they ride along with the
    // last forced cheap service: 4 phases at 1 + 4/4 each, plus 4.
    const Instance ce4 = gen_cheap_expensive(4);
    EXPECT_EQ(optimal_exact(ce4).cost(), Weight(12));
    EXPECT_EQ(schedule_cost(cheap_expensive_witness(ce4, 4), ce4).total, Weight(13));
}

TEST(OptimalExact, WitnessIsFeasibleAndPricedExactly) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = jrpd::testing::random_small(seed);
        const OptResult r = optimal_exact(inst);
        ASSERT_TRUE(r.schedule);
        EXPECT_TRUE(validate_schedule(*r.schedule, inst).feasible()) << seed;
        EXPECT_EQ(schedule_cost(*r.schedule, inst).total, r.cost());
        EXPECT_EQ(r.lower, r.upper);
        for (const auto& s : r.schedule->services) {
            bool is_deadline = false;
            for (const auto& q : inst.requests) is_deadline |= q.deadline == s.time;
            EXPECT_TRUE(is_deadline);
        }
    }
}

TEST(OptimalExact, AgreesWithAssignmentBruteForce) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Instance inst = jrpd::testing::random_small(seed, 4, 6);
        EXPECT_EQ(optimal_exact(inst).cost(), brute_force_opt(inst)) << "seed " << seed;
    }
}

TEST(OptimalExact, PrefersFewerServicesOnTies) {
    // Weightless items: one service at 4 covers both, as cheap as any
    // alternative with the same count but earliest.
    auto inst = make_instance(Weight(1), {Weight(0), Weight(0)}, {{0, 0, 4, 4}, {1, 2, 6, 6}});
    const OptResult r = optimal_exact(inst);
    ASSERT_EQ(r.schedule->services.size(), 1u);
    EXPECT_EQ(r.schedule->services[0].time, 4);
    // Two equal-cost single services: the earlier time wins.
    auto two = make_instance(Weight(1), {Weight(0)}, {{0, 0, 5, 5}, {0, 0, 7, 7}});
    EXPECT_EQ(optimal_exact(two).schedule->services[0].time, 5);
}

TEST(OptimalExact, RefusesAboveLimit) {
    const Instance ce8 = gen_cheap_expensive(8);
    EXPECT_THROW(optimal_exact(ce8), OracleLimitExceeded);
    EXPECT_THROW(optimal_exact(gen_red_black(3), 3), OracleLimitExceeded);
    EXPECT_NO_THROW(optimal_exact(gen_red_black(3), 4));
}

TEST(OptimalExact, LimitFromEnvironment) {
    ::setenv("JRPD_OPT_LIMIT", "3", 1);
    EXPECT_EQ(opt_limit_from_env(), 3u);
    EXPECT_THROW(optimal_exact(gen_red_black(3)), OracleLimitExceeded);
    ::setenv("JRPD_OPT_LIMIT", "garbage", 1);
    EXPECT_EQ(opt_limit_from_env(), kDefaultOptLimit);
    ::unsetenv("JRPD_OPT_LIMIT");
    EXPECT_EQ(opt_limit_from_env(), kDefaultOptLimit);
}

TEST(OptimalBounds, Examples) {
    const OptResult rb3 = optimal_bounds(gen_red_black(3));
    EXPECT_EQ(rb3.lower, Weight(4));
    EXPECT_LE(rb3.lower, rb3.upper);
    auto single = make_instance(Weight(1), {Weight(1, 2)}, {{0, 2, 5, 5}});
    const OptResult s = optimal_bounds(single);
    EXPECT_EQ(s.lower, Weight(3, 2));
    EXPECT_EQ(s.upper, Weight(3, 2));
    EXPECT_GE(optimal_bounds(gen_cheap_expensive(8)).lower, Weight(8));
}

TEST(OptimalBounds, PruningClosesTheCheapExpensiveGap) {
    // Clairvoyant local-greedy costs 32 here; dropping service times reaches 3n = 24,
    // which the lower bound matches.
    const Instance ce8 = gen_cheap_expensive(8);
    const OptResult b = optimal_bounds(ce8);
    EXPECT_EQ(b.lower, Weight(24));
    EXPECT_EQ(b.upper, Weight(24));
    ASSERT_TRUE(b.schedule);
    EXPECT_TRUE(validate_schedule(*b.schedule, ce8).feasible());
    EXPECT_EQ(schedule_cost(*b.schedule, ce8).total, b.upper);
    EXPECT_EQ(cost_of_clairvoyant_local_greedy(ce8), Weight(32));
}

TEST(OptimalBounds, BracketTheExactOptimum) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = jrpd::testing::random_small(seed, 8, 12, NoiseModel::Kind::shift);
        const OptResult b = optimal_bounds(inst);
        const OptResult e = optimal_exact(inst);
        EXPECT_LE(b.lower, e.cost());
        EXPECT_GE(b.upper, e.cost());
        EXPECT_TRUE(validate_schedule(*b.schedule, inst).feasible());
        EXPECT_EQ(schedule_cost(*b.schedule, inst).total, b.upper);
        // Per-part lower bounds hold on the optimal witness itself.
        EXPECT_GE(e.breakdown.joint, inst.joint_cost * Weight(static_cast<std::int64_t>(max_disjoint(inst.requests))));
        for (ItemId i = 0; i < inst.items.size(); ++i) {
            std::vector<Request> on_item;
            for (const auto& q : inst.requests)
                if (q.item == i) on_item.push_back(q);
            EXPECT_GE(e.breakdown.per_item[i],
                      inst.items[i].weight * Weight(static_cast<std::int64_t>(max_disjoint(on_item))));
        }
    }
}

TEST(ShiftLemma, MovingServicesToDeadlinesKeepsFeasibilityAndCost) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = jrpd::testing::random_small(seed, 8, 12, NoiseModel::Kind::shift);
        // Greedy on noisy predictions often serves earlier than needed.
        const Schedule s = jrpd::testing::run(inst, "classic-greedy").schedule;
        const Schedule shifted = shift_to_deadlines(s, inst);
        EXPECT_TRUE(validate_schedule(shifted, inst).feasible());
        EXPECT_LE(schedule_cost(shifted, inst).total, schedule_cost(s, inst).total);
        for (const auto& service : shifted.services) {
            Tick earliest = inst.requests[service.served[0]].deadline;
            for (RequestId q : service.served) earliest = std::min(earliest, inst.requests[q].deadline);
            EXPECT_EQ(service.time, earliest);
        }
    }
}

TEST(ShiftLemma, DistinctTargetsPreserveCostExactly) {
    auto inst = make_instance(Weight(1), {Weight(1, 2), Weight(1, 3)}, {{0, 0, 6, 6}, {1, 0, 9, 9}, {0, 7, 12, 12}});
    Schedule s{{Service{1, {0, 1}, {0, 1}}, Service{8, {0}, {2}}}};
    const Schedule shifted = shift_to_deadlines(s, inst);
    EXPECT_EQ(shifted.services[0].time, 6);
    EXPECT_EQ(shifted.services[1].time, 12);
    EXPECT_EQ(schedule_cost(shifted, inst).total, schedule_cost(s, inst).total);
}
