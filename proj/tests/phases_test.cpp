#include <gtest/gtest.h>

#include "support.hpp"

using namespace jrpd;
using jrpd::testing::make_instance;
using jrpd::testing::run;

TEST(Phases, SingleRequestIsOneUnchargedService) {
    auto inst = make_instance(Weight(1), {Weight(1, 2)}, {{0, 3, 7, 5}});
    auto report = analyze_phases(run(inst, "local-greedy").trace, inst);
    ASSERT_EQ(report.phases.size(), 1u);
    ASSERT_EQ(report.phases[0].services.size(), 1u);
    EXPECT_FALSE(report.phases[0].services[0].charged);
    // Served when the true deadline fires, which is also the anchor.
    EXPECT_EQ(report.phases[0].start, 7);
    EXPECT_EQ(report.phases[0].boundary, 7);
}

TEST(Phases, CheapExpensiveHasOnePhasePerBlock) {
    const Instance ce4 = gen_cheap_expensive(4);
    auto report = analyze_phases(run(ce4, "local-greedy").trace, ce4);
    ASSERT_EQ(report.phases.size(), 4u);
    for (std::size_t p = 0; p < 4; ++p) {
        const Phase& phase = report.phases[p];
        EXPECT_EQ(phase.start, static_cast<Tick>(8 * p));
        EXPECT_EQ(phase.boundary, static_cast<Tick>(8 * p + 6));
        ASSERT_EQ(phase.services.size(), 4u);
        EXPECT_EQ(phase.transmissions.size(), 8u);
        EXPECT_EQ(phase.max_transmissions(), 1u);
    }
    EXPECT_EQ(report.charged_count(), 12u);
    // Every early expensive request is unsafe: its deadline is 48.
    EXPECT_GT(report.phases[0].services[0].unsafe_served, 0u);
    EXPECT_EQ(report.phases[0].services[0].unsafe_fraction(), Rational(1, 2));
    EXPECT_TRUE(report.phases[0].services[0].tau_unsafe(Rational(1, 2)));
    EXPECT_FALSE(report.phases[0].services[0].tau_unsafe(Rational(3, 4)));
    EXPECT_FALSE(report.phases[0].services[3].tau_unsafe(Rational(1, 10)));  // uncharged
}

TEST(Phases, ClairvoyantChargedServicesAreSafe) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Instance inst = jrpd::testing::random_small(seed, 8, 12, NoiseModel::Kind::shift);
        auto report = analyze_phases(run(inst, "local-greedy", Mode::clairvoyant).trace, inst);
        EXPECT_EQ(report.unsafe_in_charged(), 0u) << "seed " << seed;
        EXPECT_TRUE(report.items_once_per_phase());
    }
}

TEST(Phases, ChargedServicesCarryAtLeastJointWeight) {
    for (const auto& entry : jrpd::testing::corpus()) {
        for (Mode mode : {Mode::predicted, Mode::clairvoyant}) {
            auto report = analyze_phases(run(entry.instance, "local-greedy", mode).trace, entry.instance);
            for (const auto& phase : report.phases) {
                for (const auto& s : phase.services) {
                    if (s.charged) {
                        EXPECT_GE(s.item_weight, entry.instance.joint_cost) << entry.name;
                    }
                }
            }
        }
    }
}

TEST(Phases, BucketedLanesFormSeparatePhases) {
    const Instance inst = make_instance(Weight(1), {Weight(1), Weight(1, 8), Weight(1, 8), Weight(1, 8)},
                                        {{0, 0, 4, 4}, {1, 0, 2, 2}, {0, 5, 9, 9}, {2, 1, 3, 3}});
    auto report = analyze_phases(run(inst, "local-greedy-bucketed").trace, inst);
    std::set<int> lanes;
    for (const auto& p : report.phases) lanes.insert(p.lane);
    EXPECT_EQ(lanes.size(), 2u);
    EXPECT_TRUE(report.items_once_per_phase());
}

TEST(Phases, TraceWithoutMarksIsRejected) {
    const Instance rb3 = gen_red_black(3);
    EXPECT_THROW(analyze_phases(run(rb3, "folklore-greedy").trace, rb3), PhaseAnalysisError);
}
