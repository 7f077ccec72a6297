#pragma once

// Instance generators: the red/black and cheap/expensive constructions, the
// adaptive adversary against deterministic policies, and seeded random
// instances with controllable prediction noise.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "jrpd/core.hpp"
#include "jrpd/engine.hpp"
#include "jrpd/metrics.hpp"

namespace jrpd {

namespace detail {

inline Instance blank_instance(std::vector<Weight> weights) {
    Instance inst;
    inst.joint_cost = Weight(1);
    for (ItemId i = 0; i < weights.size(); ++i) inst.items.push_back({i, weights[i]});
    inst.tie_permutation = identity_permutation(weights.size());
    return inst;
}

inline void add_request(Instance& inst, ItemId item, Tick arrival, Tick deadline, Tick predicted) {
    inst.requests.push_back({inst.requests.size(), item, arrival, deadline, predicted});
}

}  // namespace detail

/// Item ids of the red/black construction: black b_i is i-1, red r_i is k+i-1.
inline ItemId black_item(std::size_t /*k*/, std::size_t i) { return i - 1; }
inline ItemId red_item(std::size_t k, std::size_t i) { return k + i - 1; }

inline Instance gen_red_black(std::size_t k) {
    if (k < 1) throw std::invalid_argument("red/black needs k >= 1");
    const auto K = static_cast<std::int64_t>(k);
    Instance inst = detail::blank_instance(std::vector<Weight>(2 * k, Weight(1, K)));
    for (std::int64_t i = 1; i <= K; ++i) detail::add_request(inst, red_item(k, i), 0, 2 * i, 2 * i);
    for (std::int64_t j = 1; j <= K; ++j) {
        for (std::int64_t i = 1; i <= K; ++i) detail::add_request(inst, black_item(k, i), 2 * j - 1, 3 * K, 2 * j + 1);
    }
    return inst;
}

/// Two services: every red request at time 0, every black one at 3k.
inline Schedule red_black_witness(const Instance& inst, std::size_t k) {
    Service early{0, {}, {}}, late{3 * static_cast<Tick>(k), {}, {}};
    for (const auto& q : inst.requests) {
        Service& s = q.item >= k ? early : late;
        s.served.push_back(q.id);
        s.items.push_back(q.item);
    }
    Schedule out;
    for (Service* s : {&early, &late}) {
        std::sort(s->items.begin(), s->items.end());
        s->items.erase(std::unique(s->items.begin(), s->items.end()), s->items.end());
        out.services.push_back(std::move(*s));
    }
    return out;
}

/// Cheap item c_j is j-1, expensive item e_j is n+j-1.
inline Instance gen_cheap_expensive(std::size_t n) {
    if (n < 2) throw std::invalid_argument("cheap/expensive needs n >= 2");
    const auto N = static_cast<std::int64_t>(n);
    std::vector<Weight> weights(n, Weight(1, N));
    weights.resize(2 * n, Weight(1));
    Instance inst = detail::blank_instance(std::move(weights));
    for (std::int64_t i = 1; i <= N; ++i) {
        const Tick t = 2 * N * (i - 1);
        for (std::int64_t j = 1; j <= N; ++j) detail::add_request(inst, j - 1, t, t + 2 * (j - 1), t + 2 * (j - 1));
        for (std::int64_t j = 1; j <= N; ++j) detail::add_request(inst, N + j - 1, t, 3 * N * N, t + 2 * (j - 1) + 1);
    }
    return inst;
}

/// Per phase one service of all cheap items at the phase start, plus one
/// final service of every expensive request at 3n^2.
inline Schedule cheap_expensive_witness(const Instance& inst, std::size_t n) {
    std::map<Tick, Service> by_time;
    const Tick last = 3 * static_cast<Tick>(n * n);
    for (const auto& q : inst.requests) {
        const Tick t = q.item < n ? q.arrival : last;
        Service& s = by_time[t];
        s.time = t;
        s.served.push_back(q.id);
        if (std::find(s.items.begin(), s.items.end(), q.item) == s.items.end()) s.items.push_back(q.item);
    }
    Schedule out;
    for (auto& [t, s] : by_time) {
        std::sort(s.items.begin(), s.items.end());
        out.services.push_back(std::move(s));
    }
    return out;
}

enum class AdversaryCase { case1_no_inversions, case2_many_inversions };

inline const char* to_string(AdversaryCase c) {
    return c == AdversaryCase::case1_no_inversions ? "case1" : "case2";
}

struct AdversaryOutcome {
    Instance instance;
    AdversaryCase kind = AdversaryCase::case1_no_inversions;
    std::size_t services_per_phase = 0;  // x
    std::size_t phases = 0;              // s
    std::size_t n = 0;
    /// Items whose request is served at its own deadline in every phase.
    std::vector<ItemId> triggering_items;
};

class AdversaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::int64_t exact_sqrt(std::int64_t n) {
    std::int64_t r = 0;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// Adaptive construction against a deterministic policy. Phase r starts at
/// t0 = 2rn and releases one request per item i with predicted deadline
/// t0 + i. A request still pending at t0 + i gets that as its deadline. The
/// deadlines of requests served early are fixed afterwards, per case.
inline AdversaryOutcome gen_adversary(const AlgorithmFactory& factory, std::size_t n, const Rational& c) {
    const auto N = static_cast<std::int64_t>(n);
    const std::int64_t root = exact_sqrt(N);
    if (n == 0 || root * root != N) throw std::invalid_argument("adversary needs a perfect square n");
    if (c < Rational(1)) throw std::invalid_argument("adversary needs c >= 1");
    const std::size_t s = n;

    // Under limited information the policy only ever sees deadlines of
    // requests still pending at their predicted time, so running with
    // deadline = prediction reproduces the live interaction exactly.
    Instance inst = detail::blank_instance(std::vector<Weight>(n, Weight(1, root)));
    for (std::size_t r = 0; r < s; ++r) {
        const Tick t0 = 2 * static_cast<Tick>(r) * N;
        for (std::int64_t i = 1; i <= N; ++i) detail::add_request(inst, i - 1, t0, t0 + i, t0 + i);
    }
    auto alg = factory(Catalog::of(inst));
    const SimulationResult run = simulate(inst, *alg, Mode::predicted);

    using Step = std::tuple<Tick, ItemId, std::vector<ItemId>>;
    std::vector<std::vector<Step>> transcripts(s);
    std::vector<bool> triggered(inst.requests.size(), false);
    for (const auto& ev : run.trace.services()) {
        const std::size_t r = static_cast<std::size_t>(ev.tick / (2 * N));
        const Tick t0 = 2 * static_cast<Tick>(r) * N;
        if (r >= s || ev.tick > t0 + N) throw AdversaryError("service outside every phase at t=" + std::to_string(ev.tick));
        for (RequestId id : ev.served) {
            if (id / n != r) throw AdversaryError("service at t=" + std::to_string(ev.tick) + " serves a request of another phase");
        }
        triggered[ev.trigger] = true;
        transcripts[r].emplace_back(ev.tick - t0, inst.requests[ev.trigger].item, ev.items);
    }
    for (std::size_t r = 1; r < s; ++r) {
        if (transcripts[r] != transcripts[0]) {
            throw AdversaryError(alg->name() + " behaves differently in phase " + std::to_string(r) +
                                 " than in phase 0; it is not semi-memoryless on this input");
        }
    }

    AdversaryOutcome out;
    out.n = n;
    out.phases = s;
    out.services_per_phase = transcripts[0].size();
    for (const auto& step : transcripts[0]) out.triggering_items.push_back(std::get<1>(step));
    std::sort(out.triggering_items.begin(), out.triggering_items.end());

    // Average requests per service n / x <= sqrt(n) / c, cross-multiplied.
    const Rational lhs = Rational(N) * c;
    const Rational rhs = Rational(static_cast<std::int64_t>(out.services_per_phase) * root);
    out.kind = lhs <= rhs ? AdversaryCase::case1_no_inversions : AdversaryCase::case2_many_inversions;

    if (out.kind == AdversaryCase::case2_many_inversions) {
        const Tick far = 3 * static_cast<Tick>(s) * N;
        for (auto& q : inst.requests) {
            if (!triggered[q.id]) q.deadline = far + q.predicted;  // 3sn + t0 + i
        }
    }
    out.instance = std::move(inst);
    return out;
}

/// The cheap offline answer to an adversary outcome. Case 1: one service per
/// phase at its first deadline. Case 2: the triggering requests at each
/// phase start plus one service for every other request at 3sn.
inline Schedule adversary_witness(const AdversaryOutcome& out) {
    const auto N = static_cast<Tick>(out.n);
    const Tick far = 3 * static_cast<Tick>(out.phases) * N;
    std::map<Tick, Service> by_time;
    for (const auto& q : out.instance.requests) {
        Tick t;
        if (out.kind == AdversaryCase::case1_no_inversions) {
            t = q.arrival + 1;
        } else {
            t = q.deadline > far ? far : q.arrival;
        }
        Service& s = by_time[t];
        s.time = t;
        s.served.push_back(q.id);
        if (std::find(s.items.begin(), s.items.end(), q.item) == s.items.end()) s.items.push_back(q.item);
    }
    Schedule sched;
    for (auto& [t, s] : by_time) {
        std::sort(s.items.begin(), s.items.end());
        sched.services.push_back(std::move(s));
    }
    return sched;
}

struct WeightModel {
    enum class Kind { grid, constant };
    Kind kind = Kind::grid;
    /// grid: weights w_0 * g / steps for g uniform in 1..steps.
    std::int64_t steps = 4;
    /// constant: every weight equals this.
    Weight value{1};

    static WeightModel grid(std::int64_t steps) { return {Kind::grid, steps, Weight(1)}; }
    static WeightModel constant(Weight w) { return {Kind::constant, 1, w}; }
};

struct NoiseModel {
    enum class Kind { exact, shift, target_inversions };
    Kind kind = Kind::exact;
    Tick max_offset = 0;
    std::size_t budget = 0;
    std::uint64_t seed = 0;

    static NoiseModel exact() { return {}; }
    static NoiseModel shift(Tick max_offset) { return {Kind::shift, max_offset, 0, 0}; }
    static NoiseModel target_inversions(std::size_t budget, std::uint64_t seed) {
        return {Kind::target_inversions, 0, budget, seed};
    }
};

struct RandomInstance {
    Instance instance;
    /// Raw request-inversion count of the output.
    std::size_t request_inversions = 0;
};

/// Swap attempts allowed per request when chasing an inversion target.
inline constexpr std::size_t kSwapAttemptsPerRequest = 200;

inline RandomInstance gen_random(std::size_t n, std::size_t m, Tick horizon, const WeightModel& weights,
                                 const NoiseModel& noise, std::uint64_t seed) {
    if (n < 1 || m < 1 || horizon < 1) throw std::invalid_argument("random generator needs n, m, horizon >= 1");
    if (weights.kind == WeightModel::Kind::grid && weights.steps < 1) throw std::invalid_argument("grid needs steps >= 1");
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };

    std::vector<Weight> ws;
    for (std::size_t i = 0; i < n; ++i) {
        ws.push_back(weights.kind == WeightModel::Kind::grid ? Weight(uniform(1, weights.steps), weights.steps)
                                                             : weights.value);
    }
    Instance inst = detail::blank_instance(std::move(ws));
    for (std::size_t r = 0; r < m; ++r) {
        const auto item = static_cast<ItemId>(uniform(0, static_cast<std::int64_t>(n) - 1));
        const Tick a = uniform(0, horizon);
        const Tick d = uniform(a, horizon);
        detail::add_request(inst, item, a, d, d);
    }

    RandomInstance out;
    switch (noise.kind) {
    case NoiseModel::Kind::exact:
        break;
    case NoiseModel::Kind::shift:
        for (auto& q : inst.requests) {
            q.predicted = std::max(q.arrival, q.deadline + uniform(-noise.max_offset, noise.max_offset));
        }
        break;
    case NoiseModel::Kind::target_inversions: {
        std::mt19937_64 swaps(noise.seed);
        auto pick = std::uniform_int_distribution<std::size_t>(0, m - 1);
        std::size_t current = 0;
        for (std::size_t attempt = 0; attempt < kSwapAttemptsPerRequest * m && current < noise.budget; ++attempt) {
            Request& a = inst.requests[pick(swaps)];
            Request& b = inst.requests[pick(swaps)];
            if (a.id == b.id || a.predicted == b.predicted) continue;
            if (b.predicted < a.arrival || a.predicted < b.arrival) continue;
            std::swap(a.predicted, b.predicted);
            const std::size_t next = request_inversions(inst).count();
            if (next <= noise.budget) {
                current = next;
            } else {
                std::swap(a.predicted, b.predicted);
            }
        }
        break;
    }
    }
    out.request_inversions = request_inversions(inst).count();
    out.instance = std::move(inst);
    return out;
}

}  // namespace jrpd
