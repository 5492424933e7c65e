#include <doctest.h>

#include <algorithm>

#include "qis/model.hpp"
#include "qis/rng.hpp"

#include "oracle_helpers.hpp"

using qis::ModelParams;
using qis::State;
using qis::Transition;
namespace model = qis::model;

namespace {
const ModelParams kBase{1.0, 2.0, 3.0, 4.0, 0.5, 1, 2};

bool has_transition(const std::vector<Transition>& ts, State target, double rate) {
    return std::any_of(ts.begin(), ts.end(), [&](const Transition& t) {
        return t.target == target && t.rate == rate;
    });
}
} // namespace

TEST_CASE("parameter validation is eager and strict") {
    CHECK_THROWS_AS(ModelParams(0.0, 1, 1, 1, 0.5, 1, 2), qis::domain_error);
    CHECK_THROWS_AS(ModelParams(1, -1, 1, 1, 0.5, 1, 2), qis::domain_error);
    CHECK_THROWS_AS(ModelParams(1, 1, 0, 1, 0.5, 1, 2), qis::domain_error);
    CHECK_THROWS_AS(ModelParams(1, 1, 1, 0, 0.5, 1, 2), qis::domain_error);
    CHECK_THROWS_AS(ModelParams(1, 1, 1, 1, -0.1, 1, 2), qis::domain_error);
    CHECK_THROWS_AS(ModelParams(1, 1, 1, 1, 1.1, 1, 2), qis::domain_error);
    CHECK_THROWS_AS(ModelParams(1, 1, 1, 1, 0.5, 1, 1), qis::domain_error); // b < 2
    CHECK_THROWS_AS(ModelParams(1, 1, 1, 1, 0.5, 0, 2), qis::domain_error); // s = 0
    CHECK_THROWS_AS(ModelParams(1, 1, 1, 1, 0.5, 2, 2), qis::domain_error); // s = b
    CHECK_NOTHROW(ModelParams(1, 1, 1, 1, 0.0, 1, 2)); // p endpoints allowed
    CHECK_NOTHROW(ModelParams(1, 1, 1, 1, 1.0, 1, 2));
}

TEST_CASE("transitions: depleted inventory blocks everything but replenishment") {
    const auto ts = model::transitions(kBase, {0, 0, 0});
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].target == State{0, 0, 1});
    CHECK(ts[0].rate == 4.0);
}

TEST_CASE("transitions: full inventory with empty queues admits both classes") {
    const auto ts = model::transitions(kBase, {0, 0, 2});
    REQUIRE(ts.size() == 2);
    CHECK(has_transition(ts, {1, 0, 2}, 1.0));
    CHECK(has_transition(ts, {0, 1, 2}, 2.0)); // k > s: full lambda2
}

TEST_CASE("transitions: threshold gating, service and replenishment together") {
    const auto ts = model::transitions(kBase, {2, 1, 1});
    REQUIRE(ts.size() == 4);
    CHECK(has_transition(ts, {3, 1, 1}, 1.0));
    CHECK(has_transition(ts, {2, 2, 1}, 1.0)); // p*lambda2 = 0.5*2 at 0<k<=s
    CHECK(has_transition(ts, {1, 1, 0}, 3.0)); // priority service consumes an item
    CHECK(has_transition(ts, {2, 1, 2}, 4.0));
}

TEST_CASE("transitions: ordinary service only when the priority queue is empty") {
    const auto ts = model::transitions(kBase, {0, 3, 2});
    CHECK(has_transition(ts, {0, 2, 1}, 3.0));
    const auto ts2 = model::transitions(kBase, {1, 3, 2});
    CHECK(has_transition(ts2, {0, 3, 1}, 3.0));
    CHECK(!has_transition(ts2, {1, 2, 1}, 3.0));
}

TEST_CASE("transitions reject invalid states") {
    CHECK_THROWS_AS(model::transitions(kBase, {-1, 0, 0}), qis::domain_error);
    CHECK_THROWS_AS(model::transitions(kBase, {0, 0, 3}), qis::domain_error);
    CHECK_THROWS_AS(model::total_rate(kBase, {0, -2, 1}), qis::domain_error);
}

TEST_CASE("total_rate worked values and exact agreement with the transition sum") {
    CHECK(model::total_rate(kBase, {0, 0, 0}) == 4.0);
    CHECK(model::total_rate(kBase, {0, 0, 2}) == 3.0);
    CHECK(model::total_rate(kBase, {2, 1, 1}) == 9.0);

    qis::Xoshiro256pp rng(7);
    for (int i = 0; i < 200; ++i) {
        const ModelParams pr = oracle::random_stable_params(rng, i);
        const State z{static_cast<int>(rng.next() % 8),
                      static_cast<int>(rng.next() % 8),
                      static_cast<int>(rng.next() % (pr.b() + 1))};
        double sum = 0.0;
        for (const auto& t : model::transitions(pr, z)) sum += t.rate;
        CHECK(sum == model::total_rate(pr, z));
    }
}

TEST_CASE("every transition moves one coordinate, services move queue and stock") {
    qis::Xoshiro256pp rng(11);
    for (int i = 0; i < 300; ++i) {
        const ModelParams pr = oracle::random_stable_params(rng, i);
        const State z{static_cast<int>(rng.next() % 6),
                      static_cast<int>(rng.next() % 6),
                      static_cast<int>(rng.next() % (pr.b() + 1))};
        for (const auto& t : model::transitions(pr, z)) {
            CHECK(t.rate > 0.0);
            const int d1 = t.target.n1 - z.n1;
            const int d2 = t.target.n2 - z.n2;
            const int dk = t.target.k - z.k;
            const bool arrival1 = d1 == 1 && d2 == 0 && dk == 0;
            const bool arrival2 = d1 == 0 && d2 == 1 && dk == 0;
            const bool service1 = d1 == -1 && d2 == 0 && dk == -1;
            const bool service2 = d1 == 0 && d2 == -1 && dk == -1;
            const bool replenish = d1 == 0 && d2 == 0 && dk == 1;
            CHECK((arrival1 || arrival2 || service1 || service2 || replenish));
        }
    }
}

TEST_CASE("ordinary-arrival gating is a nondecreasing step function of k") {
    const ModelParams pr{1.0, 2.0, 5.0, 1.0, 0.4, 2, 5};
    CHECK(pr.ordinary_arrival_rate(0) == 0.0);
    for (int k = 1; k <= pr.s(); ++k)
        CHECK(pr.ordinary_arrival_rate(k) == 0.4 * 2.0);
    for (int k = pr.s() + 1; k <= pr.b(); ++k)
        CHECK(pr.ordinary_arrival_rate(k) == 2.0);
    for (int k = 0; k < pr.b(); ++k)
        CHECK(pr.ordinary_arrival_rate(k) <= pr.ordinary_arrival_rate(k + 1));
}

TEST_CASE("p = 1 removes the threshold distinction for ordinary arrivals") {
    const ModelParams pr{1.0, 2.0, 5.0, 1.0, 1.0, 2, 5};
    for (int k = 1; k <= pr.b(); ++k)
        CHECK(pr.ordinary_arrival_rate(k) == 2.0);
}
