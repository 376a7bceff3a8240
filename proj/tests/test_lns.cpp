#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "darpdp/construct.hpp"
#include "darpdp/lns.hpp"
#include "support.hpp"

using namespace darpdp;

namespace {

RequestSpec req(double px, double py, double dx, double dy, double e, double l) {
    RequestSpec q;
    q.pickup_x = px;
    q.pickup_y = py;
    q.delivery_x = dx;
    q.delivery_y = dy;
    q.pickup_earliest = e;
    q.pickup_latest = l;
    q.delivery_earliest = e;
    q.delivery_latest = l;
    return q;
}

RequestSpec wide(double px, double py, double dx, double dy) { return req(px, py, dx, dy, 495, 580); }

VehicleSpec lane(double y, double len = 10) {
    VehicleSpec v;
    v.origin_y = y;
    v.dest_x = len;
    v.dest_y = y;
    v.dest_earliest = 540;
    v.dest_latest = 560;
    return v;
}

}  // namespace

TEST(RemovalSaving, CollinearIsZero) {
    auto inst = build_instance("line", {lane(0)}, {wide(2, 0, 3, 0), wide(4, 0, 8, 0), wide(5, 0, 6, 0)});
    SolverParams params;
    const int m = 1, n = 3;
    auto sol = make_solution(inst, params,
                             {Route{0, {0, 2 * m + 0, 2 * m + n + 0, 2 * m + 1, 2 * m + 2, 2 * m + n + 2,
                                        2 * m + n + 1, 1}}});
    for (int r = 0; r < n; ++r) EXPECT_NEAR(removal_saving(inst, sol, r), 0.0, 1e-12) << r;
}

TEST(RemovalSaving, DetourConsecutive) {
    VehicleSpec v = lane(0, 4);
    auto inst = build_instance("detour", {v}, {wide(0, 3, 4, 3)});
    SolverParams params;
    auto sol = make_solution(inst, params, {Route{0, {0, 2, 3, 1}}});
    // 2 * (3 + 4 + 3) - 2 * 4
    EXPECT_DOUBLE_EQ(removal_saving(inst, sol, 0), 12.0);
}

TEST(RemovalSaving, DetourNonConsecutive) {
    VehicleSpec v = lane(0, 8);
    auto inst = build_instance("split", {v}, {wide(2, 3, 6, 3), wide(4, 0, 5, 0)});
    SolverParams params;
    const int m = 1, n = 2;
    auto sol = make_solution(inst, params,
                             {Route{0, {0, 2 * m + 0, 2 * m + 1, 2 * m + n + 1, 2 * m + n + 0, 1}}});
    // Pickup leg (0,0)-(2,3)-(4,0) vs (0,0)-(4,0); delivery leg (5,0)-(6,3)-(8,0) vs (5,0)-(8,0).
    const double expected =
        2.0 * (std::hypot(2, 3) * 2 - 4) + 2.0 * (std::hypot(1, 3) + std::hypot(2, 3) - 3);
    EXPECT_NEAR(removal_saving(inst, sol, 0), expected, 1e-12);
    EXPECT_THROW(removal_saving(inst, empty_solution(inst, params), 0), std::invalid_argument);
}

TEST(Similarity, SelfIsOne) {
    auto inst = testing_support::random_instance(5100, 6, 2);
    for (int r = 0; r < 6; ++r) EXPECT_DOUBLE_EQ(similarity(inst, r, r), 1.0);
}

TEST(Similarity, OppositeExtremesAreZero) {
    auto inst = build_instance("ext", {lane(0)}, {req(0, 0, 0, 0, 500, 530), req(3, 4, 6, 8, 510, 540)});
    EXPECT_DOUBLE_EQ(similarity(inst, 0, 1), 0.0);
}

TEST(Similarity, HandTable) {
    // Attributes (pickup radius, delivery radius, pickup earliest, delivery latest):
    // r0 (0, 5, 500, 530), r1 (10, 0, 510, 540), r2 (5, 5, 520, 535).
    auto inst = build_instance("tab", {lane(0)},
                               {req(0, 0, 3, 4, 500, 530), req(6, 8, 0, 0, 510, 540), req(3, 4, 0, 5, 520, 535)});
    EXPECT_DOUBLE_EQ(similarity(inst, 0, 1), 0.125);
    EXPECT_DOUBLE_EQ(similarity(inst, 0, 2), 0.5);
    EXPECT_DOUBLE_EQ(similarity(inst, 1, 2), 0.375);
    EXPECT_DOUBLE_EQ(similarity(inst, 2, 1), 0.375);
}

TEST(CompMeasure, HandCase) {
    RequestSpec a = req(1, 1, 1, 1, 500, 510);
    a.delivery_latest = 520;
    RequestSpec b = req(1, 1, 1, 1, 505, 515);
    b.delivery_latest = 525;
    auto inst = build_instance("comp", {lane(0)}, {a, b});
    // 15 + 25 + 15 + 25 with zero travel between co-located stops.
    EXPECT_DOUBLE_EQ(comp_measure(inst, 0, 1), 80.0);
    EXPECT_DOUBLE_EQ(comp_measure(inst, 1, 0), 80.0);
}

TEST(CompMeasure, Symmetric) {
    auto inst = testing_support::random_instance(5200, 8, 2);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) EXPECT_NEAR(comp_measure(inst, i, j), comp_measure(inst, j, i), 1e-9);
}

TEST(Destroy, RouteRemovalTakesSmallestRoute) {
    auto inst = build_instance("routes", {lane(0), lane(10)},
                               {wide(2, 0.1, 3, 0.1), wide(4, 0.1, 5, 0.1), wide(6, 0.1, 7, 0.1), wide(4, 9.9, 5, 9.9)});
    SolverParams params;
    const int m = 2, n = 4;
    auto p = [&](int r) { return 2 * m + r; };
    auto d = [&](int r) { return 2 * m + n + r; };
    auto sol = make_solution(inst, params,
                             {Route{0, {0, p(0), d(0), p(1), d(1), p(2), d(2), 2}}, Route{1, {1, p(3), d(3), 3}}});
    Rng rng = derive_rng(1, 0);
    auto out = destroy(inst, params, sol, RemovalKind::Route, 1, rng);
    EXPECT_EQ(out.removed, std::vector<int>{3});
    EXPECT_EQ(out.solution.routes[1].stops, (std::vector<int>{1, 3}));
    EXPECT_EQ(out.solution.routes[0], sol.routes[0]);
}

TEST(Destroy, GreedyRemovesLargestSaving) {
    SolverParams params;
    for (int s = 0; s < 10; ++s) {
        auto inst = testing_support::random_instance(5300 + s, 12, 2);
        auto sol = build_initial(inst, params);
        if (sol.served() == 0) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (int r : sol.served_requests()) best = std::max(best, removal_saving(inst, sol, r));
        Rng rng = derive_rng(s, 0);
        auto out = destroy(inst, params, sol, RemovalKind::Greedy, 1, rng);
        ASSERT_EQ(out.removed.size(), 1u);
        EXPECT_NEAR(removal_saving(inst, sol, out.removed[0]), best, 1e-9);
    }
}

TEST(Destroy, RelatedAndRandomRespectCount) {
    SolverParams params;
    for (int s = 0; s < 10; ++s) {
        auto inst = testing_support::random_instance(5400 + s, 15, 3);
        auto sol = build_initial(inst, params);
        for (auto kind : {RemovalKind::Random, RemovalKind::Related}) {
            Rng rng = derive_rng(s, 1);
            auto out = destroy(inst, params, sol, kind, 3, rng);
            EXPECT_LE(out.removed.size(), 3u);
            EXPECT_EQ(out.solution.served() + static_cast<int>(out.removed.size()), sol.served());
            for (int r : out.removed) EXPECT_EQ(out.solution.assignment[r], -1);
            EXPECT_TRUE(check_feasibility(inst, out.solution).hard_feasible());
        }
    }
}

TEST(Destroy, RejectsZeroCount) {
    auto inst = testing_support::random_instance(5500, 4, 1);
    SolverParams params;
    Rng rng = derive_rng(1, 0);
    EXPECT_THROW(destroy(inst, params, build_initial(inst, params), RemovalKind::Random, 0, rng),
                 std::invalid_argument);
}

TEST(Repair, EmptyPoolIsIdentity) {
    auto inst = testing_support::random_instance(5600, 10, 2);
    SolverParams params;
    auto sol = build_initial(inst, params);
    for (auto kind : kAllInsertions) {
        Rng rng = derive_rng(2, 0);
        auto out = repair(inst, params, sol, kind, {}, rng);
        EXPECT_EQ(out.routes, sol.routes);
        EXPECT_EQ(out.cost.weighted, sol.cost.weighted);
    }
}

TEST(Repair, SingleSlotSameForAllOperators) {
    auto inst = build_instance("slot", {lane(0)}, {wide(3, 0.5, 6, 0.5)});
    SolverParams params;
    auto sol = empty_solution(inst, params);
    EXPECT_EQ(route_compatibility(inst, sol.routes[0], 0), std::numeric_limits<double>::infinity());
    for (auto kind : kAllInsertions) {
        Rng rng = derive_rng(3, 0);
        auto out = repair(inst, params, sol, kind, {0}, rng);
        EXPECT_EQ(out.routes[0].stops, (std::vector<int>{0, 2, 3, 1})) << to_string(kind);
    }
}

TEST(Repair, CompatibilityPrefersCompatibleRoute) {
    // Request 2 shares its windows with request 0 on lane 0; request 1 on
    // lane 1 runs much later.
    auto inst = build_instance("compat", {lane(0), lane(0)},
                               {req(2, 0, 3, 0, 500, 520), req(5, 0, 6, 0, 525, 545), req(4, 0, 5, 0, 500, 520)});
    SolverParams params;
    const int m = 2, n = 3;
    auto sol = make_solution(inst, params,
                             {Route{0, {0, 2 * m + 0, 2 * m + n + 0, 2}}, Route{1, {1, 2 * m + 1, 2 * m + n + 1, 3}}});
    ASSERT_LT(route_compatibility(inst, sol.routes[0], 2), route_compatibility(inst, sol.routes[1], 2));
    Rng rng = derive_rng(4, 0);
    auto out = repair(inst, params, sol, InsertionKind::Compatibility, {2}, rng);
    EXPECT_EQ(out.assignment[2], 0);
}

TEST(Perturb, DeterministicPerSeed) {
    auto inst = testing_support::random_instance(5700, 20, 3);
    SolverParams params;
    auto sol = build_initial(inst, params);
    Rng a = derive_rng(77, 3);
    Rng b = derive_rng(77, 3);
    PerturbChoice ca, cb;
    auto x = perturb(inst, params, sol, a, &ca);
    auto y = perturb(inst, params, sol, b, &cb);
    EXPECT_EQ(x.routes, y.routes);
    EXPECT_EQ(ca.removal, cb.removal);
    EXPECT_EQ(ca.insertion, cb.insertion);
    EXPECT_EQ(ca.count, cb.count);
}

TEST(Perturb, StaysHardFeasible) {
    SolverParams params;
    for (int s = 0; s < 5; ++s) {
        auto inst = testing_support::random_instance(5800 + s, 20, 3);
        auto sol = build_initial(inst, params);
        Rng rng = derive_rng(s, 3);
        for (int i = 0; i < 40; ++i) {
            PerturbChoice c;
            sol = perturb(inst, params, sol, rng, &c);
            EXPECT_GE(c.count, 1);
            ASSERT_TRUE(check_feasibility(inst, sol).hard_feasible());
            ASSERT_NEAR(sol.cost.weighted, solution_cost(inst, params, sol).weighted, 1e-6);
        }
    }
}
