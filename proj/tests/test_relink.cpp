#include <gtest/gtest.h>

#include "darpdp/construct.hpp"
#include "darpdp/lns.hpp"
#include "darpdp/relink.hpp"
#include "support.hpp"

using namespace darpdp;

namespace {

RequestSpec wide(double px, double py, double dx, double dy) {
    RequestSpec q;
    q.pickup_x = px;
    q.pickup_y = py;
    q.delivery_x = dx;
    q.delivery_y = dy;
    q.pickup_earliest = 495;
    q.pickup_latest = 560;
    q.delivery_earliest = 495;
    q.delivery_latest = 580;
    return q;
}

VehicleSpec lane(double y) {
    VehicleSpec v;
    v.origin_y = y;
    v.dest_x = 10;
    v.dest_y = y;
    v.dest_earliest = 540;
    v.dest_latest = 560;
    return v;
}

Solution with_assignment(std::vector<int> a) {
    Solution s;
    s.assignment = std::move(a);
    return s;
}

// Two lanes, two requests near lane 0 and one near lane 1.
struct Lanes {
    Instance inst;
    SolverParams params;
    static constexpr int m = 2, n = 3;

    Lanes() {
        inst = build_instance("lanes", {lane(0), lane(10)},
                              {wide(2, 0.2, 3, 0.2), wide(5, 0.1, 6, 0.1), wide(4, 9.8, 5, 9.8)});
    }
    int p(int r) const { return 2 * m + r; }
    int d(int r) const { return 2 * m + n + r; }
};

// A few distinct solutions of one instance, from construction and perturbation.
std::vector<Solution> variants(const Instance& inst, const SolverParams& params, std::uint64_t seed, int count) {
    std::vector<Solution> out{build_initial(inst, params)};
    Rng rng = derive_rng(seed, 9);
    while (static_cast<int>(out.size()) < count) out.push_back(perturb(inst, params, out.back(), rng));
    return out;
}

}  // namespace

TEST(ComputeDelta, ReassignBetweenRoutes) {
    auto delta = compute_delta(with_assignment({0, 1}), with_assignment({1, 1}));
    ASSERT_EQ(delta.size(), 1u);
    EXPECT_EQ(delta[0], (DeltaMove{0, DeltaAction::Reassign, 1}));
}

TEST(ComputeDelta, InsertAndRemove) {
    auto delta = compute_delta(with_assignment({-1, 0, 1}), with_assignment({1, -1, 1}));
    ASSERT_EQ(delta.size(), 2u);
    EXPECT_EQ(delta[0], (DeltaMove{0, DeltaAction::InsertIntoGuidingRoute, 1}));
    EXPECT_EQ(delta[1], (DeltaMove{1, DeltaAction::Remove, -1}));
}

TEST(ComputeDelta, IdenticalIsEmpty) {
    EXPECT_TRUE(compute_delta(with_assignment({0, -1, 1}), with_assignment({0, -1, 1})).empty());
}

TEST(ApplyDeltaMove, ReassignMovesRequest) {
    Lanes L;
    auto sol = make_solution(L.inst, L.params,
                             {Route{0, {0, L.p(0), L.d(0), L.p(1), L.d(1), 2}}, Route{1, {1, L.p(2), L.d(2), 3}}});
    auto out = apply_delta_move(L.inst, L.params, sol, {2, DeltaAction::Reassign, 0});
    ASSERT_TRUE(out.has_value());
    EXPECT_EQ(out->assignment, (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(out->routes[1].stops, (std::vector<int>{1, 3}));
    EXPECT_NEAR(out->cost.weighted, solution_cost(L.inst, L.params, *out).weighted, 1e-9);
}

TEST(ApplyDeltaMove, RemoveAndInsert) {
    Lanes L;
    auto sol = make_solution(L.inst, L.params,
                             {Route{0, {0, L.p(0), L.d(0), 2}}, Route{1, {1, L.p(2), L.d(2), 3}}});
    auto removed = apply_delta_move(L.inst, L.params, sol, {0, DeltaAction::Remove, -1});
    ASSERT_TRUE(removed.has_value());
    EXPECT_EQ(removed->assignment[0], -1);
    auto inserted = apply_delta_move(L.inst, L.params, sol, {1, DeltaAction::InsertIntoGuidingRoute, 0});
    ASSERT_TRUE(inserted.has_value());
    EXPECT_EQ(inserted->assignment[1], 0);
}

TEST(ApplyDeltaMove, RejectsInconsistentMoves) {
    Lanes L;
    auto sol = make_solution(L.inst, L.params,
                             {Route{0, {0, L.p(0), L.d(0), 2}}, Route{1, {1, L.p(2), L.d(2), 3}}});
    EXPECT_FALSE(apply_delta_move(L.inst, L.params, sol, {1, DeltaAction::Remove, -1}).has_value());
    EXPECT_FALSE(apply_delta_move(L.inst, L.params, sol, {0, DeltaAction::InsertIntoGuidingRoute, 1}).has_value());
    EXPECT_FALSE(apply_delta_move(L.inst, L.params, sol, {1, DeltaAction::InsertIntoGuidingRoute, 5}).has_value());
}

TEST(ApplyDeltaMove, CapacityBlocksInsertion) {
    Lanes L;
    auto tight = L.inst;
    tight.vehicles[0].capacity = 1;
    // Overlapping windows force both requests aboard at once.
    for (int r : {0, 1}) {
        tight.vertices[L.p(r)].earliest = 500;
        tight.vertices[L.p(r)].latest = 501;
        tight.vertices[L.d(r)].earliest = 512;
        tight.vertices[L.d(r)].latest = 513;
    }
    auto sol = make_solution(tight, L.params, {Route{0, {0, L.p(0), L.d(0), 2}}, Route{1, {1, 3}}});
    EXPECT_FALSE(apply_delta_move(tight, L.params, sol, {1, DeltaAction::InsertIntoGuidingRoute, 0}).has_value());
}

TEST(PathRelink, IdenticalEndpoints) {
    auto inst = testing_support::random_instance(4100, 8, 2);
    SolverParams params;
    auto s = build_initial(inst, params);
    auto out = path_relink(inst, params, s, s);
    EXPECT_EQ(out.assignment, s.assignment);
    EXPECT_DOUBLE_EQ(objective(inst, out), objective(inst, s));
}

TEST(PathRelink, NeverWorseThanEndpoints) {
    SolverParams params;
    for (int s = 0; s < 20; ++s) {
        auto inst = testing_support::random_instance(4200 + s, 10, 2);
        auto v = variants(inst, params, 4200 + s, 4);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            auto out = path_relink(inst, params, v[i], v[i + 1]);
            EXPECT_LE(objective(inst, out), std::min(objective(inst, v[i]), objective(inst, v[i + 1])) + 1e-9);
            EXPECT_TRUE(check_feasibility(inst, out).hard_feasible());
            EXPECT_NEAR(out.cost.weighted, solution_cost(inst, params, out).weighted, 1e-6);
        }
    }
}

TEST(PathRelink, DeltaSequenceReachesGuide) {
    SolverParams params;
    int complete = 0;
    for (int s = 0; s < 40; ++s) {
        auto inst = testing_support::random_instance(4300 + s, 5, 2);
        auto v = variants(inst, params, 4300 + s, 2);
        Solution walk = v[0];
        bool ok = true;
        // Removals first so that reassignments find room.
        auto delta = compute_delta(v[0], v[1]);
        std::stable_partition(delta.begin(), delta.end(),
                              [](const DeltaMove& mv) { return mv.action == DeltaAction::Remove; });
        for (const auto& mv : delta) {
            auto next = apply_delta_move(inst, params, walk, mv);
            if (!next) {
                ok = false;
                break;
            }
            walk = *next;
        }
        if (!ok) continue;
        ++complete;
        EXPECT_EQ(walk.assignment, v[1].assignment);
        EXPECT_TRUE(compute_delta(walk, v[1]).empty());
    }
    EXPECT_GT(complete, 0);
}

TEST(EliteSet, KeepsAscendingAndBounded) {
    SolverParams params;
    auto inst = testing_support::random_instance(4400, 10, 2);
    auto v = variants(inst, params, 4400, 8);
    EliteSet elite;
    for (const auto& s : v) elite = update_elite(inst, elite, s, 3);
    ASSERT_LE(elite.solutions.size(), 3u);
    ASSERT_FALSE(elite.solutions.empty());
    for (std::size_t i = 1; i < elite.solutions.size(); ++i)
        EXPECT_LT(objective(inst, elite.solutions[i - 1]), objective(inst, elite.solutions[i]));
    double best = objective(inst, v[0]);
    for (const auto& s : v) best = std::min(best, objective(inst, s));
    EXPECT_DOUBLE_EQ(objective(inst, elite.solutions.front()), best);
}

TEST(EliteSet, SizeOneKeepsBest) {
    Lanes L;
    auto worse = make_solution(L.inst, L.params,
                               {Route{0, {0, L.p(0), L.d(0), L.p(2), L.d(2), 2}}, Route{1, {1, L.p(1), L.d(1), 3}}});
    auto better = make_solution(L.inst, L.params,
                                {Route{0, {0, L.p(0), L.d(0), L.p(1), L.d(1), 2}}, Route{1, {1, L.p(2), L.d(2), 3}}});
    ASSERT_LT(objective(L.inst, better), objective(L.inst, worse));
    auto elite = update_elite(L.inst, {}, worse, 1);
    elite = update_elite(L.inst, elite, better, 1);
    ASSERT_EQ(elite.solutions.size(), 1u);
    EXPECT_EQ(elite.solutions[0].assignment, better.assignment);
    elite = update_elite(L.inst, elite, worse, 1);
    EXPECT_EQ(elite.solutions[0].assignment, better.assignment);
}

TEST(EliteSet, SameAssignmentCheaperRoutingReplaces) {
    Lanes L;
    auto detour = make_solution(L.inst, L.params,
                                {Route{0, {0, L.p(1), L.p(0), L.d(0), L.d(1), 2}}, Route{1, {1, L.p(2), L.d(2), 3}}});
    auto direct = make_solution(L.inst, L.params,
                                {Route{0, {0, L.p(0), L.d(0), L.p(1), L.d(1), 2}}, Route{1, {1, L.p(2), L.d(2), 3}}});
    ASSERT_LT(objective(L.inst, direct), objective(L.inst, detour));
    auto elite = update_elite(L.inst, {}, detour, 3);
    elite = update_elite(L.inst, elite, direct, 3);
    ASSERT_EQ(elite.solutions.size(), 1u);
    EXPECT_EQ(elite.solutions[0].routes, direct.routes);
    EXPECT_TRUE(elite.contains_signature(detour));
}
