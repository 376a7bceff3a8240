#include <gtest/gtest.h>

#include "darpdp/model.hpp"
#include "support.hpp"

using namespace darpdp;

namespace {

Instance two_points(double ax, double ay, double bx, double by, double factor) {
    VehicleSpec v;
    v.origin_x = ax;
    v.origin_y = ay;
    v.dest_x = bx;
    v.dest_y = by;
    InstanceLimits lim;
    lim.time_factor = factor;
    return build_instance("pts", {v}, {}, lim);
}

Instance simple(int n) {
    std::vector<RequestSpec> rs;
    for (int r = 0; r < n; ++r) {
        RequestSpec q;
        q.pickup_x = r;
        q.delivery_x = r + 1;
        q.pickup_earliest = 500;
        q.pickup_latest = 520;
        q.delivery_earliest = 500;
        q.delivery_latest = 540;
        rs.push_back(q);
    }
    return build_instance("simple", {VehicleSpec{}}, rs);
}

}  // namespace

TEST(TravelTime, ZeroDiagonal) {
    auto inst = testing_support::random_instance(3, 3, 2);
    for (int i = 0; i < inst.num_vertices(); ++i) {
        EXPECT_EQ(travel_time(inst, i, i), 0.0);
        EXPECT_EQ(distance_miles(inst, i, i), 0.0);
    }
}

TEST(TravelTime, ThreeFourFive) {
    auto inst = two_points(0, 0, 3, 4, 1.0);
    EXPECT_DOUBLE_EQ(travel_time(inst, 0, 1), 5.0);
}

TEST(TravelTime, ScaledByFactor) {
    auto inst = two_points(1, 1, 4, 5, 2.0);
    EXPECT_DOUBLE_EQ(travel_time(inst, 0, 1), 10.0);
}

TEST(TravelTime, UnknownVertexThrows) {
    auto inst = two_points(0, 0, 1, 1, 1.0);
    EXPECT_THROW(travel_time(inst, 0, 7), std::out_of_range);
    EXPECT_THROW(distance_miles(inst, -1, 0), std::out_of_range);
}

TEST(DistanceMiles, Examples) {
    EXPECT_DOUBLE_EQ(distance_miles(two_points(0, 0, 3, 4, 2.0), 0, 1), 5.0);
    EXPECT_DOUBLE_EQ(distance_miles(two_points(2, 0, 2, 7, 2.0), 0, 1), 7.0);
}

TEST(TravelTime, MetricProperties) {
    auto inst = testing_support::random_instance(11, 4, 2);
    const int nv = inst.num_vertices();
    for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) {
            EXPECT_EQ(inst.tt(i, j), inst.tt(j, i));
            EXPECT_GE(inst.tt(i, j), 0.0);
            for (int k = 0; k < nv; ++k) EXPECT_LE(inst.tt(i, k), inst.tt(i, j) + inst.tt(j, k) + 1e-9);
        }
    }
}

TEST(ValidateInstance, WellFormedIsClean) {
    EXPECT_TRUE(validate_instance(simple(2)).ok());
}

TEST(ValidateInstance, ReversedWindow) {
    auto inst = simple(2);
    inst.vertices[inst.requests[0].pickup].earliest = 30;
    inst.vertices[inst.requests[0].pickup].latest = 20;
    auto rep = validate_instance(inst);
    ASSERT_FALSE(rep.ok());
    bool found = false;
    for (const auto& s : rep.issues) found |= s.find("earliest > latest at vertex") != std::string::npos;
    EXPECT_TRUE(found);
}

TEST(ValidateInstance, PermutedDeliveryIsPairingViolation) {
    auto inst = simple(3);
    std::swap(inst.requests[0].delivery, inst.requests[1].delivery);
    auto rep = validate_instance(inst);
    ASSERT_FALSE(rep.ok());
    bool found = false;
    for (const auto& s : rep.issues) found |= s.find("pairing") != std::string::npos;
    EXPECT_TRUE(found);
}

TEST(ValidateInstance, PureAndIdempotent) {
    auto inst = simple(2);
    inst.vertices[2].latest = 0;
    auto a = validate_instance(inst);
    auto b = validate_instance(inst);
    EXPECT_EQ(a.issues, b.issues);
}

TEST(Model, LoadDeltasPair) {
    auto inst = testing_support::random_instance(5, 4, 1);
    for (const auto& r : inst.requests) {
        EXPECT_EQ(inst.vertices[r.pickup].load_delta, -inst.vertices[r.delivery].load_delta);
        EXPECT_EQ(r.delivery, r.pickup + inst.num_requests());
    }
}

TEST(Model, MinServed) {
    EXPECT_EQ(simple(10).min_served(), 8);
    EXPECT_EQ(simple(1).min_served(), 1);
    EXPECT_EQ(simple(4).min_served(), 4);
    EXPECT_EQ(simple(0).min_served(), 0);
}

TEST(SolverParams, DefaultsMatchTable) {
    SolverParams p;
    EXPECT_EQ(p.w1, 40.0);
    EXPECT_EQ(p.w2, 60.0);
    EXPECT_EQ(p.alpha, 0.1);
    EXPECT_EQ(p.beta1, 5.0);
    EXPECT_EQ(p.beta2, 1.0);
    EXPECT_EQ(p.gamma, 0.9);
    EXPECT_EQ(p.size_n, 3);
    EXPECT_EQ(p.size_e, 1);
    EXPECT_EQ(p.alpha_t, 0.99);
    EXPECT_EQ(p.iter_max, 10);
    EXPECT_TRUE(validate_params(p).empty());
}

TEST(SolverParams, RejectsOutOfRange) {
    SolverParams p;
    p.gamma = 1.0;
    EXPECT_FALSE(validate_params(p).empty());
    p = {};
    p.size_e = 0;
    EXPECT_FALSE(validate_params(p).empty());
    p = {};
    p.w2 = 0;
    EXPECT_FALSE(validate_params(p).empty());
}
