#pragma once

// Test fixtures and reference implementations written independently of the
// library: a straightforward two-pass scheduler and a permutation enumerator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "darpdp/model.hpp"

namespace testing_support {

using darpdp::Instance;
using darpdp::InstanceLimits;
using darpdp::RequestSpec;
using darpdp::SolverParams;
using darpdp::VehicleSpec;

// Random instance on a small square. Windows are loose enough that most
// requests are individually servable.
inline Instance random_instance(std::uint64_t seed, int n, int m, double side = 4.0, double width = 15.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, side);
    std::uniform_real_distribution<double> start(495.0, 540.0);
    std::uniform_real_distribution<double> slack(0.0, 8.0);
    std::uniform_real_distribution<double> dest(550.0, 595.0);
    std::vector<VehicleSpec> vs;
    for (int k = 0; k < m; ++k) {
        VehicleSpec v;
        v.origin_x = coord(rng);
        v.origin_y = coord(rng);
        v.dest_x = coord(rng);
        v.dest_y = coord(rng);
        v.dest_earliest = dest(rng);
        v.dest_latest = v.dest_earliest + 15.0;
        vs.push_back(v);
    }
    std::vector<RequestSpec> rs;
    for (int r = 0; r < n; ++r) {
        RequestSpec q;
        q.pickup_x = coord(rng);
        q.pickup_y = coord(rng);
        q.delivery_x = coord(rng);
        q.delivery_y = coord(rng);
        const double e = start(rng);
        q.pickup_earliest = e;
        q.pickup_latest = e + width;
        const double direct = 2.0 * std::hypot(q.pickup_x - q.delivery_x, q.pickup_y - q.delivery_y);
        const double de = e + 0.5 + direct + slack(rng);
        q.delivery_earliest = de - width / 2.0;
        q.delivery_latest = de + width;
        rs.push_back(q);
    }
    return darpdp::build_instance("rand_" + std::to_string(seed), vs, rs);
}

namespace ref {

inline double dist(const Instance& inst, int a, int b) {
    const auto& p = inst.vertices[a];
    const auto& q = inst.vertices[b];
    return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)) * inst.time_factor;
}

struct Timing {
    std::vector<double> start;
    double lateness = 0.0;
};

// Earliest-start forward pass, then the origin departure is pushed back by
// the largest delay that keeps every stop on time (the destination may not
// get later than either its latest time or its earliest-schedule arrival).
inline std::optional<Timing> schedule(const Instance& inst, int k, const std::vector<int>& stops) {
    const auto& veh = inst.vehicles[k];
    const std::size_t len = stops.size();
    auto run = [&](double depart, std::vector<double>& t, std::vector<double>& arr) {
        t.assign(len, 0.0);
        arr.assign(len, 0.0);
        t[0] = arr[0] = depart;
        for (std::size_t i = 1; i < len; ++i) {
            arr[i] = t[i - 1] + inst.vertices[stops[i - 1]].service + dist(inst, stops[i - 1], stops[i]);
            t[i] = std::max(arr[i], inst.vertices[stops[i]].earliest);
        }
    };
    std::vector<double> t, arr;
    run(inst.vertices[stops[0]].earliest, t, arr);
    for (std::size_t i = 1; i + 1 < len; ++i)
        if (t[i] > inst.vertices[stops[i]].latest + 1e-9) return std::nullopt;
    double delay = inst.vertices[stops[0]].latest - t[0];
    double waited = 0.0;
    for (std::size_t i = 1; i < len; ++i) {
        waited += t[i] - arr[i];
        const double lim = i + 1 == len ? std::max(inst.vertices[stops[i]].latest, t[i]) : inst.vertices[stops[i]].latest;
        delay = std::min(delay, waited + lim - t[i]);
    }
    if (delay > 1e-9) run(t[0] + delay, t, arr);

    int load = 0;
    for (std::size_t i = 0; i < len; ++i) {
        load += inst.vertices[stops[i]].load_delta;
        if (load > veh.capacity) return std::nullopt;
    }
    const int n = inst.num_requests();
    for (std::size_t i = 0; i < len; ++i) {
        const int v = stops[i];
        if (v < 2 * inst.num_vehicles() || v >= 2 * inst.num_vehicles() + n) continue;
        for (std::size_t j = i + 1; j < len; ++j) {
            if (stops[j] == v + n) {
                if (t[j] - t[i] - inst.vertices[v].service > inst.max_ride_time + 1e-9) return std::nullopt;
            }
        }
    }
    if (t.back() - t.front() > inst.max_route_duration + 1e-9) return std::nullopt;
    const double late = std::max(0.0, t.back() - inst.vertices[stops.back()].latest);
    if (late > veh.dest_tolerance + 1e-9) return std::nullopt;
    return Timing{t, late};
}

inline std::optional<double> route_cost(const Instance& inst, const SolverParams& params, int k,
                                        const std::vector<int>& stops) {
    auto tm = schedule(inst, k, stops);
    if (!tm) return std::nullopt;
    double travel = 0.0;
    for (std::size_t i = 1; i < stops.size(); ++i) travel += dist(inst, stops[i - 1], stops[i]);
    return params.w1 * travel + params.w2 * tm->lateness;
}

// Cheapest route for vehicle k over a request subset, by enumerating every
// permutation of the subset's vertices.
inline std::optional<double> best_route(const Instance& inst, const SolverParams& params, int k, unsigned mask) {
    const int n = inst.num_requests();
    const int m = inst.num_vehicles();
    std::vector<int> verts;
    for (int r = 0; r < n; ++r) {
        if (mask & (1u << r)) {
            verts.push_back(2 * m + r);
            verts.push_back(2 * m + n + r);
        }
    }
    std::sort(verts.begin(), verts.end());
    std::optional<double> best;
    do {
        bool prec = true;
        for (int r = 0; r < n && prec; ++r) {
            if (!(mask & (1u << r))) continue;
            const auto p = std::find(verts.begin(), verts.end(), 2 * m + r);
            const auto d = std::find(verts.begin(), verts.end(), 2 * m + n + r);
            prec = p < d;
        }
        if (!prec) continue;
        std::vector<int> stops{k};
        stops.insert(stops.end(), verts.begin(), verts.end());
        stops.push_back(m + k);
        auto c = route_cost(inst, params, k, stops);
        if (c && (!best || *c < *best)) best = c;
    } while (std::next_permutation(verts.begin(), verts.end()));
    return best;
}

// Global optimum: every assignment of requests to a vehicle or rejection
// meeting the served-fraction bound.
inline std::optional<double> optimum(const Instance& inst, const SolverParams& params) {
    const int n = inst.num_requests();
    const int m = inst.num_vehicles();
    const int need = static_cast<int>(std::ceil(inst.served_fraction_min * n - 1e-9));
    std::map<std::pair<int, unsigned>, std::optional<double>> memo;
    auto route = [&](int k, unsigned mask) {
        auto key = std::make_pair(k, mask);
        auto it = memo.find(key);
        if (it == memo.end()) it = memo.emplace(key, best_route(inst, params, k, mask)).first;
        return it->second;
    };
    std::optional<double> best;
    std::vector<int> choice(n, -1);
    long total = 1;
    for (int r = 0; r < n; ++r) total *= (m + 1);
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::vector<unsigned> masks(m, 0u);
        int served = 0;
        for (int r = 0; r < n; ++r) {
            const int a = static_cast<int>(c % (m + 1)) - 1;
            c /= (m + 1);
            if (a >= 0) {
                masks[a] |= 1u << r;
                ++served;
            }
        }
        if (served < need) continue;
        double sum = 0.0;
        bool ok = true;
        for (int k = 0; k < m && ok; ++k) {
            auto rc = route(k, masks[k]);
            if (!rc) ok = false;
            else sum += *rc;
        }
        if (ok && (!best || sum < *best)) best = sum;
    }
    return best;
}

}  // namespace ref

}  // namespace testing_support
