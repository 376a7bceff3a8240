#pragma once

// Cluster-first, route-second construction of the initial solution.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "darpdp/model.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Euclidean distance from p to the closed segment [a, b].
inline double point_segment_distance(Point p, Point a, Point b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

struct ClusterAssignment {
    std::vector<std::vector<int>> per_vehicle;                   // L_k
    std::vector<std::pair<int, std::vector<int>>> multi_cluster;  // (request, candidate vehicles)
    std::vector<int> unassigned;
};

inline ClusterAssignment cluster_requests(const Instance& inst, bool strict_mean = false) {
    const int m = inst.num_vehicles();
    const int n = inst.num_requests();
    ClusterAssignment out;
    out.per_vehicle.resize(m);
    std::vector<std::vector<int>> member(n);

    for (int k = 0; k < m; ++k) {
        const auto& o = inst.vertices[inst.vehicles[k].origin];
        const auto& t = inst.vertices[inst.vehicles[k].destination];
        const Point a{o.x, o.y};
        const Point b{t.x, t.y};
        std::vector<double> dist(inst.num_vertices());
        for (int v = 0; v < inst.num_vertices(); ++v) {
            dist[v] = point_segment_distance({inst.vertices[v].x, inst.vertices[v].y}, a, b);
        }
        // Mean over request vertices only unless the strict mode asks for all of V.
        const int first = strict_mean ? 0 : 2 * m;
        const int count = inst.num_vertices() - first;
        if (count <= 0) continue;
        const double mean = std::accumulate(dist.begin() + first, dist.end(), 0.0) / count;
        for (int r = 0; r < n; ++r) {
            if (dist[inst.requests[r].pickup] < mean && dist[inst.requests[r].delivery] < mean) {
                member[r].push_back(k);
            }
        }
    }
    for (int r = 0; r < n; ++r) {
        if (member[r].empty()) {
            out.unassigned.push_back(r);
        } else if (member[r].size() == 1) {
            out.per_vehicle[member[r].front()].push_back(r);
        } else {
            out.multi_cluster.emplace_back(r, member[r]);
        }
    }
    return out;
}

// Upper bound on the pickup service start: min{l_p, l_d - t_pd - s_d}.
inline double start_upper_bound(const Instance& inst, int request) {
    const auto& req = inst.requests[request];
    const auto& p = inst.vertices[req.pickup];
    const auto& d = inst.vertices[req.delivery];
    return std::min(p.latest, d.latest - inst.tt(req.pickup, req.delivery) - d.service);
}

inline Solution build_initial(const Instance& inst, const SolverParams& params) {
    Solution sol = empty_solution(inst, params);
    const auto clusters = cluster_requests(inst, params.strict_cluster_mean);

    // Sequential insertion of each vehicle's own list.
    for (int k = 0; k < inst.num_vehicles(); ++k) {
        auto list = clusters.per_vehicle[k];
        std::stable_sort(list.begin(), list.end(),
                         [&](int a, int b) { return start_upper_bound(inst, a) < start_upper_bound(inst, b); });
        for (int r : list) {
            auto ins = try_insert(inst, params, sol.routes[k], sol.route_eval[k].weighted, r);
            if (ins) apply_insertion(inst, sol, r, *ins);
        }
    }

    // Parallel insertion: each shared request goes to its cheapest candidate.
    for (const auto& [r, candidates] : clusters.multi_cluster) {
        std::optional<Insertion> best;
        for (int k : candidates) {
            auto ins = try_insert(inst, params, sol.routes[k], sol.route_eval[k].weighted, r);
            if (ins && (!best || ins->delta < best->delta - kEps ||
                        (std::abs(ins->delta - best->delta) <= kEps && ins->vehicle < best->vehicle))) {
                best = ins;
            }
        }
        if (best) apply_insertion(inst, sol, r, *best);
    }
    return sol;
}

}  // namespace darpdp
