#pragma once

// Destroy/repair perturbation: four removal and three insertion operators.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "darpdp/model.hpp"
#include "darpdp/neighborhoods.hpp"
#include "darpdp/random.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

enum class RemovalKind { Route, Random, Greedy, Related };
enum class InsertionKind { Best, Random, Compatibility };

inline constexpr std::array<RemovalKind, 4> kAllRemovals{RemovalKind::Route, RemovalKind::Random, RemovalKind::Greedy,
                                                         RemovalKind::Related};
inline constexpr std::array<InsertionKind, 3> kAllInsertions{InsertionKind::Best, InsertionKind::Random,
                                                             InsertionKind::Compatibility};

inline std::string_view to_string(RemovalKind k) {
    switch (k) {
        case RemovalKind::Route: return "route";
        case RemovalKind::Random: return "random";
        case RemovalKind::Greedy: return "greedy";
        case RemovalKind::Related: return "related";
    }
    return "unknown";
}

inline std::string_view to_string(InsertionKind k) {
    switch (k) {
        case InsertionKind::Best: return "best";
        case InsertionKind::Random: return "random";
        case InsertionKind::Compatibility: return "compatibility";
    }
    return "unknown";
}

// Travel-time saving of taking request r out of its route.
inline double removal_saving(const Instance& inst, const Solution& sol, int r) {
    const int k = sol.assignment.at(r);
    if (k < 0) throw std::invalid_argument("request " + std::to_string(r) + " is not served");
    const auto& s = sol.routes[k].stops;
    const int pv = inst.requests[r].pickup;
    const int dv = inst.requests[r].delivery;
    const int p = static_cast<int>(std::find(s.begin(), s.end(), pv) - s.begin());
    const int d = static_cast<int>(std::find(s.begin(), s.end(), dv) - s.begin());
    auto t = [&](int i, int j) { return inst.tt(s[i], s[j]); };
    if (d == p + 1) return (t(p - 1, p) + t(p, d) + t(d, d + 1)) - t(p - 1, d + 1);
    return (t(p - 1, p) + t(p, p + 1) - t(p - 1, p + 1)) + (t(d - 1, d) + t(d, d + 1) - t(d - 1, d + 1));
}

// Per-request scalar attributes: pickup and delivery distance from the
// coordinate origin, pickup earliest time, delivery latest time.
struct RequestAttributes {
    std::vector<std::array<double, 4>> values;
    std::array<double, 4> lo{};
    std::array<double, 4> hi{};

    explicit RequestAttributes(const Instance& inst) {
        const int n = inst.num_requests();
        values.resize(n);
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (int r = 0; r < n; ++r) {
            const auto& p = inst.pickup_of(r);
            const auto& d = inst.delivery_of(r);
            values[r] = {std::hypot(p.x, p.y), std::hypot(d.x, d.y), p.earliest, d.latest};
            for (int a = 0; a < 4; ++a) {
                lo[a] = std::min(lo[a], values[r][a]);
                hi[a] = std::max(hi[a], values[r][a]);
            }
        }
    }

    double similarity(int ri, int rj) const {
        double sum = 0.0;
        for (int a = 0; a < 4; ++a) {
            const double range = hi[a] - lo[a];
            sum += range > 0.0 ? 1.0 - std::abs(values[ri][a] - values[rj][a]) / range : 1.0;
        }
        return sum / 4.0;
    }
};

inline double similarity(const Instance& inst, int ri, int rj) { return RequestAttributes(inst).similarity(ri, rj); }

inline double comp_measure(const Instance& inst, int r1, int r2) {
    const auto& q1 = inst.requests[r1];
    const auto& q2 = inst.requests[r2];
    auto term = [&](int a, int b) {
        const auto& va = inst.vertices[a];
        const auto& vb = inst.vertices[b];
        const double t = inst.tt(a, b);
        return std::max(std::abs(va.latest - vb.earliest - t), std::abs(vb.latest - va.earliest - t));
    };
    return term(q1.pickup, q2.pickup) + term(q1.pickup, q2.delivery) + term(q1.delivery, q2.pickup) +
           term(q1.delivery, q2.delivery);
}

struct DestroyResult {
    Solution solution;
    std::vector<int> removed;
};

namespace detail {

inline bool take_out(const Instance& inst, const SolverParams& params, Solution& sol, int r, std::vector<int>& removed,
                     std::vector<int>* touched) {
    const int k = sol.assignment[r];
    if (!remove_request(inst, params, sol, r)) return false;
    removed.push_back(r);
    if (touched && std::find(touched->begin(), touched->end(), k) == touched->end()) touched->push_back(k);
    return true;
}

}  // namespace detail

// Removes requests from a feasible solution. A request whose removal would
// leave its route unschedulable is skipped.
inline DestroyResult destroy(const Instance& inst, const SolverParams& params, Solution sol, RemovalKind kind,
                             int count, Rng& rng) {
    if (count < 1) throw std::invalid_argument("removal count must be at least 1");
    DestroyResult out;
    auto served = sol.served_requests();
    count = std::min<int>(count, static_cast<int>(served.size()));

    switch (kind) {
        case RemovalKind::Route: {
            int pick = -1;
            for (int k = 0; k < inst.num_vehicles(); ++k) {
                const int sz = sol.routes[k].num_requests();
                if (sz > 0 && (pick < 0 || sz < sol.routes[pick].num_requests())) pick = k;
            }
            if (pick < 0) break;
            std::vector<int> members;
            for (int v : sol.routes[pick].stops)
                if (inst.is_pickup(v)) members.push_back(inst.request_of_vertex(v));
            if (set_route(inst, params, sol, pick, empty_route(inst, pick).stops)) {
                out.removed = members;
            } else {
                for (int r : members) detail::take_out(inst, params, sol, r, out.removed, nullptr);
            }
            break;
        }
        case RemovalKind::Random: {
            shuffle(served, rng);
            std::vector<int> touched;
            for (int r : served) {
                if (static_cast<int>(out.removed.size()) >= count) break;
                detail::take_out(inst, params, sol, r, out.removed, &touched);
            }
            std::sort(touched.begin(), touched.end());
            for (int k : touched) shift_exhaustive(inst, params, sol, k);
            break;
        }
        case RemovalKind::Greedy: {
            for (int step = 0; step < count; ++step) {
                std::vector<std::pair<double, int>> ranked;
                for (int r : sol.served_requests()) ranked.emplace_back(removal_saving(inst, sol, r), r);
                std::stable_sort(ranked.begin(), ranked.end(),
                                 [](const auto& a, const auto& b) { return a.first > b.first; });
                bool done = false;
                for (const auto& [saving, r] : ranked) {
                    if (detail::take_out(inst, params, sol, r, out.removed, nullptr)) {
                        done = true;
                        break;
                    }
                }
                if (!done) break;
            }
            break;
        }
        case RemovalKind::Related: {
            if (served.empty()) break;
            const RequestAttributes attrs(inst);
            const int seed = served[uniform_int(rng, 0, static_cast<int>(served.size()) - 1)];
            std::vector<std::pair<double, int>> ranked;
            for (int r : served)
                if (r != seed) ranked.emplace_back(attrs.similarity(seed, r), r);
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            detail::take_out(inst, params, sol, seed, out.removed, nullptr);
            for (const auto& [sim, r] : ranked) {
                if (static_cast<int>(out.removed.size()) >= count) break;
                detail::take_out(inst, params, sol, r, out.removed, nullptr);
            }
            break;
        }
    }
    out.solution = std::move(sol);
    return out;
}

// Mean compatibility distance between a request and the requests of a route;
// +infinity for an empty route.
inline double route_compatibility(const Instance& inst, const Route& route, int request) {
    double sum = 0.0;
    int count = 0;
    for (int v : route.stops) {
        if (!inst.is_pickup(v)) continue;
        sum += comp_measure(inst, request, inst.request_of_vertex(v));
        ++count;
    }
    return count == 0 ? std::numeric_limits<double>::infinity() : sum / count;
}

// Inserts as many pool requests as can be placed feasibly.
inline Solution repair(const Instance& inst, const SolverParams& params, Solution sol, InsertionKind kind,
                       std::vector<int> pool, Rng& rng) {
    std::erase_if(pool, [&](int r) { return sol.assignment.at(r) >= 0; });
    shuffle(pool, rng);
    for (int r : pool) {
        switch (kind) {
            case InsertionKind::Best: {
                if (auto ins = best_insertion(inst, params, sol, r)) apply_insertion(inst, sol, r, *ins);
                break;
            }
            case InsertionKind::Random: {
                std::vector<Insertion> options;
                for (int k = 0; k < inst.num_vehicles(); ++k) {
                    for_each_feasible_insertion(inst, params, sol.routes[k], sol.route_eval[k].weighted, r,
                                                [&](const Insertion& ins) {
                                                    options.push_back(ins);
                                                    return true;
                                                });
                }
                if (!options.empty()) {
                    apply_insertion(inst, sol, r, options[uniform_int(rng, 0, static_cast<int>(options.size()) - 1)]);
                }
                break;
            }
            case InsertionKind::Compatibility: {
                std::vector<std::pair<double, int>> order;
                for (int k = 0; k < inst.num_vehicles(); ++k)
                    order.emplace_back(route_compatibility(inst, sol.routes[k], r), k);
                std::stable_sort(order.begin(), order.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
                for (const auto& [score, k] : order) {
                    auto ins = try_insert(inst, params, sol.routes[k], sol.route_eval[k].weighted, r);
                    if (ins) {
                        apply_insertion(inst, sol, r, *ins);
                        break;
                    }
                }
                break;
            }
        }
    }
    return sol;
}

struct PerturbChoice {
    RemovalKind removal = RemovalKind::Route;
    InsertionKind insertion = InsertionKind::Best;
    int count = 0;
};

inline Solution perturb(const Instance& inst, const SolverParams& params, const Solution& sol, Rng& rng,
                        PerturbChoice* choice = nullptr) {
    const int served = sol.served();
    const int max_count = std::max(1, static_cast<int>(std::floor(params.removal_fraction * served)));
    PerturbChoice c;
    c.count = uniform_int(rng, 1, max_count);
    c.removal = kAllRemovals[uniform_int(rng, 0, static_cast<int>(kAllRemovals.size()) - 1)];
    c.insertion = kAllInsertions[uniform_int(rng, 0, static_cast<int>(kAllInsertions.size()) - 1)];
    if (choice) *choice = c;
    auto destroyed = destroy(inst, params, sol, c.removal, c.count, rng);
    auto pool = destroyed.solution.rejected();
    return repair(inst, params, std::move(destroyed.solution), c.insertion, std::move(pool), rng);
}

}  // namespace darpdp
