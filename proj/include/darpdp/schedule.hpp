#pragma once

// Routes, service-time scheduling, feasibility and the weighted objective.
// Every cost reported anywhere in the library is computed here.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "darpdp/model.hpp"

namespace darpdp {

inline constexpr double kEps = 1e-9;

// Ordered by reporting priority of schedule_route.
enum class Constraint {
    Structure,
    Pairing,
    Precedence,
    TimeWindow,
    RideTime,
    Capacity,
    Duration,
    DestinationLateness,
    Coverage,
    EpsilonServed,
};

inline std::string_view to_string(Constraint c) {
    switch (c) {
        case Constraint::Structure: return "structure";
        case Constraint::Pairing: return "pairing";
        case Constraint::Precedence: return "precedence";
        case Constraint::TimeWindow: return "time-window";
        case Constraint::RideTime: return "ride-time";
        case Constraint::Capacity: return "capacity";
        case Constraint::Duration: return "route-duration";
        case Constraint::DestinationLateness: return "destination-lateness";
        case Constraint::Coverage: return "coverage";
        case Constraint::EpsilonServed: return "epsilon-constraint";
    }
    return "unknown";
}

struct Infeasible {
    Constraint family = Constraint::Structure;
    int vehicle = -1;
    int stop = -1;     // position in the route, when applicable
    int request = -1;  // offending request, when applicable
    std::string detail;

    std::string describe() const {
        std::ostringstream os;
        os << to_string(family);
        if (vehicle >= 0) os << " [vehicle " << vehicle << "]";
        if (stop >= 0) os << " [stop " << stop << "]";
        if (request >= 0) os << " [request " << request << "]";
        if (!detail.empty()) os << ": " << detail;
        return os.str();
    }
};

class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(Infeasible why) : std::runtime_error(why.describe()), why_(std::move(why)) {}
    const Infeasible& why() const { return why_; }

private:
    Infeasible why_;
};

struct Route {
    int vehicle = 0;
    std::vector<int> stops;

    int num_requests() const { return stops.size() >= 2 ? static_cast<int>(stops.size() - 2) / 2 : 0; }
    bool operator==(const Route&) const = default;
};

struct Schedule {
    std::vector<double> start_times;
    std::vector<int> loads;  // passengers on board after servicing each stop
    double duration = 0.0;
    double lateness = 0.0;
};

using ScheduleResult = std::variant<Schedule, Infeasible>;

inline Route empty_route(const Instance& inst, int vehicle) {
    const auto& v = inst.vehicles.at(vehicle);
    return Route{vehicle, {v.origin, v.destination}};
}

namespace detail {

// Forward pass from the given origin departure. Returns the position of the
// first stop whose start exceeds its latest time, or -1. The destination is
// never reported here (its bound includes the driver tolerance).
inline int forward_pass(const Instance& inst, const std::vector<int>& stops, double depart, std::vector<double>& t,
                        std::vector<double>* arrivals) {
    const auto n = stops.size();
    t.resize(n);
    if (arrivals) arrivals->resize(n);
    t[0] = depart;
    if (arrivals) (*arrivals)[0] = depart;
    int bad = -1;
    for (std::size_t i = 1; i < n; ++i) {
        const auto& prev = inst.vertices[stops[i - 1]];
        const auto& cur = inst.vertices[stops[i]];
        const double arr = t[i - 1] + prev.service + inst.tt(stops[i - 1], stops[i]);
        if (arrivals) (*arrivals)[i] = arr;
        t[i] = std::max(cur.earliest, arr);
        if (bad < 0 && i + 1 < n && t[i] > cur.latest + kEps) bad = static_cast<int>(i);
    }
    return bad;
}

// Schedules a structurally valid route. With `all == nullptr` it stops at the
// first violation found and reports it through `first`; otherwise every
// violation is appended to `all`. Returns true when the route is feasible.
inline bool analyze_route(const Instance& inst, int vehicle, const std::vector<int>& stops, Schedule& out,
                          Infeasible* first, std::vector<Infeasible>* all) {
    const auto& veh = inst.vehicles[vehicle];
    const auto n = stops.size();
    bool ok = true;
    auto report = [&](Constraint c, int stop, int req, std::string detail) {
        ok = false;
        Infeasible why{c, vehicle, stop, req, std::move(detail)};
        if (all) {
            all->push_back(std::move(why));
        } else if (first) {
            *first = std::move(why);
        }
    };

    // Loads.
    out.loads.resize(n);
    int load = 0;
    for (std::size_t i = 0; i < n; ++i) {
        load += inst.vertices[stops[i]].load_delta;
        out.loads[i] = load;
        if (load > veh.capacity || load < 0) {
            std::ostringstream os;
            os << "load " << load << " exceeds capacity " << veh.capacity;
            report(Constraint::Capacity, static_cast<int>(i), inst.request_of_vertex(stops[i]), os.str());
            if (!all) return false;
        }
    }

    // Forward pass from the origin's earliest time.
    const auto& origin = inst.vertices[stops.front()];
    static thread_local std::vector<double> arrivals;
    int bad = forward_pass(inst, stops, origin.earliest, out.start_times, &arrivals);
    if (bad >= 0) {
        std::ostringstream os;
        os << "start " << out.start_times[bad] << " after latest " << inst.vertices[stops[bad]].latest;
        report(Constraint::TimeWindow, bad, inst.request_of_vertex(stops[bad]), os.str());
        if (!all) return false;
    } else {
        // Delay the departure by the largest amount that keeps every stop
        // within its latest time, waiting absorbing the delay where present.
        double slack = origin.latest - out.start_times[0];
        double wait = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            wait += out.start_times[i] - arrivals[i];
            double latest = inst.vertices[stops[i]].latest;
            if (i + 1 == n) latest = std::max(latest, out.start_times[i]);
            slack = std::min(slack, wait + latest - out.start_times[i]);
        }
        if (slack > kEps) {
            forward_pass(inst, stops, out.start_times[0] + slack, out.start_times, nullptr);
        }
    }
    const auto& t = out.start_times;

    // Ride times.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!inst.is_pickup(stops[i])) continue;
        const int d = stops[i] + inst.num_requests();
        for (std::size_t j = i + 1; j + 1 < n; ++j) {
            if (stops[j] != d) continue;
            const double ride = t[j] - (t[i] + inst.vertices[stops[i]].service);
            if (ride > inst.max_ride_time + kEps) {
                std::ostringstream os;
                os << "ride time " << ride << " exceeds " << inst.max_ride_time;
                report(Constraint::RideTime, static_cast<int>(i), inst.request_of_vertex(stops[i]), os.str());
                if (!all) return false;
            }
            break;
        }
    }

    out.duration = t.back() - t.front();
    if (out.duration > inst.max_route_duration + kEps) {
        std::ostringstream os;
        os << "duration " << out.duration << " exceeds " << inst.max_route_duration;
        report(Constraint::Duration, static_cast<int>(n - 1), -1, os.str());
        if (!all) return false;
    }

    const auto& dest = inst.vertices[stops.back()];
    out.lateness = std::max(0.0, t.back() - dest.latest);
    if (out.lateness > veh.dest_tolerance + kEps) {
        std::ostringstream os;
        os << "arrival " << t.back() << " exceeds " << dest.latest << " + tolerance " << veh.dest_tolerance;
        report(Constraint::DestinationLateness, static_cast<int>(n - 1), -1, os.str());
        if (!all) return false;
    }
    return ok;
}

inline double route_travel(const Instance& inst, const std::vector<int>& stops, ArcCost mode) {
    double sum = 0.0;
    for (std::size_t i = 1; i < stops.size(); ++i) sum += inst.arc_cost(stops[i - 1], stops[i], mode);
    return sum;
}

}  // namespace detail

// Structural problems (endpoints, unknown or repeated vertices, pairing and
// precedence). Empty result means the route can be scheduled.
inline std::vector<Infeasible> structural_issues(const Instance& inst, const Route& route) {
    std::vector<Infeasible> out;
    const int k = route.vehicle;
    if (k < 0 || k >= inst.num_vehicles()) {
        out.push_back({Constraint::Structure, k, -1, -1, "unknown vehicle"});
        return out;
    }
    const auto& veh = inst.vehicles[k];
    const auto& s = route.stops;
    if (s.size() < 2 || s.front() != veh.origin || s.back() != veh.destination) {
        out.push_back({Constraint::Structure, k, -1, -1, "route must start at the origin and end at the destination"});
        return out;
    }
    std::vector<int> pos(inst.num_vertices(), -1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int v = s[i];
        if (v < 0 || v >= inst.num_vertices()) {
            out.push_back({Constraint::Structure, k, static_cast<int>(i), -1, "unknown vertex " + std::to_string(v)});
            continue;
        }
        if (pos[v] >= 0) {
            out.push_back({Constraint::Structure, k, static_cast<int>(i), inst.request_of_vertex(v),
                           "vertex " + std::to_string(v) + " visited twice"});
            continue;
        }
        if (i > 0 && i + 1 < s.size() && inst.is_endpoint(v)) {
            out.push_back({Constraint::Structure, k, static_cast<int>(i), -1, "vehicle endpoint inside route"});
        }
        pos[v] = static_cast<int>(i);
    }
    for (int r = 0; r < inst.num_requests(); ++r) {
        const int pp = pos[inst.requests[r].pickup];
        const int dp = pos[inst.requests[r].delivery];
        if ((pp < 0) != (dp < 0)) {
            out.push_back({Constraint::Pairing, k, std::max(pp, dp), r, "pickup and delivery on different routes"});
        } else if (pp >= 0 && dp < pp) {
            out.push_back({Constraint::Precedence, k, dp, r, "delivery before pickup"});
        }
    }
    return out;
}

// Two-pass schedule: earliest starts, then the latest origin departure that
// violates no downstream latest time. Reports the highest-priority violation.
inline ScheduleResult schedule_route(const Instance& inst, const Route& route) {
    auto issues = structural_issues(inst, route);
    if (!issues.empty()) {
        return *std::min_element(issues.begin(), issues.end(),
                                 [](const auto& a, const auto& b) { return a.family < b.family; });
    }
    Schedule sched;
    std::vector<Infeasible> all;
    if (detail::analyze_route(inst, route.vehicle, route.stops, sched, nullptr, &all)) return sched;
    return *std::min_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.family != b.family ? a.family < b.family : a.stop < b.stop;
    });
}

struct RouteEval {
    double travel = 0.0;
    double lateness = 0.0;
    double weighted = 0.0;
};

// Fast feasibility + cost of a structurally valid stop sequence.
inline std::optional<RouteEval> evaluate_route(const Instance& inst, const SolverParams& params, int vehicle,
                                               const std::vector<int>& stops) {
    static thread_local Schedule scratch;
    if (!detail::analyze_route(inst, vehicle, stops, scratch, nullptr, nullptr)) return std::nullopt;
    RouteEval ev;
    ev.travel = detail::route_travel(inst, stops, params.arc_cost);
    ev.lateness = scratch.lateness;
    ev.weighted = params.w1 * ev.travel + params.w2 * ev.lateness;
    return ev;
}

inline std::optional<RouteEval> evaluate_route(const Instance& inst, const SolverParams& params, const Route& r) {
    return evaluate_route(inst, params, r.vehicle, r.stops);
}

struct Cost {
    double travel = 0.0;
    double lateness_total = 0.0;
    double weighted = 0.0;
    int served = 0;
};

// One route per vehicle (index = vehicle id) plus the request assignment.
struct Solution {
    std::vector<Route> routes;
    std::vector<RouteEval> route_eval;
    std::vector<int> assignment;  // request -> vehicle, -1 when rejected
    Cost cost;

    std::vector<int> rejected() const {
        std::vector<int> out;
        for (int r = 0; r < static_cast<int>(assignment.size()); ++r)
            if (assignment[r] < 0) out.push_back(r);
        return out;
    }
    std::vector<int> served_requests() const {
        std::vector<int> out;
        for (int r = 0; r < static_cast<int>(assignment.size()); ++r)
            if (assignment[r] >= 0) out.push_back(r);
        return out;
    }
    int served() const { return cost.served; }
};

inline void refresh_cost(Solution& sol) {
    Cost c;
    for (const auto& ev : sol.route_eval) {
        c.travel += ev.travel;
        c.lateness_total += ev.lateness;
        c.weighted += ev.weighted;
    }
    for (int a : sol.assignment) c.served += a >= 0 ? 1 : 0;
    sol.cost = c;
}

inline Solution empty_solution(const Instance& inst, const SolverParams& params) {
    Solution sol;
    sol.assignment.assign(inst.num_requests(), -1);
    for (int k = 0; k < inst.num_vehicles(); ++k) {
        sol.routes.push_back(empty_route(inst, k));
        auto ev = evaluate_route(inst, params, sol.routes.back());
        if (!ev) {
            // An idle vehicle cannot reach its destination in time; keep the
            // route and let the feasibility report flag it.
            RouteEval raw;
            raw.travel = detail::route_travel(inst, sol.routes.back().stops, params.arc_cost);
            raw.weighted = params.w1 * raw.travel;
            ev = raw;
        }
        sol.route_eval.push_back(*ev);
    }
    refresh_cost(sol);
    return sol;
}

// Replaces the stops of route k when the new sequence is feasible.
inline bool set_route(const Instance& inst, const SolverParams& params, Solution& sol, int k, std::vector<int> stops) {
    auto ev = evaluate_route(inst, params, k, stops);
    if (!ev) return false;
    for (int v : sol.routes[k].stops)
        if (inst.is_pickup(v)) sol.assignment[inst.request_of_vertex(v)] = -1;
    for (int v : stops)
        if (inst.is_pickup(v)) sol.assignment[inst.request_of_vertex(v)] = k;
    sol.routes[k].stops = std::move(stops);
    sol.route_eval[k] = *ev;
    refresh_cost(sol);
    return true;
}

inline std::vector<int> without_request(const Instance& inst, const std::vector<int>& stops, int request) {
    std::vector<int> out;
    out.reserve(stops.size());
    const int p = inst.requests[request].pickup;
    const int d = inst.requests[request].delivery;
    for (int v : stops)
        if (v != p && v != d) out.push_back(v);
    return out;
}

// Removes a served request. Fails (leaving the solution untouched) when the
// shortened route cannot be scheduled.
inline bool remove_request(const Instance& inst, const SolverParams& params, Solution& sol, int request) {
    const int k = sol.assignment.at(request);
    if (k < 0) return false;
    return set_route(inst, params, sol, k, without_request(inst, sol.routes[k].stops, request));
}

// Builds a solution from explicit routes; throws InfeasibleError on the first
// infeasible route.
inline Solution make_solution(const Instance& inst, const SolverParams& params, std::vector<Route> routes) {
    if (static_cast<int>(routes.size()) != inst.num_vehicles())
        throw std::invalid_argument("expected one route per vehicle");
    Solution sol;
    sol.assignment.assign(inst.num_requests(), -1);
    for (int k = 0; k < inst.num_vehicles(); ++k) {
        if (routes[k].vehicle != k) throw std::invalid_argument("routes must be ordered by vehicle id");
        auto res = schedule_route(inst, routes[k]);
        if (auto* why = std::get_if<Infeasible>(&res)) throw InfeasibleError(*why);
        RouteEval ev;
        ev.travel = detail::route_travel(inst, routes[k].stops, params.arc_cost);
        ev.lateness = std::get<Schedule>(res).lateness;
        ev.weighted = params.w1 * ev.travel + params.w2 * ev.lateness;
        for (int v : routes[k].stops) {
            if (!inst.is_pickup(v)) continue;
            const int r = inst.request_of_vertex(v);
            if (sol.assignment[r] >= 0) {
                throw InfeasibleError({Constraint::Coverage, k, -1, r, "request served by more than one route"});
            }
            sol.assignment[r] = k;
        }
        sol.route_eval.push_back(ev);
    }
    sol.routes = std::move(routes);
    refresh_cost(sol);
    return sol;
}

// Objective recomputed from scratch.
inline Cost solution_cost(const Instance& inst, const SolverParams& params, const Solution& sol) {
    Cost c;
    for (const auto& route : sol.routes) {
        auto res = schedule_route(inst, route);
        if (auto* why = std::get_if<Infeasible>(&res)) throw InfeasibleError(*why);
        c.travel += detail::route_travel(inst, route.stops, params.arc_cost);
        c.lateness_total += std::get<Schedule>(res).lateness;
        c.served += route.num_requests();
    }
    c.weighted = params.w1 * c.travel + params.w2 * c.lateness_total;
    return c;
}

inline int served_deficit(const Instance& inst, const Solution& sol) {
    return std::max(0, inst.min_served() - sol.cost.served);
}

inline bool meets_served_bound(const Instance& inst, const Solution& sol) { return served_deficit(inst, sol) == 0; }

// Weighted cost plus a dominating penalty per request missing from the
// served-fraction bound, so that solutions meeting the bound always compare
// better than ones that do not.
inline constexpr double kDeficitPenalty = 1e7;

inline double objective(const Instance& inst, const Solution& sol) {
    return sol.cost.weighted + kDeficitPenalty * served_deficit(inst, sol);
}

struct FeasibilityReport {
    std::vector<Infeasible> violations;
    bool feasible() const { return violations.empty(); }
    // True when nothing but the served-fraction bound is violated.
    bool hard_feasible() const {
        return std::all_of(violations.begin(), violations.end(),
                           [](const auto& v) { return v.family == Constraint::EpsilonServed; });
    }
};

inline FeasibilityReport check_feasibility(const Instance& inst, const Solution& sol) {
    FeasibilityReport rep;
    auto& out = rep.violations;
    const int m = inst.num_vehicles();
    const int n = inst.num_requests();
    if (static_cast<int>(sol.routes.size()) != m) {
        out.push_back({Constraint::Structure, -1, -1, -1, "expected one route per vehicle"});
        return rep;
    }
    std::vector<int> seen(n, -1);
    for (int k = 0; k < m; ++k) {
        const auto& route = sol.routes[k];
        if (route.vehicle != k) {
            out.push_back({Constraint::Structure, k, -1, -1, "route vehicle id does not match its position"});
            continue;
        }
        auto issues = structural_issues(inst, route);
        if (!issues.empty()) {
            out.insert(out.end(), issues.begin(), issues.end());
            continue;
        }
        for (int v : route.stops) {
            if (!inst.is_pickup(v)) continue;
            const int r = inst.request_of_vertex(v);
            if (seen[r] >= 0) out.push_back({Constraint::Coverage, k, -1, r, "request served more than once"});
            seen[r] = k;
        }
        Schedule sched;
        detail::analyze_route(inst, k, route.stops, sched, nullptr, &out);
    }
    int served = 0;
    for (int r = 0; r < n; ++r) {
        if (seen[r] >= 0) ++served;
        const int assigned = r < static_cast<int>(sol.assignment.size()) ? sol.assignment[r] : -2;
        if (assigned != seen[r]) {
            out.push_back({Constraint::Coverage, seen[r], -1, r, "assignment does not match the routes"});
        }
    }
    if (served < inst.min_served()) {
        std::ostringstream os;
        os << "served " << served << " < required " << inst.min_served();
        out.push_back({Constraint::EpsilonServed, -1, -1, -1, os.str()});
    }
    return rep;
}

struct Insertion {
    int vehicle = -1;
    int pickup_pos = -1;    // index of the pickup in the resulting route
    int delivery_pos = -1;  // index of the delivery in the resulting route
    double delta = 0.0;     // weighted cost increase of the route
    RouteEval eval;
};

inline std::vector<int> with_insertion(const Instance& inst, const std::vector<int>& stops, int request, int pickup_pos,
                                       int delivery_pos) {
    std::vector<int> out;
    out.reserve(stops.size() + 2);
    std::size_t src = 0;
    for (int i = 0; i < static_cast<int>(stops.size()) + 2; ++i) {
        if (i == pickup_pos) {
            out.push_back(inst.requests[request].pickup);
        } else if (i == delivery_pos) {
            out.push_back(inst.requests[request].delivery);
        } else {
            out.push_back(stops[src++]);
        }
    }
    return out;
}

// Visits every feasible (pickup, delivery) position pair of `request` in the
// route, in ascending pickup then delivery position. `visit` receives the
// insertion and returns false to stop early.
template <typename Visit>
void for_each_feasible_insertion(const Instance& inst, const SolverParams& params, const Route& route,
                                 double old_weighted, int request, Visit&& visit) {
    const auto& stops = route.stops;
    const int len = static_cast<int>(stops.size());
    const auto& veh = inst.vehicles[route.vehicle];
    const int pv = inst.requests[request].pickup;
    const int dv = inst.requests[request].delivery;
    const auto& pvert = inst.vertices[pv];
    const int demand = inst.requests[request].demand;

    // Earliest-start prefix and loads of the unmodified route for pruning.
    static thread_local std::vector<double> prefix;
    detail::forward_pass(inst, stops, inst.vertices[stops.front()].earliest, prefix, nullptr);
    static thread_local std::vector<int> load;
    load.resize(len);
    int cur = 0;
    for (int i = 0; i < len; ++i) {
        cur += inst.vertices[stops[i]].load_delta;
        load[i] = cur;
    }

    static thread_local std::vector<int> buf;
    for (int p = 1; p < len; ++p) {
        const int before = stops[p - 1];
        const double arr = prefix[p - 1] + inst.vertices[before].service + inst.tt(before, pv);
        if (arr > pvert.latest + kEps) break;  // later positions only arrive later
        if (load[p - 1] + demand > veh.capacity) continue;
        for (int d = p + 1; d <= len; ++d) {
            // Loads between pickup and delivery grow by the demand.
            if (d - 1 > p && load[d - 2] + demand > veh.capacity) break;
            buf.clear();
            buf.insert(buf.end(), stops.begin(), stops.begin() + p);
            buf.push_back(pv);
            buf.insert(buf.end(), stops.begin() + p, stops.begin() + (d - 1));
            buf.push_back(dv);
            buf.insert(buf.end(), stops.begin() + (d - 1), stops.end());
            auto ev = evaluate_route(inst, params, route.vehicle, buf);
            if (!ev) continue;
            if (!visit(Insertion{route.vehicle, p, d, ev->weighted - old_weighted, *ev})) return;
        }
    }
}

// Cheapest feasible insertion; ties keep the lowest pickup then delivery
// position.
inline std::optional<Insertion> try_insert(const Instance& inst, const SolverParams& params, const Route& route,
                                           double old_weighted, int request) {
    std::optional<Insertion> best;
    for_each_feasible_insertion(inst, params, route, old_weighted, request, [&](const Insertion& ins) {
        if (!best || ins.delta < best->delta - kEps) best = ins;
        return true;
    });
    return best;
}

inline std::optional<Insertion> try_insert(const Instance& inst, const SolverParams& params, const Route& route,
                                           int request) {
    for (int v : route.stops)
        if (v == inst.requests.at(request).pickup) return std::nullopt;
    auto old = evaluate_route(inst, params, route);
    if (!old) return std::nullopt;
    return try_insert(inst, params, route, old->weighted, request);
}

inline void apply_insertion(const Instance& inst, Solution& sol, int request, const Insertion& ins) {
    auto& route = sol.routes[ins.vehicle];
    route.stops = with_insertion(inst, route.stops, request, ins.pickup_pos, ins.delivery_pos);
    sol.route_eval[ins.vehicle] = ins.eval;
    sol.assignment[request] = ins.vehicle;
    refresh_cost(sol);
}

// Best insertion of `request` over all routes; ties go to the lower vehicle id.
inline std::optional<Insertion> best_insertion(const Instance& inst, const SolverParams& params, const Solution& sol,
                                               int request) {
    std::optional<Insertion> best;
    for (int k = 0; k < inst.num_vehicles(); ++k) {
        auto ins = try_insert(inst, params, sol.routes[k], sol.route_eval[k].weighted, request);
        if (ins && (!best || ins->delta < best->delta - kEps)) best = ins;
    }
    return best;
}

// Request->route signature used to tell solutions apart.
inline const std::vector<int>& signature(const Solution& sol) { return sol.assignment; }

}  // namespace darpdp
