#pragma once

// Exact tooling for tiny instances: exhaustive enumeration and a MILP
// exporter in CPLEX LP format.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "darpdp/model.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

struct BruteForceLimits {
    int max_requests = 7;
    int max_vehicles = 2;
};

class OverCapError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExactResult {
    Cost optimum;
    Solution solution;
    long nodes_explored = 0;
    bool proven = false;
    bool feasible = false;
    std::string reason;  // set when no feasible solution exists
};

namespace detail {

// Cheapest feasible ordering of a fixed request subset on one vehicle, by
// depth-first enumeration in ascending vertex order with window, capacity,
// destination-tolerance and cost-bound pruning.
class SubsetRouter {
public:
    SubsetRouter(const Instance& inst, const SolverParams& params, int vehicle)
        : inst_(inst), params_(params), vehicle_(vehicle) {}

    struct Best {
        bool feasible = false;
        std::vector<int> stops;
        RouteEval eval;
    };

    const Best& solve(std::uint32_t mask, long& nodes) {
        auto it = memo_.find(mask);
        if (it != memo_.end()) return it->second;
        Best best;
        best_weighted_ = std::numeric_limits<double>::infinity();
        best_ = &best;
        const auto& veh = inst_.vehicles[vehicle_];
        seq_.assign(1, veh.origin);
        mask_ = mask;
        remaining_ = 2 * __builtin_popcount(mask);
        dfs(inst_.vertices[veh.origin].earliest, 0.0, 0, 0u, 0u, nodes);
        return memo_.emplace(mask, std::move(best)).first->second;
    }

private:
    void dfs(double time, double travel, int load, std::uint32_t picked, std::uint32_t dropped, long& nodes) {
        ++nodes;
        const auto& veh = inst_.vehicles[vehicle_];
        const int last = seq_.back();
        const auto& lv = inst_.vertices[last];
        const auto& dest = inst_.vertices[veh.destination];
        const double to_dest = inst_.tt(last, veh.destination);
        if (time + lv.service + to_dest > dest.latest + veh.dest_tolerance + kEps) return;
        if (params_.w1 * (travel + inst_.arc_cost(last, veh.destination, params_.arc_cost)) >= best_weighted_ - kEps)
            return;
        if (remaining_ == 0) {
            seq_.push_back(veh.destination);
            if (auto ev = evaluate_route(inst_, params_, vehicle_, seq_); ev && ev->weighted < best_weighted_ - kEps) {
                best_weighted_ = ev->weighted;
                best_->feasible = true;
                best_->stops = seq_;
                best_->eval = *ev;
            }
            seq_.pop_back();
            return;
        }
        const int n = inst_.num_requests();
        // Candidates in ascending vertex id: pickups first, then deliveries.
        for (int pass = 0; pass < 2; ++pass) {
            for (int r = 0; r < n; ++r) {
                const std::uint32_t bit = 1u << r;
                if (!(mask_ & bit)) continue;
                int v;
                if (pass == 0) {
                    if (picked & bit) continue;
                    v = inst_.requests[r].pickup;
                } else {
                    if (!(picked & bit) || (dropped & bit)) continue;
                    v = inst_.requests[r].delivery;
                }
                const auto& vv = inst_.vertices[v];
                const int nl = load + vv.load_delta;
                if (nl > veh.capacity) continue;
                const double t = std::max(vv.earliest, time + lv.service + inst_.tt(last, v));
                if (t > vv.latest + kEps) continue;
                seq_.push_back(v);
                --remaining_;
                dfs(t, travel + inst_.arc_cost(last, v, params_.arc_cost), nl, pass == 0 ? picked | bit : picked,
                    pass == 1 ? dropped | bit : dropped, nodes);
                ++remaining_;
                seq_.pop_back();
            }
        }
    }

    const Instance& inst_;
    const SolverParams& params_;
    int vehicle_;
    std::map<std::uint32_t, Best> memo_;
    std::vector<int> seq_;
    std::uint32_t mask_ = 0;
    int remaining_ = 0;
    double best_weighted_ = 0.0;
    Best* best_ = nullptr;
};

}  // namespace detail

// Global optimum over every served subset meeting the served-fraction bound,
// every assignment to vehicles and every precedence-feasible stop order.
inline ExactResult brute_force_solve(const Instance& inst, const SolverParams& params,
                                     const BruteForceLimits& limits = {}) {
    const int n = inst.num_requests();
    const int m = inst.num_vehicles();
    if (n > limits.max_requests || m > limits.max_vehicles || n > 20) {
        std::ostringstream os;
        os << "instance has " << n << " requests and " << m << " vehicles; exhaustive search is capped at "
           << limits.max_requests << " requests and " << limits.max_vehicles << " vehicles";
        throw OverCapError(os.str());
    }
    if (m == 0) throw std::invalid_argument("instance has no vehicles");

    std::vector<detail::SubsetRouter> routers;
    for (int k = 0; k < m; ++k) routers.emplace_back(inst, params, k);

    ExactResult res;
    const int need = inst.min_served();
    const std::uint32_t full = n == 0 ? 0u : ((1u << n) - 1u);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> choice(m), best_choice;

    // Vehicles take subsets of the still-unassigned requests in ascending
    // mask order; the first strictly cheapest combination wins.
    auto rec = [&](auto&& self, int k, std::uint32_t avail, double acc) -> void {
        if (k == m) {
            const int served = __builtin_popcount(full & ~avail);
            if (served < need) return;
            if (acc < best - kEps) {
                best = acc;
                best_choice = choice;
            }
            return;
        }
        // Enumerate submasks of avail in ascending numeric order.
        std::vector<std::uint32_t> subs;
        for (std::uint32_t s = avail;; s = (s - 1) & avail) {
            subs.push_back(s);
            if (s == 0) break;
        }
        std::reverse(subs.begin(), subs.end());
        for (std::uint32_t s : subs) {
            const int left_after = __builtin_popcount(avail & ~s);
            const int served_so_far = __builtin_popcount(full & ~avail) + __builtin_popcount(s);
            if (k == m - 1 && served_so_far < need) continue;
            (void)left_after;
            const auto& sub = routers[k].solve(s, res.nodes_explored);
            if (!sub.feasible) continue;
            if (acc + sub.eval.weighted >= best - kEps) continue;
            choice[k] = s;
            self(self, k + 1, avail & ~s, acc + sub.eval.weighted);
        }
    };
    rec(rec, 0, full, 0.0);

    res.proven = true;
    if (best_choice.empty()) {
        res.feasible = false;
        res.reason = "no assignment meeting the served-fraction bound admits feasible routes";
        return res;
    }
    std::vector<Route> routes;
    for (int k = 0; k < m; ++k) {
        const auto& sub = routers[k].solve(best_choice[k], res.nodes_explored);
        routes.push_back(Route{k, sub.stops});
    }
    res.solution = make_solution(inst, params, std::move(routes));
    res.optimum = res.solution.cost;
    res.feasible = true;
    return res;
}

struct MilpOptions {
    bool route_duration_row = true;
};

namespace detail {

inline std::string lp_num(double v) {
    if (std::abs(v) < 1e-12) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Accumulates "coef var" terms of one LP expression, wrapping long lines.
class LpExpr {
public:
    void add(double coef, const std::string& var) {
        std::string t;
        if (coef < 0) {
            t = "- ";
            coef = -coef;
        } else if (!terms_.empty()) {
            t = "+ ";
        }
        if (coef != 1.0) t += lp_num(coef) + " ";
        t += var;
        terms_.push_back(t);
    }
    bool empty() const { return terms_.empty(); }
    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i > 0) out += (i % 8 == 0) ? "\n   " : " ";
            out += terms_[i];
        }
        return out;
    }

private:
    std::vector<std::string> terms_;
};

inline std::string xv(int i, int j, int k) {
    return "x_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k);
}
inline std::string yv(int i, int k) { return "y_" + std::to_string(i) + "_" + std::to_string(k); }
inline std::string tv(int i, int k) { return "T_" + std::to_string(i) + "_" + std::to_string(k); }
inline std::string qv(int i, int k) { return "Q_" + std::to_string(i) + "_" + std::to_string(k); }
inline std::string lv(int k) { return "L_" + std::to_string(k); }

// Whether vehicle k may travel directly from i to j.
inline bool arc_allowed(const Instance& inst, int i, int j, int k) {
    const auto& veh = inst.vehicles[k];
    if (i == j) return false;
    if (inst.is_endpoint(i) && i != veh.origin) return false;
    if (inst.is_endpoint(j) && j != veh.destination) return false;
    if (i == veh.origin && inst.is_delivery(j)) return false;
    if (j == veh.destination && inst.is_pickup(i)) return false;
    return true;
}

}  // namespace detail

// Writes the mixed-integer model in CPLEX LP format. Variable naming (all
// indices are the instance's vertex and vehicle ids):
//   x_i_j_k  binary, vehicle k drives i -> j (every i, j in V: m|V|^2 in total,
//            arcs that are structurally impossible are fixed to 0 in Bounds)
//   y_i_k    binary, pickup vertex i is served by vehicle k
//   T_i_k    service start of vehicle k at vertex i
//   Q_i_k    load of vehicle k after vertex i
//   L_k      lateness of vehicle k at its destination, L_k >= T - l, L_k >= 0
inline std::string export_milp(const Instance& inst, const SolverParams& params, const MilpOptions& opts = {}) {
    using detail::lp_num;
    using detail::LpExpr;
    using detail::xv;
    using detail::yv;
    using detail::tv;
    using detail::qv;
    using detail::lv;
    const int m = inst.num_vehicles();
    const int n = inst.num_requests();
    const int nv = inst.num_vertices();
    std::ostringstream os;

    os << "\\ DARPDP model for instance " << (inst.name.empty() ? "(unnamed)" : inst.name) << "\n";
    os << "\\ vertices: origins 0.." << m - 1 << ", destinations " << m << ".." << 2 * m - 1 << ", pickups " << 2 * m
       << ".." << 2 * m + n - 1 << ", deliveries " << 2 * m + n << ".." << 2 * m + 2 * n - 1 << "\n";
    os << "\\ x_i_j_k: arc i->j used by vehicle k; y_i_k: pickup i served by k; T_i_k: service start;\n";
    os << "\\ Q_i_k: load after i; L_k: destination lateness of vehicle k\n";
    os << "\\ n=" << n << " m=" << m << " |V|=" << nv << " min_served=" << inst.min_served() << "\n";

    auto earliest = [&](int i) { return inst.vertices[i].earliest; };
    auto latest = [&](int i) {
        double l = inst.vertices[i].latest;
        if (i >= m && i < 2 * m) l += inst.vehicles[i - m].dest_tolerance;
        return l;
    };

    os << "Minimize\n obj: ";
    {
        LpExpr obj;
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < nv; ++i)
                for (int j = 0; j < nv; ++j)
                    if (detail::arc_allowed(inst, i, j, k))
                        obj.add(params.w1 * inst.arc_cost(i, j, params.arc_cost), xv(i, j, k));
        for (int k = 0; k < m; ++k) obj.add(params.w2, lv(k));
        os << obj.str() << "\n";
    }

    os << "Subject To\n";
    // Served-fraction bound.
    {
        LpExpr e;
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < m; ++k) e.add(1.0, yv(inst.requests[r].pickup, k));
        if (!e.empty()) os << " served: " << e.str() << " >= " << inst.min_served() << "\n";
    }
    for (int r = 0; r < n; ++r) {
        const int p = inst.requests[r].pickup;
        LpExpr e;
        for (int k = 0; k < m; ++k) e.add(1.0, yv(p, k));
        os << " once_" << p << ": " << e.str() << " <= 1\n";
    }
    for (int k = 0; k < m; ++k) {
        const auto& veh = inst.vehicles[k];
        for (int r = 0; r < n; ++r) {
            const int p = inst.requests[r].pickup;
            const int d = inst.requests[r].delivery;
            LpExpr link;
            for (int j = 0; j < nv; ++j)
                if (detail::arc_allowed(inst, p, j, k)) link.add(1.0, xv(p, j, k));
            link.add(-1.0, yv(p, k));
            os << " link_" << p << "_" << k << ": " << link.str() << " = 0\n";
            LpExpr pair;
            for (int j = 0; j < nv; ++j) {
                if (detail::arc_allowed(inst, j, p, k)) pair.add(1.0, xv(j, p, k));
                if (detail::arc_allowed(inst, j, d, k)) pair.add(-1.0, xv(j, d, k));
            }
            os << " pair_" << p << "_" << k << ": " << pair.str() << " = 0\n";
        }
        LpExpr start;
        for (int j = 0; j < nv; ++j)
            if (detail::arc_allowed(inst, veh.origin, j, k)) start.add(1.0, xv(veh.origin, j, k));
        os << " start_" << k << ": " << start.str() << " = 1\n";
        for (int i = 2 * m; i < nv; ++i) {
            LpExpr flow;
            for (int j = 0; j < nv; ++j) {
                if (detail::arc_allowed(inst, j, i, k)) flow.add(1.0, xv(j, i, k));
                if (detail::arc_allowed(inst, i, j, k)) flow.add(-1.0, xv(i, j, k));
            }
            os << " flow_" << i << "_" << k << ": " << flow.str() << " = 0\n";
        }
        LpExpr end;
        for (int i = 0; i < nv; ++i)
            if (detail::arc_allowed(inst, i, veh.destination, k)) end.add(1.0, xv(i, veh.destination, k));
        os << " end_" << k << ": " << end.str() << " = 1\n";

        // Time consistency with per-arc big-M.
        for (int i = 0; i < nv; ++i) {
            for (int j = 0; j < nv; ++j) {
                if (!detail::arc_allowed(inst, i, j, k)) continue;
                const double s = inst.vertices[i].service;
                const double t = inst.tt(i, j);
                const double big = std::max(0.0, latest(i) + s + t - earliest(j));
                LpExpr e;
                e.add(1.0, tv(i, k));
                e.add(-1.0, tv(j, k));
                e.add(big, xv(i, j, k));
                os << " time_" << i << "_" << j << "_" << k << ": " << e.str() << " <= " << lp_num(big - s - t) << "\n";
            }
        }
        // Ride time, enforced only when the request rides with k.
        for (int r = 0; r < n; ++r) {
            const int p = inst.requests[r].pickup;
            const int d = inst.requests[r].delivery;
            const double s = inst.vertices[p].service;
            const double direct = inst.tt(p, d);
            const double m_lo = std::max(0.0, s + direct + latest(p) - earliest(d));
            LpExpr lo;
            lo.add(1.0, tv(d, k));
            lo.add(-1.0, tv(p, k));
            lo.add(-m_lo, yv(p, k));
            os << " ridemin_" << p << "_" << k << ": " << lo.str() << " >= " << lp_num(s + direct - m_lo) << "\n";
            const double m_hi = std::max(0.0, latest(d) - earliest(p) - s - inst.max_ride_time);
            LpExpr hi;
            hi.add(1.0, tv(d, k));
            hi.add(-1.0, tv(p, k));
            hi.add(m_hi, yv(p, k));
            os << " ridemax_" << p << "_" << k << ": " << hi.str() << " <= " << lp_num(inst.max_ride_time + s + m_hi)
               << "\n";
        }
        // Load propagation with M = Q_k.
        for (int i = 0; i < nv; ++i) {
            for (int j = 0; j < nv; ++j) {
                if (!detail::arc_allowed(inst, i, j, k)) continue;
                LpExpr e;
                e.add(1.0, qv(i, k));
                e.add(-1.0, qv(j, k));
                e.add(veh.capacity, xv(i, j, k));
                os << " load_" << i << "_" << j << "_" << k << ": " << e.str() << " <= "
                   << lp_num(veh.capacity - inst.vertices[j].load_delta) << "\n";
            }
        }
        LpExpr late;
        late.add(1.0, lv(k));
        late.add(-1.0, tv(veh.destination, k));
        os << " late_" << k << ": " << late.str() << " >= " << lp_num(-inst.vertices[veh.destination].latest) << "\n";
        if (opts.route_duration_row) {
            LpExpr dur;
            dur.add(1.0, tv(veh.destination, k));
            dur.add(-1.0, tv(veh.origin, k));
            os << " duration_" << k << ": " << dur.str() << " <= " << lp_num(inst.max_route_duration) << "\n";
        }
    }

    os << "Bounds\n";
    for (int k = 0; k < m; ++k) {
        const auto& veh = inst.vehicles[k];
        for (int i = 0; i < nv; ++i)
            os << " " << lp_num(earliest(i)) << " <= " << tv(i, k) << " <= " << lp_num(latest(i)) << "\n";
        for (int i = 0; i < nv; ++i) {
            const int q = inst.vertices[i].load_delta;
            if (i == veh.origin || i == veh.destination) {
                os << " " << qv(i, k) << " = 0\n";
            } else {
                os << " " << std::max(0, q) << " <= " << qv(i, k) << " <= " << std::min(veh.capacity, veh.capacity + q)
                   << "\n";
            }
        }
        os << " " << lv(k) << " >= 0\n";
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j)
                if (!detail::arc_allowed(inst, i, j, k)) os << " " << xv(i, j, k) << " = 0\n";
    }

    os << "Binaries\n";
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) os << " " << xv(i, j, k) << "\n";
    for (int k = 0; k < m; ++k)
        for (int r = 0; r < n; ++r) os << " " << yv(inst.requests[r].pickup, k) << "\n";
    os << "End\n";
    return os.str();
}

}  // namespace darpdp
