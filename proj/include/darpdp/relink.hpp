#pragma once

// Elite archive and back-and-forward path relinking over request-to-route
// assignments.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "darpdp/model.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

enum class DeltaAction { InsertIntoGuidingRoute, Remove, Reassign };

struct DeltaMove {
    int request = -1;
    DeltaAction action = DeltaAction::Remove;
    int target_route = -1;  // -1 for Remove

    bool operator==(const DeltaMove&) const = default;
};

// One move per request whose service status or route differs.
inline std::vector<DeltaMove> compute_delta(const Solution& initial, const Solution& guiding) {
    std::vector<DeltaMove> out;
    const auto n = std::min(initial.assignment.size(), guiding.assignment.size());
    for (std::size_t r = 0; r < n; ++r) {
        const int a = initial.assignment[r];
        const int b = guiding.assignment[r];
        if (a == b) continue;
        const int req = static_cast<int>(r);
        if (a < 0) {
            out.push_back({req, DeltaAction::InsertIntoGuidingRoute, b});
        } else if (b < 0) {
            out.push_back({req, DeltaAction::Remove, -1});
        } else {
            out.push_back({req, DeltaAction::Reassign, b});
        }
    }
    return out;
}

inline std::optional<Solution> apply_delta_move(const Instance& inst, const SolverParams& params, const Solution& sol,
                                                const DeltaMove& move) {
    Solution out = sol;
    const int cur = out.assignment.at(move.request);
    if (move.action == DeltaAction::Remove || move.action == DeltaAction::Reassign) {
        if (cur < 0 || !remove_request(inst, params, out, move.request)) return std::nullopt;
    }
    if (move.action == DeltaAction::InsertIntoGuidingRoute || move.action == DeltaAction::Reassign) {
        if (move.target_route < 0 || move.target_route >= inst.num_vehicles()) return std::nullopt;
        if (out.assignment[move.request] >= 0) return std::nullopt;
        const int k = move.target_route;
        auto ins = try_insert(inst, params, out.routes[k], out.route_eval[k].weighted, move.request);
        if (!ins) return std::nullopt;
        apply_insertion(inst, out, move.request, *ins);
    }
    return out;
}

// Walks alternately from each endpoint towards the other, each step taking
// the difference move with the lowest resulting objective. Moves that cannot
// be placed feasibly are dropped for that walker. Returns the best endpoint
// or intermediate meeting the served-fraction bound (the better endpoint if
// none does).
inline Solution path_relink(const Instance& inst, const SolverParams& params, const Solution& initial,
                            const Solution& guiding) {
    Solution best = objective(inst, guiding) < objective(inst, initial) - kEps ? guiding : initial;
    double best_f = objective(inst, best);

    Solution walker = initial;
    Solution target = guiding;
    std::vector<DeltaMove> blocked_walker;
    std::vector<DeltaMove> blocked_target;
    while (true) {
        auto delta = compute_delta(walker, target);
        std::erase_if(delta, [&](const DeltaMove& mv) {
            return std::find(blocked_walker.begin(), blocked_walker.end(), mv) != blocked_walker.end();
        });
        if (delta.size() <= 1) break;
        std::optional<Solution> step;
        double step_f = 0.0;
        for (const auto& mv : delta) {
            auto cand = apply_delta_move(inst, params, walker, mv);
            if (!cand) {
                blocked_walker.push_back(mv);
                continue;
            }
            const double f = objective(inst, *cand);
            if (!step || f < step_f - kEps) {
                step = std::move(cand);
                step_f = f;
            }
        }
        if (!step) break;
        walker = std::move(*step);
        if (meets_served_bound(inst, walker) && step_f < best_f - kEps) {
            best = walker;
            best_f = step_f;
        }
        std::swap(walker, target);
        std::swap(blocked_walker, blocked_target);
    }
    return best;
}

struct EliteSet {
    std::vector<Solution> solutions;  // ascending objective

    bool contains_signature(const Solution& s) const {
        return std::any_of(solutions.begin(), solutions.end(),
                           [&](const Solution& e) { return signature(e) == signature(s); });
    }
};

inline EliteSet update_elite(const Instance& inst, EliteSet elite, const Solution& sol, int size_e) {
    if (size_e < 1) return elite;
    const double f = objective(inst, sol);
    auto& v = elite.solutions;
    // A cheaper routing of an archived assignment replaces it in place.
    auto same = std::find_if(v.begin(), v.end(), [&](const Solution& e) { return signature(e) == signature(sol); });
    if (same != v.end()) {
        if (!(f < objective(inst, *same) - kEps)) return elite;
        v.erase(same);
    }
    if (static_cast<int>(v.size()) >= size_e && !(f < objective(inst, v.back()) - kEps)) return elite;
    // Distinct cost keeps the ordering strictly increasing.
    for (const auto& e : v)
        if (std::abs(objective(inst, e) - f) <= kEps) return elite;
    auto pos = std::find_if(v.begin(), v.end(), [&](const Solution& e) { return f < objective(inst, e); });
    v.insert(pos, sol);
    while (static_cast<int>(v.size()) > size_e) v.pop_back();
    return elite;
}

}  // namespace darpdp
