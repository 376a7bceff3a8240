#pragma once

// Move operators and the score-driven learning local search.

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "darpdp/model.hpp"
#include "darpdp/random.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

enum class MoveKind { Relocate, Exchange, ExchangeNatural, R4Opt, Shift };

inline constexpr std::array<MoveKind, 5> kAllMoves{MoveKind::Relocate, MoveKind::Exchange, MoveKind::ExchangeNatural,
                                                   MoveKind::R4Opt, MoveKind::Shift};

inline std::string_view to_string(MoveKind k) {
    switch (k) {
        case MoveKind::Relocate: return "relocate";
        case MoveKind::Exchange: return "exchange";
        case MoveKind::ExchangeNatural: return "exchange-natural";
        case MoveKind::R4Opt: return "r4opt";
        case MoveKind::Shift: return "shift";
    }
    return "unknown";
}

struct OperatorScores {
    std::array<double, 5> scores{1.0, 1.0, 1.0, 1.0, 1.0};
    std::array<double, 5> probabilities{0.2, 0.2, 0.2, 0.2, 0.2};

    double score(MoveKind k) const { return scores[static_cast<std::size_t>(k)]; }
    double probability(MoveKind k) const { return probabilities[static_cast<std::size_t>(k)]; }
};

inline OperatorScores recompute_probabilities(OperatorScores s) {
    double total = 0.0;
    for (double v : s.scores) total += v;
    for (std::size_t i = 0; i < s.scores.size(); ++i) s.probabilities[i] = s.scores[i] / total;
    return s;
}

enum class Outcome { NewBest, Improving, Worse };

inline OperatorScores update_score(OperatorScores s, MoveKind kind, Outcome outcome, const SolverParams& params) {
    auto& sc = s.scores[static_cast<std::size_t>(kind)];
    switch (outcome) {
        case Outcome::NewBest: sc += params.alpha * params.beta1; break;
        case Outcome::Improving: sc += params.alpha * params.beta2; break;
        case Outcome::Worse: sc *= params.gamma; break;
    }
    return s;
}

inline bool precedence_ok(const Instance& inst, const std::vector<int>& stops) {
    const int n = inst.num_requests();
    for (std::size_t i = 0; i < stops.size(); ++i) {
        if (!inst.is_delivery(stops[i])) continue;
        const int p = stops[i] - n;
        bool found = false;
        for (std::size_t j = 0; j < i && !found; ++j) found = stops[j] == p;
        if (!found) return false;
    }
    return true;
}

namespace detail {

inline int candidate_budget(const Instance& inst, const SolverParams& params) {
    return std::max(1, params.size_n * inst.num_requests());
}

// Improving neighbour bookkeeping: a set of rewritten routes and their costs.
struct RouteChange {
    int vehicle;
    std::vector<int> stops;
    RouteEval eval;
};

inline Solution apply_changes(const Instance& inst, const Solution& sol, std::vector<RouteChange>& changes) {
    Solution out = sol;
    for (auto& ch : changes) {
        for (int v : out.routes[ch.vehicle].stops)
            if (inst.is_pickup(v)) out.assignment[inst.request_of_vertex(v)] = -1;
    }
    for (auto& ch : changes) {
        for (int v : ch.stops)
            if (inst.is_pickup(v)) out.assignment[inst.request_of_vertex(v)] = ch.vehicle;
        out.routes[ch.vehicle].stops = std::move(ch.stops);
        out.route_eval[ch.vehicle] = ch.eval;
    }
    refresh_cost(out);
    return out;
}

inline bool improves(double before, double after) { return after < before - kEps; }

inline std::optional<Solution> relocate(const Instance& inst, const SolverParams& params, const Solution& sol,
                                        Rng& rng) {
    const int m = inst.num_vehicles();
    std::vector<std::pair<int, int>> cands;  // (request, target vehicle)
    for (int r = 0; r < inst.num_requests(); ++r) {
        if (sol.assignment[r] < 0) continue;
        for (int k = 0; k < m; ++k)
            if (k != sol.assignment[r]) cands.emplace_back(r, k);
    }
    shuffle(cands, rng);
    int budget = candidate_budget(inst, params);
    for (const auto& [r, k] : cands) {
        if (budget-- <= 0) break;
        const int a = sol.assignment[r];
        auto src = without_request(inst, sol.routes[a].stops, r);
        auto src_ev = evaluate_route(inst, params, a, src);
        if (!src_ev) continue;
        auto ins = try_insert(inst, params, sol.routes[k], sol.route_eval[k].weighted, r);
        if (!ins) continue;
        const double before = sol.route_eval[a].weighted + sol.route_eval[k].weighted;
        const double after = src_ev->weighted + ins->eval.weighted;
        if (!improves(before, after)) continue;
        std::vector<RouteChange> ch{
            {a, std::move(src), *src_ev},
            {k, with_insertion(inst, sol.routes[k].stops, r, ins->pickup_pos, ins->delivery_pos), ins->eval}};
        return apply_changes(inst, sol, ch);
    }
    return std::nullopt;
}

inline std::optional<Solution> exchange(const Instance& inst, const SolverParams& params, const Solution& sol,
                                        Rng& rng) {
    std::vector<std::pair<int, int>> cands;
    const int n = inst.num_requests();
    for (int r1 = 0; r1 < n; ++r1) {
        if (sol.assignment[r1] < 0) continue;
        for (int r2 = r1 + 1; r2 < n; ++r2) {
            if (sol.assignment[r2] < 0 || sol.assignment[r2] == sol.assignment[r1]) continue;
            cands.emplace_back(r1, r2);
        }
    }
    shuffle(cands, rng);
    int budget = candidate_budget(inst, params);
    for (const auto& [r1, r2] : cands) {
        if (budget-- <= 0) break;
        const int a = sol.assignment[r1];
        const int b = sol.assignment[r2];
        Route ra{a, without_request(inst, sol.routes[a].stops, r1)};
        Route rb{b, without_request(inst, sol.routes[b].stops, r2)};
        auto ea = evaluate_route(inst, params, ra);
        auto eb = evaluate_route(inst, params, rb);
        if (!ea || !eb) continue;
        auto ia = try_insert(inst, params, ra, ea->weighted, r2);
        if (!ia) continue;
        auto ib = try_insert(inst, params, rb, eb->weighted, r1);
        if (!ib) continue;
        const double before = sol.route_eval[a].weighted + sol.route_eval[b].weighted;
        const double after = ia->eval.weighted + ib->eval.weighted;
        if (!improves(before, after)) continue;
        std::vector<RouteChange> ch{{a, with_insertion(inst, ra.stops, r2, ia->pickup_pos, ia->delivery_pos), ia->eval},
                                    {b, with_insertion(inst, rb.stops, r1, ib->pickup_pos, ib->delivery_pos), ib->eval}};
        return apply_changes(inst, sol, ch);
    }
    return std::nullopt;
}

}  // namespace detail

// Zero-load-to-zero-load blocks of a route as [first, last] stop positions.
inline std::vector<std::pair<int, int>> natural_sequences(const Instance& inst, const std::vector<int>& stops) {
    std::vector<std::pair<int, int>> out;
    int load = 0;
    int start = -1;
    for (int i = 1; i + 1 < static_cast<int>(stops.size()); ++i) {
        if (load == 0) start = i;
        load += inst.vertices[stops[i]].load_delta;
        if (load == 0 && start >= 0) {
            out.emplace_back(start, i);
            start = -1;
        }
    }
    return out;
}

namespace detail {

inline std::vector<int> splice(const std::vector<int>& host, std::pair<int, int> cut, const std::vector<int>& donor,
                               std::pair<int, int> piece) {
    std::vector<int> out(host.begin(), host.begin() + cut.first);
    out.insert(out.end(), donor.begin() + piece.first, donor.begin() + piece.second + 1);
    out.insert(out.end(), host.begin() + cut.second + 1, host.end());
    return out;
}

inline std::optional<Solution> exchange_natural(const Instance& inst, const SolverParams& params, const Solution& sol,
                                                Rng& rng) {
    const int m = inst.num_vehicles();
    std::vector<std::vector<std::pair<int, int>>> seqs(m);
    for (int k = 0; k < m; ++k) seqs[k] = natural_sequences(inst, sol.routes[k].stops);
    struct Cand {
        int a, sa, b, sb;
    };
    std::vector<Cand> cands;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int i = 0; i < static_cast<int>(seqs[a].size()); ++i)
                for (int j = 0; j < static_cast<int>(seqs[b].size()); ++j) cands.push_back({a, i, b, j});
    shuffle(cands, rng);
    int budget = candidate_budget(inst, params);
    for (const auto& c : cands) {
        if (budget-- <= 0) break;
        const auto& sa = sol.routes[c.a].stops;
        const auto& sb = sol.routes[c.b].stops;
        auto na = splice(sa, seqs[c.a][c.sa], sb, seqs[c.b][c.sb]);
        auto nb = splice(sb, seqs[c.b][c.sb], sa, seqs[c.a][c.sa]);
        auto ea = evaluate_route(inst, params, c.a, na);
        if (!ea) continue;
        auto eb = evaluate_route(inst, params, c.b, nb);
        if (!eb) continue;
        const double before = sol.route_eval[c.a].weighted + sol.route_eval[c.b].weighted;
        if (!improves(before, ea->weighted + eb->weighted)) continue;
        std::vector<RouteChange> ch{{c.a, std::move(na), *ea}, {c.b, std::move(nb), *eb}};
        return apply_changes(inst, sol, ch);
    }
    return std::nullopt;
}

inline constexpr std::array<std::array<int, 3>, 5> kInnerOrders{
    {{0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

inline std::optional<Solution> r4opt(const Instance& inst, const SolverParams& params, const Solution& sol,
                                     Rng& rng) {
    struct Cand {
        int k, start, order;
    };
    std::vector<Cand> cands;
    for (int k = 0; k < inst.num_vehicles(); ++k) {
        const int arcs = static_cast<int>(sol.routes[k].stops.size()) - 1;
        if (arcs < 5) continue;
        // Four consecutive arcs starting at `start` span stops start..start+4.
        for (int start = 0; start + 4 <= arcs; ++start)
            for (int o = 0; o < static_cast<int>(kInnerOrders.size()); ++o) cands.push_back({k, start, o});
    }
    shuffle(cands, rng);
    int budget = candidate_budget(inst, params);
    std::vector<int> buf;
    for (const auto& c : cands) {
        const auto& stops = sol.routes[c.k].stops;
        buf = stops;
        for (int i = 0; i < 3; ++i) buf[c.start + 1 + i] = stops[c.start + 1 + kInnerOrders[c.order][i]];
        if (!precedence_ok(inst, buf)) continue;
        if (budget-- <= 0) break;
        auto ev = evaluate_route(inst, params, c.k, buf);
        if (!ev || !improves(sol.route_eval[c.k].weighted, ev->weighted)) continue;
        std::vector<RouteChange> ch{{c.k, buf, *ev}};
        return apply_changes(inst, sol, ch);
    }
    return std::nullopt;
}

inline std::optional<Solution> shift(const Instance& inst, const SolverParams& params, const Solution& sol,
                                     Rng& rng) {
    std::vector<int> eligible;
    for (int k = 0; k < inst.num_vehicles(); ++k)
        if (sol.routes[k].num_requests() >= 2) eligible.push_back(k);
    if (eligible.empty()) return std::nullopt;
    const int k = eligible[uniform_int(rng, 0, static_cast<int>(eligible.size()) - 1)];
    const auto& stops = sol.routes[k].stops;
    const int len = static_cast<int>(stops.size());
    std::vector<std::pair<int, int>> cands;
    std::vector<int> buf = stops;
    for (int i = 1; i + 1 < len; ++i)
        for (int j = i + 1; j + 1 < len; ++j) {
            std::swap(buf[i], buf[j]);
            if (precedence_ok(inst, buf)) cands.emplace_back(i, j);
            std::swap(buf[i], buf[j]);
        }
    shuffle(cands, rng);
    int budget = candidate_budget(inst, params);
    for (const auto& [i, j] : cands) {
        if (budget-- <= 0) break;
        std::swap(buf[i], buf[j]);
        auto ev = evaluate_route(inst, params, k, buf);
        if (ev && improves(sol.route_eval[k].weighted, ev->weighted)) {
            std::vector<RouteChange> ch{{k, buf, *ev}};
            return apply_changes(inst, sol, ch);
        }
        std::swap(buf[i], buf[j]);
    }
    return std::nullopt;
}

}  // namespace detail

// First-improvement application of one operator. Returns the first strictly
// improving feasible neighbour found within size_n * n evaluations.
inline std::optional<Solution> apply_move(MoveKind kind, const Instance& inst, const SolverParams& params,
                                          const Solution& sol, Rng& rng) {
    switch (kind) {
        case MoveKind::Relocate: return detail::relocate(inst, params, sol, rng);
        case MoveKind::Exchange: return detail::exchange(inst, params, sol, rng);
        case MoveKind::ExchangeNatural: return detail::exchange_natural(inst, params, sol, rng);
        case MoveKind::R4Opt: return detail::r4opt(inst, params, sol, rng);
        case MoveKind::Shift: return detail::shift(inst, params, sol, rng);
    }
    return std::nullopt;
}

// Repeated first-improvement over all precedence-respecting swaps of route k,
// in position order, until no swap improves it.
inline void shift_exhaustive(const Instance& inst, const SolverParams& params, Solution& sol, int k) {
    auto buf = sol.routes[k].stops;
    const int len = static_cast<int>(buf.size());
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 1; i + 1 < len && !improved; ++i) {
            for (int j = i + 1; j + 1 < len && !improved; ++j) {
                std::swap(buf[i], buf[j]);
                if (precedence_ok(inst, buf)) {
                    auto ev = evaluate_route(inst, params, k, buf);
                    if (ev && detail::improves(sol.route_eval[k].weighted, ev->weighted)) {
                        sol.routes[k].stops = buf;
                        sol.route_eval[k] = *ev;
                        refresh_cost(sol);
                        improved = true;
                        continue;
                    }
                }
                std::swap(buf[i], buf[j]);
            }
        }
    }
}

struct MoveTrace {
    MoveKind kind;
    double delta;
    double new_cost;
};

struct LocalSearchResult {
    Solution solution;
    OperatorScores scores;
    int improvements = 0;
};

// Learning local search: operators are drawn from a candidate list built by
// comparing their selection probabilities against one uniform draw, and
// rewarded or penalised by the outcome of each application.
inline LocalSearchResult learning_local_search(const Instance& inst, const SolverParams& params, Solution sol,
                                               double best_objective, Rng& rng,
                                               const std::function<void(const MoveTrace&)>& trace = {}) {
    LocalSearchResult res;
    int no_improve = 0;
    double best = best_objective;
    while (no_improve < params.iter_max) {
        res.scores = recompute_probabilities(res.scores);
        const double u = uniform01(rng);
        std::vector<MoveKind> candidates;
        for (MoveKind k : kAllMoves)
            if (res.scores.probability(k) > u) candidates.push_back(k);
        if (candidates.empty()) {
            MoveKind top = MoveKind::Relocate;
            for (MoveKind k : kAllMoves)
                if (res.scores.probability(k) > res.scores.probability(top)) top = k;
            candidates.push_back(top);
        }
        const auto initial = candidates;
        while (!candidates.empty()) {
            const int pick = uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1);
            const MoveKind move = candidates[pick];
            auto next = apply_move(move, inst, params, sol, rng);
            const double cur = objective(inst, sol);
            if (next && objective(inst, *next) < cur - kEps) {
                const double val = objective(inst, *next);
                if (trace) trace({move, val - cur, val});
                sol = std::move(*next);
                candidates = initial;
                no_improve = 0;
                ++res.improvements;
                if (val < best - kEps) {
                    res.scores = update_score(res.scores, move, Outcome::NewBest, params);
                    best = val;
                } else {
                    res.scores = update_score(res.scores, move, Outcome::Improving, params);
                }
            } else {
                res.scores = update_score(res.scores, move, Outcome::Worse, params);
                candidates.erase(candidates.begin() + pick);
                ++no_improve;
            }
        }
    }
    res.scores = recompute_probabilities(res.scores);
    res.solution = std::move(sol);
    return res;
}

}  // namespace darpdp
