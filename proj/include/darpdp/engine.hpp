#pragma once

// The iterated local search driver: construction, learning local search,
// path relinking, annealing-style acceptance, periodic perturbation.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "darpdp/construct.hpp"
#include "darpdp/lns.hpp"
#include "darpdp/model.hpp"
#include "darpdp/neighborhoods.hpp"
#include "darpdp/random.hpp"
#include "darpdp/relink.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

enum class Acceptance { AcceptNew, KeepCurrent };

// Improvements are always taken; a deterioration d is taken with
// probability exp(-d / T).
inline Acceptance sa_accept(double f_cur, double f_new, double temperature, Rng& rng) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    if (f_new < f_cur) return Acceptance::AcceptNew;
    const double r = uniform01(rng);
    return r < std::exp(-(f_new - f_cur) / temperature) ? Acceptance::AcceptNew : Acceptance::KeepCurrent;
}

struct TemperatureBounds {
    double t_min = 0.0;
    double t_max = 0.0;
};

inline TemperatureBounds temperature_bounds(const Instance& inst, const SolverParams& params) {
    TemperatureBounds b;
    b.t_max = params.t_max > 0.0 ? params.t_max : inst.num_requests() / 2.0;
    b.t_min = params.t_min > 0.0 ? params.t_min : inst.num_vehicles() / 2.0;
    if (b.t_max <= 0.0) b.t_max = 0.5;
    if (b.t_min >= b.t_max) b.t_min = b.t_max / 2.0;
    return b;
}

struct TraceRow {
    long iteration = 0;
    double current = 0.0;
    double best = 0.0;
    double temperature = 0.0;
    std::array<double, 5> probabilities{};
};

struct RunStats {
    std::string instance;
    std::uint64_t seed = 0;
    long iterations = 0;
    long improvements = 0;
    long sa_accepts = 0;
    long perturbations = 0;
    double initial_cost = 0.0;
    double best_cost = 0.0;
    int best_served = 0;
    bool best_feasible = false;
    double cpu_seconds = 0.0;
    double t_construct = 0.0;
    double t_local_search = 0.0;
    double t_relink = 0.0;
    double t_perturb = 0.0;
    std::vector<std::array<double, 5>> score_history;  // operator scores after each local search
    std::vector<double> best_trace;  // penalised objective of the incumbent after each iteration
    std::vector<TraceRow> trace;
};

struct EilsResult {
    Solution best;
    RunStats stats;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline EilsResult run_eils(const Instance& inst, const SolverParams& params,
                           const std::function<void(const TraceRow&)>& on_iteration = {},
                           const std::function<void(const MoveTrace&)>& on_move = {}) {
    if (auto errs = validate_params(params); !errs.empty()) throw std::invalid_argument("invalid params: " + errs.front());
    if (inst.num_vehicles() == 0) throw std::invalid_argument("instance has no vehicles");
    if (params.max_iterations == 0 && !(params.cpu_max > 0.0)) {
        throw std::invalid_argument("either cpu_max or max_iterations must be positive");
    }
    if (!inst.finalized()) throw std::invalid_argument("instance not finalized");

    const detail::Stopwatch clock;
    Rng rng_ls = derive_rng(params.rng_seed, 1);
    Rng rng_pr = derive_rng(params.rng_seed, 2);
    Rng rng_pt = derive_rng(params.rng_seed, 3);
    Rng rng_sa = derive_rng(params.rng_seed, 4);

    EilsResult res;
    auto& st = res.stats;
    st.instance = inst.name;
    st.seed = params.rng_seed;

    Solution current = build_initial(inst, params);
    st.t_construct = clock.seconds();
    st.initial_cost = current.cost.weighted;
    Solution best = current;
    EliteSet elite = update_elite(inst, {}, current, params.size_e);
    const auto bounds = temperature_bounds(inst, params);
    double temperature = bounds.t_max;
    long no_improve = 0;

    auto keep_going = [&] {
        if (inst.num_requests() == 0) return false;
        if (params.max_iterations > 0) return st.iterations < params.max_iterations;
        return clock.seconds() < params.cpu_max;
    };

    while (keep_going()) {
        ++st.iterations;

        double t0 = clock.seconds();
        auto ls = learning_local_search(inst, params, current, objective(inst, best), rng_ls, on_move);
        double t1 = clock.seconds();
        st.t_local_search += t1 - t0;
        st.score_history.push_back(ls.scores.scores);

        const auto& guide =
            elite.solutions[uniform_int(rng_pr, 0, static_cast<int>(elite.solutions.size()) - 1)];
        Solution relinked = path_relink(inst, params, ls.solution, guide);
        double t2 = clock.seconds();
        st.t_relink += t2 - t1;

        const double f_new = objective(inst, relinked);
        const double f_cur = objective(inst, current);
        if (f_new < f_cur - kEps) {
            current = std::move(relinked);
            ++st.improvements;
            if (f_new < objective(inst, best) - kEps) best = current;
        } else {
            ++no_improve;
            if (sa_accept(f_cur, f_new, temperature, rng_sa) == Acceptance::AcceptNew) {
                current = std::move(relinked);
                ++st.sa_accepts;
            }
        }

        elite = update_elite(inst, std::move(elite), current, params.size_e);

        const bool fire = params.strict_perturb_parity ? (no_improve % 2 == 1) : (no_improve > 0 && no_improve % 2 == 0);
        if (fire) {
            const double tp = clock.seconds();
            current = perturb(inst, params, current, rng_pt);
            if (!meets_served_bound(inst, current)) {
                auto pool = current.rejected();
                current = repair(inst, params, std::move(current), InsertionKind::Best, std::move(pool), rng_pt);
            }
            if (objective(inst, current) < objective(inst, best) - kEps) best = current;
            ++st.perturbations;
            st.t_perturb += clock.seconds() - tp;
        }

        temperature *= params.alpha_t;
        if (temperature <= bounds.t_min) temperature = bounds.t_max;

        st.best_trace.push_back(objective(inst, best));
        TraceRow row{st.iterations, current.cost.weighted, best.cost.weighted, temperature, ls.scores.probabilities};
        if (on_iteration) on_iteration(row);
        st.trace.push_back(row);
    }

    st.cpu_seconds = clock.seconds();
    st.best_cost = best.cost.weighted;
    st.best_served = best.served();
    st.best_feasible = check_feasibility(inst, best).feasible();
    res.best = std::move(best);
    return res;
}

}  // namespace darpdp
