#pragma once

// Problem data for the dial-a-ride problem with driver preferences.
//
// Vertex layout for an instance with m vehicles and n requests:
//   [0, m)          vehicle origins       (origin of vehicle k is k)
//   [m, 2m)         vehicle destinations  (destination of vehicle k is m + k)
//   [2m, 2m + n)    pickups               (pickup of request r is 2m + r)
//   [2m + n, 2m+2n) deliveries            (delivery of request r is pickup + n)

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace darpdp {

struct Vertex {
    int id = 0;
    double x = 0.0;         // miles
    double y = 0.0;         // miles
    double earliest = 0.0;  // minutes
    double latest = 0.0;    // minutes
    double service = 0.0;   // minutes
    int load_delta = 0;     // passengers
};

struct Request {
    int id = 0;
    int pickup = 0;
    int delivery = 0;
    int demand = 1;
};

struct Vehicle {
    int id = 0;
    int origin = 0;
    int destination = 0;
    int capacity = 3;
    double dest_tolerance = 5.0;  // minutes allowed past the destination latest time
};

// How arc costs c_ij enter the objective.
enum class ArcCost { Minutes, Miles };

class Instance {
public:
    std::string name;
    std::vector<Vertex> vertices;
    std::vector<Request> requests;
    std::vector<Vehicle> vehicles;
    double max_route_duration = 90.0;  // T_r
    double max_ride_time = 30.0;       // T_M
    double time_factor = 2.0;          // minutes per mile
    double served_fraction_min = 0.8;

    int num_requests() const { return static_cast<int>(requests.size()); }
    int num_vehicles() const { return static_cast<int>(vehicles.size()); }
    int num_vertices() const { return static_cast<int>(vertices.size()); }

    // Builds the travel-time and distance matrices. Must be called after the
    // vertex list is final and before any solver routine touches the instance.
    void finalize() {
        const auto nv = vertices.size();
        miles_.assign(nv * nv, 0.0);
        minutes_.assign(nv * nv, 0.0);
        for (std::size_t i = 0; i < nv; ++i) {
            for (std::size_t j = i + 1; j < nv; ++j) {
                const double d = std::hypot(vertices[i].x - vertices[j].x, vertices[i].y - vertices[j].y);
                miles_[i * nv + j] = miles_[j * nv + i] = d;
                minutes_[i * nv + j] = minutes_[j * nv + i] = d * time_factor;
            }
        }
    }

    bool finalized() const { return miles_.size() == vertices.size() * vertices.size(); }

    // Unchecked accessors for hot loops.
    double tt(int i, int j) const { return minutes_[static_cast<std::size_t>(i) * vertices.size() + j]; }
    double miles(int i, int j) const { return miles_[static_cast<std::size_t>(i) * vertices.size() + j]; }
    double arc_cost(int i, int j, ArcCost mode) const { return mode == ArcCost::Minutes ? tt(i, j) : miles(i, j); }

    const Vertex& vertex(int id) const {
        check_vertex(id);
        return vertices[id];
    }

    const Vertex& pickup_of(int request) const { return vertices[requests[request].pickup]; }
    const Vertex& delivery_of(int request) const { return vertices[requests[request].delivery]; }

    // Request index served at vertex v, or -1 for vehicle endpoints.
    int request_of_vertex(int v) const {
        const int m2 = 2 * num_vehicles();
        const int n = num_requests();
        if (v < m2 || v >= m2 + 2 * n) return -1;
        return (v - m2) % n;
    }
    bool is_pickup(int v) const {
        const int m2 = 2 * num_vehicles();
        return v >= m2 && v < m2 + num_requests();
    }
    bool is_delivery(int v) const {
        const int m2 = 2 * num_vehicles();
        return v >= m2 + num_requests() && v < m2 + 2 * num_requests();
    }
    bool is_endpoint(int v) const { return v >= 0 && v < 2 * num_vehicles(); }

    // Smallest number of requests a feasible solution must serve.
    int min_served() const {
        return static_cast<int>(std::ceil(served_fraction_min * num_requests() - 1e-9));
    }

    void check_vertex(int id) const {
        if (id < 0 || id >= num_vertices()) {
            throw std::out_of_range("unknown vertex id " + std::to_string(id));
        }
    }

private:
    std::vector<double> miles_;
    std::vector<double> minutes_;
};

// Euclidean distance times the instance's minutes-per-mile factor.
inline double travel_time(const Instance& inst, int i, int j) {
    inst.check_vertex(i);
    inst.check_vertex(j);
    if (inst.finalized()) return inst.tt(i, j);
    const auto& a = inst.vertices[i];
    const auto& b = inst.vertices[j];
    return std::hypot(a.x - b.x, a.y - b.y) * inst.time_factor;
}

inline double distance_miles(const Instance& inst, int i, int j) {
    inst.check_vertex(i);
    inst.check_vertex(j);
    if (inst.finalized()) return inst.miles(i, j);
    const auto& a = inst.vertices[i];
    const auto& b = inst.vertices[j];
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Compact description used to assemble instances in the documented layout.
struct VehicleSpec {
    double origin_x = 0.0, origin_y = 0.0;
    double dest_x = 0.0, dest_y = 0.0;
    double origin_earliest = 490.0, origin_latest = 610.0;
    double dest_earliest = 550.0, dest_latest = 565.0;
    int capacity = 3;
    double tolerance = 5.0;
};

struct RequestSpec {
    double pickup_x = 0.0, pickup_y = 0.0;
    double delivery_x = 0.0, delivery_y = 0.0;
    double pickup_earliest = 0.0, pickup_latest = 0.0;
    double delivery_earliest = 0.0, delivery_latest = 0.0;
    double service = 0.5;
    int demand = 1;
};

struct InstanceLimits {
    double max_route_duration = 90.0;
    double max_ride_time = 30.0;
    double time_factor = 2.0;
    double served_fraction_min = 0.8;
};

inline Instance build_instance(std::string name, const std::vector<VehicleSpec>& vehicles,
                               const std::vector<RequestSpec>& requests, const InstanceLimits& limits = {}) {
    Instance inst;
    inst.name = std::move(name);
    inst.max_route_duration = limits.max_route_duration;
    inst.max_ride_time = limits.max_ride_time;
    inst.time_factor = limits.time_factor;
    inst.served_fraction_min = limits.served_fraction_min;
    const int m = static_cast<int>(vehicles.size());
    const int n = static_cast<int>(requests.size());
    inst.vertices.resize(2 * m + 2 * n);
    for (int k = 0; k < m; ++k) {
        const auto& vs = vehicles[k];
        inst.vertices[k] = Vertex{k, vs.origin_x, vs.origin_y, vs.origin_earliest, vs.origin_latest, 0.0, 0};
        inst.vertices[m + k] = Vertex{m + k, vs.dest_x, vs.dest_y, vs.dest_earliest, vs.dest_latest, 0.0, 0};
        inst.vehicles.push_back(Vehicle{k, k, m + k, vs.capacity, vs.tolerance});
    }
    for (int r = 0; r < n; ++r) {
        const auto& rs = requests[r];
        const int p = 2 * m + r;
        const int d = p + n;
        inst.vertices[p] = Vertex{p, rs.pickup_x, rs.pickup_y, rs.pickup_earliest, rs.pickup_latest, rs.service, rs.demand};
        inst.vertices[d] =
            Vertex{d, rs.delivery_x, rs.delivery_y, rs.delivery_earliest, rs.delivery_latest, rs.service, -rs.demand};
        inst.requests.push_back(Request{r, p, d, rs.demand});
    }
    inst.finalize();
    return inst;
}

struct SolverParams {
    double w1 = 40.0;
    double w2 = 60.0;
    double alpha = 0.1;   // score reaction factor
    double beta1 = 5.0;   // reward for a new global best
    double beta2 = 1.0;   // reward for improving the current solution
    double gamma = 0.9;   // penalty factor
    int size_n = 3;
    int size_e = 1;
    double alpha_t = 0.99;
    // Temperature bounds default to m/2 and n/2 when left at zero.
    double t_min = 0.0;
    double t_max = 0.0;
    double cpu_max = 300.0;     // seconds; ignored when max_iterations > 0
    long max_iterations = 0;    // deterministic iteration budget for the outer loop
    int iter_max = 10;          // local search iterations without improvement
    std::uint64_t rng_seed = 1;
    double removal_fraction = 0.15;
    ArcCost arc_cost = ArcCost::Minutes;
    bool strict_perturb_parity = false;  // fire perturbation on odd no-improve counts
    bool strict_cluster_mean = false;    // average segment distances over every vertex
};

// Returns a description of every out-of-range parameter.
inline std::vector<std::string> validate_params(const SolverParams& p) {
    std::vector<std::string> errs;
    if (!(p.gamma > 0.0 && p.gamma < 1.0)) errs.emplace_back("gamma must lie in (0,1)");
    if (!(p.alpha_t > 0.0 && p.alpha_t < 1.0)) errs.emplace_back("alpha_t must lie in (0,1)");
    if (!(p.w1 > 0.0)) errs.emplace_back("w1 must be positive");
    if (!(p.w2 > 0.0)) errs.emplace_back("w2 must be positive");
    if (p.size_e < 1) errs.emplace_back("size_e must be at least 1");
    if (p.size_n < 1) errs.emplace_back("size_n must be at least 1");
    if (p.iter_max < 0) errs.emplace_back("iter_max must be non-negative");
    if (p.alpha < 0.0 || p.beta1 < 0.0 || p.beta2 < 0.0) errs.emplace_back("score rewards must be non-negative");
    if (p.max_iterations < 0) errs.emplace_back("max_iterations must be non-negative");
    if (!(p.removal_fraction > 0.0 && p.removal_fraction <= 1.0)) errs.emplace_back("removal_fraction must lie in (0,1]");
    return errs;
}

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

inline ValidationReport validate_instance(const Instance& inst) {
    ValidationReport rep;
    auto add = [&rep](const std::string& s) { rep.issues.push_back(s); };
    const int m = inst.num_vehicles();
    const int n = inst.num_requests();
    const int nv = inst.num_vertices();

    if (nv != 2 * m + 2 * n) {
        std::ostringstream os;
        os << "vertex count " << nv << " does not equal 2m+2n = " << 2 * m + 2 * n;
        add(os.str());
    }
    if (!(inst.time_factor > 0.0)) add("time_factor must be positive");
    if (!(inst.served_fraction_min > 0.0 && inst.served_fraction_min <= 1.0)) add("served_fraction_min must lie in (0,1]");
    if (inst.max_ride_time < 0.0) add("max_ride_time must be non-negative");
    if (inst.max_route_duration < 0.0) add("max_route_duration must be non-negative");

    for (int i = 0; i < nv; ++i) {
        const auto& v = inst.vertices[i];
        if (v.id != i) add("vertex at position " + std::to_string(i) + " has id " + std::to_string(v.id));
        if (v.earliest > v.latest) add("earliest > latest at vertex " + std::to_string(i));
        if (v.service < 0.0) add("negative service time at vertex " + std::to_string(i));
        if (i < 2 * m && i < nv && (v.service != 0.0 || v.load_delta != 0)) {
            add("vehicle endpoint vertex " + std::to_string(i) + " must have zero service and load");
        }
    }

    for (int k = 0; k < m; ++k) {
        const auto& veh = inst.vehicles[k];
        const std::string tag = "vehicle " + std::to_string(k);
        if (veh.id != k) add(tag + " has id " + std::to_string(veh.id));
        if (veh.capacity < 1) add(tag + ": capacity must be at least 1");
        if (veh.dest_tolerance < 0.0) add(tag + ": dest_tolerance must be non-negative");
        if (veh.origin != k) add(tag + ": origin must be vertex " + std::to_string(k));
        if (veh.destination != m + k) add(tag + ": destination must be vertex " + std::to_string(m + k));
    }

    for (int r = 0; r < n; ++r) {
        const auto& req = inst.requests[r];
        const std::string tag = "request " + std::to_string(r);
        if (req.id != r) add(tag + " has id " + std::to_string(req.id));
        if (req.demand < 1) add(tag + ": demand must be at least 1");
        if (req.pickup == req.delivery) add(tag + ": pickup equals delivery");
        if (req.pickup < 0 || req.pickup >= nv || req.delivery < 0 || req.delivery >= nv) {
            add(tag + ": unresolved vertex reference");
            continue;
        }
        if (req.pickup != 2 * m + r || req.delivery != req.pickup + n) {
            add(tag + ": pairing violation (expected pickup " + std::to_string(2 * m + r) + " and delivery " +
                std::to_string(2 * m + r + n) + ")");
        }
        const auto& p = inst.vertices[req.pickup];
        const auto& d = inst.vertices[req.delivery];
        if (p.load_delta != req.demand || d.load_delta != -req.demand) {
            add(tag + ": load deltas must be +demand at pickup and -demand at delivery");
        }
    }
    return rep;
}

}  // namespace darpdp
