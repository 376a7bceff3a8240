#pragma once

// File formats, the taxi-trip instance generator, KPIs and result tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "darpdp/engine.hpp"
#include "darpdp/model.hpp"
#include "darpdp/random.hpp"
#include "darpdp/schedule.hpp"

namespace darpdp {

using json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;

namespace detail {

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw ParseError("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
    }
}

inline const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path + ": missing field '" + key + "'");
    return *it;
}

inline double num(const json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_number()) throw ParseError(path + "." + key + ": expected a number");
    return v.get<double>();
}

inline int integer(const json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_number_integer()) throw ParseError(path + "." + key + ": expected an integer");
    return v.get<int>();
}

inline const json& array(const json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_array()) throw ParseError(path + "." + key + ": expected an array");
    return v;
}

inline void check_header(const json& j, const char* format) {
    const auto& f = field(j, "format", "$");
    if (!f.is_string() || f.get<std::string>() != format)
        throw ParseError(std::string("$.format: expected \"") + format + "\"");
    if (integer(j, "version", "$") != kFormatVersion)
        throw ParseError("$.version: unsupported version (expected " + std::to_string(kFormatVersion) + ")");
}

inline json point(const Vertex& v, bool with_service) {
    json o;
    o["x"] = v.x;
    o["y"] = v.y;
    o["earliest"] = v.earliest;
    o["latest"] = v.latest;
    if (with_service) o["service"] = v.service;
    return o;
}

}  // namespace detail

// Instance document, version 1:
// {
//   "format": "darpdp-instance", "version": 1, "name": "...",
//   "time_factor": minutes per mile, "max_route_duration": T_r, "max_ride_time": T_M,
//   "served_fraction_min": 0.8,
//   "vehicles": [{"origin": {x, y, earliest, latest}, "destination": {x, y, earliest, latest},
//                 "capacity": int, "tolerance": minutes}],
//   "requests": [{"pickup": {x, y, earliest, latest, service},
//                 "delivery": {x, y, earliest, latest, service}, "demand": int}]
// }
// Vertex ids are implied by position: origins, destinations, pickups, deliveries.
inline std::string write_instance(const Instance& inst) {
    json j;
    j["format"] = "darpdp-instance";
    j["version"] = kFormatVersion;
    j["name"] = inst.name;
    j["time_factor"] = inst.time_factor;
    j["max_route_duration"] = inst.max_route_duration;
    j["max_ride_time"] = inst.max_ride_time;
    j["served_fraction_min"] = inst.served_fraction_min;
    j["vehicles"] = json::array();
    for (const auto& veh : inst.vehicles) {
        json o;
        o["origin"] = detail::point(inst.vertices[veh.origin], false);
        o["destination"] = detail::point(inst.vertices[veh.destination], false);
        o["capacity"] = veh.capacity;
        o["tolerance"] = veh.dest_tolerance;
        j["vehicles"].push_back(o);
    }
    j["requests"] = json::array();
    for (const auto& req : inst.requests) {
        json o;
        o["pickup"] = detail::point(inst.vertices[req.pickup], true);
        o["delivery"] = detail::point(inst.vertices[req.delivery], true);
        o["demand"] = req.demand;
        j["requests"].push_back(o);
    }
    return j.dump(2) + "\n";
}

inline Instance parse_instance(const std::string& text) {
    using namespace detail;
    const json j = parse_json_text(text);
    check_header(j, "darpdp-instance");
    InstanceLimits lim;
    lim.time_factor = num(j, "time_factor", "$");
    lim.max_route_duration = num(j, "max_route_duration", "$");
    lim.max_ride_time = num(j, "max_ride_time", "$");
    lim.served_fraction_min = num(j, "served_fraction_min", "$");
    const auto& name = field(j, "name", "$");
    if (!name.is_string()) throw ParseError("$.name: expected a string");

    std::vector<VehicleSpec> vehicles;
    const auto& va = array(j, "vehicles", "$");
    for (std::size_t k = 0; k < va.size(); ++k) {
        const std::string p = "$.vehicles[" + std::to_string(k) + "]";
        const auto& o = field(va[k], "origin", p);
        const auto& d = field(va[k], "destination", p);
        VehicleSpec s;
        s.origin_x = num(o, "x", p + ".origin");
        s.origin_y = num(o, "y", p + ".origin");
        s.origin_earliest = num(o, "earliest", p + ".origin");
        s.origin_latest = num(o, "latest", p + ".origin");
        s.dest_x = num(d, "x", p + ".destination");
        s.dest_y = num(d, "y", p + ".destination");
        s.dest_earliest = num(d, "earliest", p + ".destination");
        s.dest_latest = num(d, "latest", p + ".destination");
        s.capacity = integer(va[k], "capacity", p);
        s.tolerance = num(va[k], "tolerance", p);
        vehicles.push_back(s);
    }
    std::vector<RequestSpec> requests;
    const auto& ra = array(j, "requests", "$");
    for (std::size_t r = 0; r < ra.size(); ++r) {
        const std::string p = "$.requests[" + std::to_string(r) + "]";
        const auto& pk = field(ra[r], "pickup", p);
        const auto& dl = field(ra[r], "delivery", p);
        RequestSpec s;
        s.pickup_x = num(pk, "x", p + ".pickup");
        s.pickup_y = num(pk, "y", p + ".pickup");
        s.pickup_earliest = num(pk, "earliest", p + ".pickup");
        s.pickup_latest = num(pk, "latest", p + ".pickup");
        s.service = num(pk, "service", p + ".pickup");
        s.delivery_x = num(dl, "x", p + ".delivery");
        s.delivery_y = num(dl, "y", p + ".delivery");
        s.delivery_earliest = num(dl, "earliest", p + ".delivery");
        s.delivery_latest = num(dl, "latest", p + ".delivery");
        s.demand = integer(ra[r], "demand", p);
        requests.push_back(s);
        const double ds = num(dl, "service", p + ".delivery");
        if (ds != s.service) throw ParseError(p + ": pickup and delivery service times must match");
    }
    return build_instance(name.get<std::string>(), vehicles, requests, lim);
}

// Solution document, version 1:
// {
//   "format": "darpdp-solution", "version": 1, "instance": "...",
//   "routes": [{"vehicle": k, "stops": [vertex ids], "start_times": [minutes]}],
//   "rejected": [request ids],
//   "cost": {"travel": ..., "lateness": ..., "weighted": ..., "served": int}
// }
inline std::string write_solution(const Instance& inst, const Solution& sol) {
    json j;
    j["format"] = "darpdp-solution";
    j["version"] = kFormatVersion;
    j["instance"] = inst.name;
    j["routes"] = json::array();
    for (const auto& route : sol.routes) {
        json o;
        o["vehicle"] = route.vehicle;
        o["stops"] = route.stops;
        auto res = schedule_route(inst, route);
        if (auto* s = std::get_if<Schedule>(&res)) {
            o["start_times"] = s->start_times;
        } else {
            o["start_times"] = json::array();
        }
        j["routes"].push_back(o);
    }
    j["rejected"] = sol.rejected();
    j["cost"] = {{"travel", sol.cost.travel},
                 {"lateness", sol.cost.lateness_total},
                 {"weighted", sol.cost.weighted},
                 {"served", sol.cost.served}};
    return j.dump(2) + "\n";
}

struct SolutionCheck {
    Solution solution;
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

// Parses and re-validates a solution. Malformed documents and unknown vertex
// ids throw; constraint violations, schedule or cost mismatches are reported
// as issues.
inline SolutionCheck parse_solution(const std::string& text, const Instance& inst, const SolverParams& params,
                                    double tolerance = 1e-6) {
    using namespace detail;
    const json j = parse_json_text(text);
    check_header(j, "darpdp-solution");
    SolutionCheck out;
    const auto& ra = array(j, "routes", "$");
    if (static_cast<int>(ra.size()) != inst.num_vehicles())
        throw ParseError("$.routes: expected " + std::to_string(inst.num_vehicles()) + " routes");
    std::vector<Route> routes;
    std::vector<std::vector<double>> claimed_times;
    for (std::size_t k = 0; k < ra.size(); ++k) {
        const std::string p = "$.routes[" + std::to_string(k) + "]";
        Route route;
        route.vehicle = integer(ra[k], "vehicle", p);
        if (route.vehicle != static_cast<int>(k)) throw ParseError(p + ".vehicle: routes must be ordered by vehicle id");
        for (const auto& s : array(ra[k], "stops", p)) {
            if (!s.is_number_integer()) throw ParseError(p + ".stops: expected integer vertex ids");
            const int v = s.get<int>();
            if (v < 0 || v >= inst.num_vertices())
                throw ParseError(p + ".stops: stop references unknown vertex " + std::to_string(v));
            route.stops.push_back(v);
        }
        std::vector<double> times;
        if (ra[k].contains("start_times")) {
            for (const auto& t : array(ra[k], "start_times", p)) {
                if (!t.is_number()) throw ParseError(p + ".start_times: expected numbers");
                times.push_back(t.get<double>());
            }
        }
        claimed_times.push_back(std::move(times));
        routes.push_back(std::move(route));
    }

    try {
        out.solution = make_solution(inst, params, routes);
    } catch (const InfeasibleError& e) {
        out.issues.push_back(e.what());
        out.solution.routes = routes;
        out.solution.assignment.assign(inst.num_requests(), -1);
        for (const auto& route : routes)
            for (int v : route.stops)
                if (inst.is_pickup(v)) out.solution.assignment[inst.request_of_vertex(v)] = route.vehicle;
        for (const auto& v : check_feasibility(inst, out.solution).violations) out.issues.push_back(v.describe());
        return out;
    }

    for (std::size_t k = 0; k < routes.size(); ++k) {
        const auto& claimed = claimed_times[k];
        if (claimed.empty()) continue;
        const auto sched = std::get<Schedule>(schedule_route(inst, routes[k]));
        if (claimed.size() != sched.start_times.size()) {
            out.issues.push_back("route " + std::to_string(k) + ": start_times length does not match stops");
            continue;
        }
        for (std::size_t i = 0; i < claimed.size(); ++i) {
            if (std::abs(claimed[i] - sched.start_times[i]) > tolerance) {
                std::ostringstream os;
                os << "route " << k << " stop " << i << ": start time " << claimed[i] << " differs from schedule "
                   << sched.start_times[i];
                out.issues.push_back(os.str());
            }
        }
    }
    if (j.contains("rejected")) {
        std::vector<int> claimed;
        for (const auto& r : array(j, "rejected", "$")) {
            if (!r.is_number_integer()) throw ParseError("$.rejected: expected integer request ids");
            claimed.push_back(r.get<int>());
        }
        std::sort(claimed.begin(), claimed.end());
        if (claimed != out.solution.rejected()) out.issues.push_back("rejected set does not match the routes");
    }
    if (j.contains("cost")) {
        const auto& c = j["cost"];
        auto cmp = [&](const char* key, double actual) {
            const double v = num(c, key, "$.cost");
            if (std::abs(v - actual) > tolerance) {
                std::ostringstream os;
                os << "cost mismatch: " << key << " " << v << " vs recomputed " << actual;
                out.issues.push_back(os.str());
            }
        };
        cmp("travel", out.solution.cost.travel);
        cmp("lateness", out.solution.cost.lateness_total);
        cmp("weighted", out.solution.cost.weighted);
        if (integer(c, "served", "$.cost") != out.solution.cost.served)
            out.issues.push_back("cost mismatch: served count");
    }
    for (const auto& v : check_feasibility(inst, out.solution).violations) out.issues.push_back(v.describe());
    return out;
}

inline std::string write_run_stats(const RunStats& st) {
    json j;
    j["instance"] = st.instance;
    j["seed"] = st.seed;
    j["rng_streams"] = {{"local_search", 1}, {"relink", 2}, {"perturb", 3}, {"acceptance", 4}};
    j["iterations"] = st.iterations;
    j["improvements"] = st.improvements;
    j["sa_accepts"] = st.sa_accepts;
    j["perturbations"] = st.perturbations;
    j["initial_cost"] = st.initial_cost;
    j["best_cost"] = st.best_cost;
    j["best_served"] = st.best_served;
    j["best_feasible"] = st.best_feasible;
    j["cpu_seconds"] = st.cpu_seconds;
    j["time_split"] = {{"construct", st.t_construct},
                       {"local_search", st.t_local_search},
                       {"relink", st.t_relink},
                       {"perturb", st.t_perturb}};
    j["best_trace"] = st.best_trace;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Trip data and the benchmark generator.

// Per-iteration trace: one row per outer iteration.
inline std::string write_trace_csv(const RunStats& st) {
    std::ostringstream os;
    os << "iteration,current,best,temperature";
    for (auto k : kAllMoves) os << ",p_" << to_string(k);
    os << "\n";
    char buf[64];
    for (const auto& row : st.trace) {
        os << row.iteration;
        for (double v : {row.current, row.best, row.temperature}) {
            std::snprintf(buf, sizeof buf, ",%.9g", v);
            os << buf;
        }
        for (double p : row.probabilities) {
            std::snprintf(buf, sizeof buf, ",%.9g", p);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

struct TripRecord {
    int pickup_location_id = 0;
    int dropoff_location_id = 0;
    double pickup_time = 0.0;   // minutes from midnight
    double dropoff_time = 0.0;  // minutes from midnight
    double trip_distance = 0.0;
    double pickup_x = 0.0, pickup_y = 0.0;
    double dropoff_x = 0.0, dropoff_y = 0.0;
};

struct ZoneCentroid {
    double x = 0.0;
    double y = 0.0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

inline int column(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("missing column '" + name + "'");
    return static_cast<int>(it - header.begin());
}

}  // namespace detail

// "YYYY-MM-DD HH:MM[:SS]" (or with a 'T' separator) to minutes from midnight.
inline double parse_clock_minutes(const std::string& stamp) {
    const auto pos = stamp.find_first_of(" T");
    const std::string clock = pos == std::string::npos ? stamp : stamp.substr(pos + 1);
    int h = 0, m = 0;
    double s = 0.0;
    const int got = std::sscanf(clock.c_str(), "%d:%d:%lf", &h, &m, &s);
    if (got < 2 || h < 0 || h > 23 || m < 0 || m > 59) throw ParseError("bad timestamp '" + stamp + "'");
    return h * 60.0 + m + s / 60.0;
}

// Trip CSV with the taxi-record column names; other columns are ignored.
inline std::vector<TripRecord> read_trips_csv(const std::string& text) {
    auto rows = detail::read_csv(text);
    if (rows.empty()) throw ParseError("trip file is empty");
    const auto& h = rows.front();
    const int c_pu = detail::column(h, "PULocationID");
    const int c_do = detail::column(h, "DOLocationID");
    const int c_pt = detail::column(h, "tpep_pickup_datetime");
    const int c_dt = detail::column(h, "tpep_dropoff_datetime");
    const int c_dist = detail::column(h, "trip_distance");
    const int width = std::max({c_pu, c_do, c_pt, c_dt, c_dist}) + 1;
    std::vector<TripRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (static_cast<int>(r.size()) < width)
            throw ParseError("line " + std::to_string(i + 1) + ": too few columns");
        TripRecord t;
        try {
            t.pickup_location_id = std::stoi(r[c_pu]);
            t.dropoff_location_id = std::stoi(r[c_do]);
            t.trip_distance = std::stod(r[c_dist]);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(i + 1) + ": bad numeric field");
        }
        t.pickup_time = parse_clock_minutes(r[c_pt]);
        t.dropoff_time = parse_clock_minutes(r[c_dt]);
        out.push_back(t);
    }
    return out;
}

// Zone centroid CSV: LocationID,x,y (miles).
inline std::map<int, ZoneCentroid> read_zones_csv(const std::string& text) {
    auto rows = detail::read_csv(text);
    if (rows.empty()) throw ParseError("zone file is empty");
    const auto& h = rows.front();
    const int c_id = detail::column(h, "LocationID");
    const int c_x = detail::column(h, "x");
    const int c_y = detail::column(h, "y");
    std::map<int, ZoneCentroid> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        try {
            out[std::stoi(r.at(c_id))] = ZoneCentroid{std::stod(r.at(c_x)), std::stod(r.at(c_y))};
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(i + 1) + ": bad zone row");
        }
    }
    return out;
}

// Resolves zone coordinates and keeps trips lying fully inside [from, to].
// Trips with an unknown zone or dropoff before pickup are dropped.
inline std::vector<TripRecord> prepare_trips(std::vector<TripRecord> trips, const std::map<int, ZoneCentroid>& zones,
                                             double from = 490.0, double to = 610.0) {
    std::vector<TripRecord> out;
    for (auto& t : trips) {
        auto pu = zones.find(t.pickup_location_id);
        auto dz = zones.find(t.dropoff_location_id);
        if (pu == zones.end() || dz == zones.end()) continue;
        if (t.dropoff_time < t.pickup_time) continue;
        if (t.pickup_time < from || t.dropoff_time > to) continue;
        t.pickup_x = pu->second.x;
        t.pickup_y = pu->second.y;
        t.dropoff_x = dz->second.x;
        t.dropoff_y = dz->second.y;
        out.push_back(t);
    }
    return out;
}

enum class WindowType { A, B };
enum class FleetRule { Floor, Ceil };

struct Scenario {
    WindowType type = WindowType::A;
    FleetRule fleet = FleetRule::Floor;
    double horizon_start = 490.0;
    double horizon_end = 610.0;
    double dest_earliest_lo = 550.0;
    double dest_earliest_hi = 595.0;
    double dest_width = 15.0;
    double tolerance = 5.0;
    double time_factor = 2.0;
    double max_route_duration = 90.0;
    double max_ride_time = 30.0;
    double service = 0.5;
    int capacity = 3;

    double tw_width() const { return type == WindowType::A ? 5.0 : 10.0; }
};

inline int fleet_size(int n, FleetRule rule) {
    const int m = rule == FleetRule::Floor ? n / 9 : (n + 8) / 9;
    return std::max(1, m);
}

inline std::string instance_name(int n, const Scenario& sc) {
    return std::string("inst_") + (sc.type == WindowType::A ? "a" : "b") + std::to_string(n) + "_" +
           std::to_string(fleet_size(n, sc.fleet));
}

inline const std::vector<int>& suite_sizes() {
    static const std::vector<int> sizes{10, 15, 20, 30, 50, 100, 200};
    return sizes;
}

// One instance of n sampled trips. Request windows are centred on the trip's
// pickup and dropoff times; drivers start at a sampled trip pickup zone and end
// at a sampled dropoff zone.
inline Instance generate_instance(const std::vector<TripRecord>& trips, int n, const Scenario& sc, Rng& rng) {
    if (n < 1) throw std::invalid_argument("instance size must be positive");
    if (static_cast<int>(trips.size()) < n) {
        throw std::invalid_argument("insufficient trips in horizon: need " + std::to_string(n) + ", have " +
                                    std::to_string(trips.size()));
    }
    std::vector<int> idx(trips.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    shuffle(idx, rng);
    idx.resize(n);
    std::sort(idx.begin(), idx.end());

    const double half = sc.tw_width() / 2.0;
    std::vector<RequestSpec> reqs;
    for (int i : idx) {
        const auto& t = trips[i];
        RequestSpec r;
        r.pickup_x = t.pickup_x;
        r.pickup_y = t.pickup_y;
        r.delivery_x = t.dropoff_x;
        r.delivery_y = t.dropoff_y;
        r.pickup_earliest = t.pickup_time - half;
        r.pickup_latest = t.pickup_time + half;
        r.delivery_earliest = t.dropoff_time - half;
        r.delivery_latest = t.dropoff_time + half;
        r.service = sc.service;
        r.demand = 1;
        reqs.push_back(r);
    }
    const int m = fleet_size(n, sc.fleet);
    const int last = static_cast<int>(trips.size()) - 1;
    std::vector<VehicleSpec> vehs;
    for (int k = 0; k < m; ++k) {
        const auto& from = trips[uniform_int(rng, 0, last)];
        const auto& to = trips[uniform_int(rng, 0, last)];
        VehicleSpec v;
        v.origin_x = from.pickup_x;
        v.origin_y = from.pickup_y;
        v.dest_x = to.dropoff_x;
        v.dest_y = to.dropoff_y;
        v.origin_earliest = sc.horizon_start;
        v.origin_latest = sc.horizon_end;
        v.dest_earliest = std::uniform_real_distribution<double>(sc.dest_earliest_lo, sc.dest_earliest_hi)(rng);
        v.dest_latest = v.dest_earliest + sc.dest_width;
        v.capacity = sc.capacity;
        v.tolerance = sc.tolerance;
        vehs.push_back(v);
    }
    InstanceLimits lim;
    lim.max_route_duration = sc.max_route_duration;
    lim.max_ride_time = sc.max_ride_time;
    lim.time_factor = sc.time_factor;
    return build_instance(instance_name(n, sc), vehs, reqs, lim);
}

// Each (size, scenario) draws from its own stream so any subset of the suite
// reproduces the corresponding members of the full suite.
inline std::uint32_t generator_stream(int n, const Scenario& sc) {
    return static_cast<std::uint32_t>(n) * 4u + (sc.type == WindowType::B ? 2u : 0u) +
           (sc.fleet == FleetRule::Ceil ? 1u : 0u);
}

inline std::vector<Instance> generate_instances(const std::vector<TripRecord>& trips, const std::vector<int>& sizes,
                                                const Scenario& sc, std::uint64_t seed) {
    std::vector<Instance> out;
    for (int n : sizes) {
        Rng rng = derive_rng(seed, generator_stream(n, sc));
        out.push_back(generate_instance(trips, n, sc, rng));
    }
    return out;
}

// The full 28-instance suite: every size under both window types and both
// fleet rules.
inline std::vector<Instance> generate_suite(const std::vector<TripRecord>& trips, std::uint64_t seed,
                                            const std::vector<int>& sizes = suite_sizes()) {
    std::vector<Instance> out;
    for (int n : sizes) {
        for (auto type : {WindowType::A, WindowType::B}) {
            for (auto rule : {FleetRule::Floor, FleetRule::Ceil}) {
                Scenario sc;
                sc.type = type;
                sc.fleet = rule;
                auto batch = generate_instances(trips, {n}, sc, seed);
                out.push_back(std::move(batch.front()));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// KPIs and result tables.

struct KpiReport {
    double kpi1 = 0.0;  // percent served
    double kpi2 = 0.0;  // percent of route time driven empty
    double kpi3 = 0.0;  // mean excess ride time, minutes
};

struct KpiOptions {
    bool strict = false;  // sum per-vehicle ratios for kpi2, divide kpi3 by n
};

inline KpiReport compute_kpis(const Instance& inst, const Solution& sol, const KpiOptions& opts = {}) {
    KpiReport rep;
    const int n = inst.num_requests();
    int served = 0;
    double excess = 0.0;
    double ratio_sum = 0.0;
    int ratio_count = 0;
    for (const auto& route : sol.routes) {
        auto res = schedule_route(inst, route);
        if (auto* why = std::get_if<Infeasible>(&res)) throw InfeasibleError(*why);
        const auto& sched = std::get<Schedule>(res);
        const auto& s = route.stops;
        double empty = 0.0;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (sched.loads[i] == 0) empty += inst.tt(s[i], s[i + 1]);
        const double span = sched.start_times.back() - sched.start_times.front();
        if (span > 0.0) {
            ratio_sum += empty / span;
            ++ratio_count;
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!inst.is_pickup(s[i])) continue;
            const int r = inst.request_of_vertex(s[i]);
            const int dv = inst.requests[r].delivery;
            const auto j = static_cast<std::size_t>(std::find(s.begin(), s.end(), dv) - s.begin());
            excess += sched.start_times[j] - (sched.start_times[i] + inst.vertices[s[i]].service) - inst.tt(s[i], dv);
            ++served;
        }
    }
    rep.kpi1 = n == 0 ? 100.0 : 100.0 * served / n;
    if (opts.strict) {
        rep.kpi2 = 100.0 * ratio_sum;
        rep.kpi3 = n == 0 ? 0.0 : excess / n;
    } else {
        rep.kpi2 = ratio_count == 0 ? 0.0 : 100.0 * ratio_sum / ratio_count;
        rep.kpi3 = served == 0 ? 0.0 : excess / served;
    }
    if (std::abs(rep.kpi3) < 1e-9) rep.kpi3 = 0.0;
    return rep;
}

inline double gap_percent(double best_method, double best_baseline) {
    return 100.0 * (best_method - best_baseline) / best_baseline;
}

// One row per instance (in first-seen order): best and mean cost, mean CPU
// seconds, and the gap against the supplied baseline. With an empty baseline
// the gap column is left blank.
inline std::string results_table(const std::vector<RunStats>& runs, const std::map<std::string, double>& baseline = {}) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunStats*>> groups;
    for (const auto& r : runs) {
        if (!groups.count(r.instance)) order.push_back(r.instance);
        groups[r.instance].push_back(&r);
    }
    if (!baseline.empty()) {
        std::set<std::string> a(order.begin(), order.end());
        std::set<std::string> b;
        for (const auto& [k, v] : baseline) b.insert(k);
        if (a != b) throw std::invalid_argument("baseline instance set does not match the runs");
    }
    std::ostringstream os;
    os << "instance,best,avg,cpu_s,gap_pct\n";
    char buf[64];
    for (const auto& name : order) {
        const auto& g = groups[name];
        double best = g.front()->best_cost;
        double sum = 0.0;
        double cpu = 0.0;
        for (const auto* r : g) {
            best = std::min(best, r->best_cost);
            sum += r->best_cost;
            cpu += r->cpu_seconds;
        }
        os << name;
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.3f,", best, sum / g.size(), cpu / g.size());
        os << buf;
        if (!baseline.empty()) {
            std::snprintf(buf, sizeof buf, "%.4f", gap_percent(best, baseline.at(name)));
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

// Best-effort reader for whitespace-separated instance files in the common
// DARP benchmark layout:
//   line 1: m n T_r Q T_M
//   then 2n+2 vertex lines: id x y service load earliest latest
// with vertex 0 the shared depot and the last line its copy. Anything that
// does not fit this layout exactly is reported as an error.
inline Instance import_benchmark_text(const std::string& text, const std::string& name) {
    std::istringstream is(text);
    int m = 0, n = 0, cap = 0;
    double tr = 0.0, tm = 0.0;
    if (!(is >> m >> n >> tr >> cap >> tm) || m < 1 || n < 1)
        throw ParseError("unrecognised header; expected 'm n T_r Q T_M'");
    struct Row {
        int id;
        double x, y, s;
        int q;
        double e, l;
    };
    std::vector<Row> rows;
    Row r{};
    while (is >> r.id >> r.x >> r.y >> r.s >> r.q >> r.e >> r.l) rows.push_back(r);
    if (!is.eof()) throw ParseError("trailing data that is not a vertex line");
    if (static_cast<int>(rows.size()) != 2 * n + 2 && static_cast<int>(rows.size()) != 2 * n + 1) {
        throw ParseError("expected " + std::to_string(2 * n + 2) + " vertex lines, found " +
                         std::to_string(rows.size()));
    }
    for (int i = 1; i <= n; ++i) {
        if (rows[i].q <= 0 || rows[i + n].q != -rows[i].q)
            throw ParseError("vertex " + std::to_string(i) + " does not pair with vertex " + std::to_string(i + n));
    }
    const Row& depot = rows.front();
    const Row& depot_end = rows.size() == static_cast<std::size_t>(2 * n + 2) ? rows.back() : depot;
    std::vector<VehicleSpec> vehs(m);
    for (auto& v : vehs) {
        v.origin_x = depot.x;
        v.origin_y = depot.y;
        v.origin_earliest = depot.e;
        v.origin_latest = depot.l;
        v.dest_x = depot_end.x;
        v.dest_y = depot_end.y;
        v.dest_earliest = depot_end.e;
        v.dest_latest = depot_end.l;
        v.capacity = cap;
    }
    std::vector<RequestSpec> reqs;
    for (int i = 1; i <= n; ++i) {
        RequestSpec q;
        q.pickup_x = rows[i].x;
        q.pickup_y = rows[i].y;
        q.pickup_earliest = rows[i].e;
        q.pickup_latest = rows[i].l;
        q.delivery_x = rows[i + n].x;
        q.delivery_y = rows[i + n].y;
        q.delivery_earliest = rows[i + n].e;
        q.delivery_latest = rows[i + n].l;
        q.service = rows[i].s;
        q.demand = rows[i].q;
        reqs.push_back(q);
    }
    InstanceLimits lim;
    lim.max_route_duration = tr;
    lim.max_ride_time = tm;
    lim.time_factor = 1.0;
    Instance inst = build_instance(name, vehs, reqs, lim);
    if (auto rep = validate_instance(inst); !rep.ok()) throw ParseError("imported instance invalid: " + rep.issues.front());
    return inst;
}

}  // namespace darpdp
