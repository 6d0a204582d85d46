#include "avl/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "avl/errors.hpp"

namespace avl {

namespace {

using nlohmann::json;

CartesianCoord parse_vec3(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.size() != 3) {
        throw SchemaError(where + " must be [x, y, z]");
    }
    return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

}  // namespace

Scenario parse_scenario_json(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
    }
    Scenario s;
    s.seed = doc.value("seed", s.seed);
    s.duration_s = doc.value("duration_s", 0.0);
    s.fix_rate_hz = doc.value("fix_rate_hz", 1.0);
    s.dgps_enabled = doc.value("dgps_enabled", true);
    const std::string frame = doc.value("frame", std::string("paper"));
    if (frame == "paper") {
        s.frame = Frame::Paper;
    } else if (frame == "spherical") {
        s.frame = Frame::Spherical;
    } else {
        throw SchemaError("frame must be \"paper\" or \"spherical\"");
    }
    if (doc.contains("earth")) {
        const json& e = doc["earth"];
        s.earth.radius_km = e.value("radius_km", s.earth.radius_km);
        s.earth.quarter_circumference_km =
            e.value("quarter_circumference_km", s.earth.quarter_circumference_km);
        s.earth.speed_of_light_km_per_s =
            e.value("speed_of_light_km_per_s", s.earth.speed_of_light_km_per_s);
    }
    if (!doc.contains("network_file")) {
        throw SchemaError("missing field 'network_file'");
    }
    const std::filesystem::path net = doc["network_file"].get<std::string>();
    s.network_file = net.is_absolute() ? net.string() : (base_dir / net).string();

    if (doc.contains("matcher")) {
        const json& m = doc["matcher"];
        s.matcher.window_size = m.value("window_size", s.matcher.window_size);
        s.matcher.candidate_distance_m =
            m.value("candidate_distance_m", s.matcher.candidate_distance_m);
        s.matcher.commit_epochs = m.value("commit_epochs", s.matcher.commit_epochs);
    }
    if (doc.contains("solver")) {
        const json& v = doc["solver"];
        s.solver.earth_surface_tolerance_km =
            v.value("earth_surface_tolerance_km", s.solver.earth_surface_tolerance_km);
        s.solver.max_iterations = v.value("max_iterations", s.solver.max_iterations);
        s.solver.convergence_km = v.value("convergence_km", s.solver.convergence_km);
        s.solver.degenerate_volume_threshold_km3 =
            v.value("degenerate_volume_threshold_km3", s.solver.degenerate_volume_threshold_km3);
    }
    if (doc.contains("errors")) {
        const json& e = doc["errors"];
        s.errors.iono_delay_min_ns = e.value("iono_delay_min_ns", 0.0);
        s.errors.iono_delay_max_ns = e.value("iono_delay_max_ns", 0.0);
        s.errors.receiver_noise_sigma_m = e.value("receiver_noise_sigma_m", 0.0);
        s.errors.base_noise_sigma_m = e.value("base_noise_sigma_m", 0.0);
        s.errors.receiver_clock_bias_ms = e.value("receiver_clock_bias_ms", 0.0);
        s.errors.base_clock_bias_ms = e.value("base_clock_bias_ms", 0.0);
        s.errors.base_smoothing_epochs =
            e.value("base_smoothing_epochs", s.errors.base_smoothing_epochs);
    }
    if (doc.contains("channel")) {
        const json& c = doc["channel"];
        s.channel.latency_min_s = c.value("latency_min_s", s.channel.latency_min_s);
        s.channel.latency_max_s = c.value("latency_max_s", s.channel.latency_max_s);
        s.channel.loss_probability = c.value("loss_probability", s.channel.loss_probability);
        s.channel.bandwidth_bps = c.value("bandwidth_bps", s.channel.bandwidth_bps);
        s.channel.correction_period_s =
            c.value("correction_period_s", s.channel.correction_period_s);
        s.channel.max_age_s = c.value("max_age_s", s.channel.max_age_s);
    }
    if (doc.contains("base_station")) {
        const json& b = doc["base_station"];
        s.base_station.position = parse_vec3(b.at("position_km"), "base_station.position_km");
        s.base_station.station_id =
            static_cast<uint16_t>(b.value("station_id", 1));
    }
    if (!doc.contains("constellation") || !doc["constellation"].is_array()) {
        throw SchemaError("missing field 'constellation'");
    }
    for (size_t i = 0; i < doc["constellation"].size(); ++i) {
        const json& rec = doc["constellation"][i];
        const std::string where = "constellation[" + std::to_string(i) + "]";
        SatelliteSpec spec;
        if (!rec.contains("prn")) {
            throw SchemaError("missing field 'prn' in " + where);
        }
        spec.prn = rec["prn"].get<int>();
        if (rec.contains("geodetic_deg")) {
            const json& g = rec["geodetic_deg"];
            spec.use_geodetic = true;
            spec.geodetic = {g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>()};
        } else if (rec.contains("cartesian_km")) {
            spec.cartesian = parse_vec3(rec["cartesian_km"], where + ".cartesian_km");
        } else {
            throw SchemaError(where + " needs 'geodetic_deg' or 'cartesian_km'");
        }
        spec.clock_error_ns = rec.value("clock_error_ns", 0.0);
        const std::string mode = rec.value("mode", std::string("static"));
        if (mode == "static") {
            spec.mode = OrbitMode::Static;
        } else if (mode == "circular") {
            spec.mode = OrbitMode::Circular;
        } else {
            throw SchemaError("unknown orbit mode in " + where);
        }
        if (rec.contains("rotation_axis")) {
            spec.rotation_axis = parse_vec3(rec["rotation_axis"], where + ".rotation_axis");
        }
        spec.angular_rate_rad_per_s = rec.value("angular_rate_rad_per_s", 0.0);
        spec.healthy = rec.value("healthy", true);
        s.constellation.push_back(spec);
    }
    if (doc.contains("vehicle")) {
        const json& v = doc["vehicle"];
        const std::string mode = v.value("mode", std::string("lane_follow"));
        if (mode == "lane_follow") {
            s.vehicle.mode = VehicleSpec::Mode::LaneFollow;
        } else if (mode == "waypoints") {
            s.vehicle.mode = VehicleSpec::Mode::Waypoints;
        } else {
            throw SchemaError("vehicle.mode must be \"lane_follow\" or \"waypoints\"");
        }
        s.vehicle.speed_mps = v.value("speed_mps", s.vehicle.speed_mps);
        s.vehicle.initial_lane = v.value("initial_lane", s.vehicle.initial_lane);
        s.vehicle.start_arclength_km = v.value("start_arclength_km", 0.0);
        s.vehicle.height_km = v.value("height_km", 0.0);
        if (v.contains("lane_changes")) {
            for (const json& lc : v["lane_changes"]) {
                s.vehicle.lane_changes.push_back({lc.at("t_s").get<double>(),
                                                  lc.at("to_lane").get<int>(),
                                                  lc.value("duration_s", 3.0)});
            }
        }
        if (v.contains("waypoints")) {
            for (const json& wp : v["waypoints"]) {
                const json& pt = wp.at("point_km");
                s.vehicle.waypoints.push_back(
                    {{pt.at(0).get<double>(), pt.at(1).get<double>()},
                     wp.value("speed_mps", s.vehicle.speed_mps)});
            }
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open scenario file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str(),
                               std::filesystem::path(path).parent_path().string());
}

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
    std::vector<Diagnostic> out;
    auto error = [&](const std::string& field, const std::string& msg) {
        out.push_back({true, field, msg});
    };
    auto warning = [&](const std::string& field, const std::string& msg) {
        out.push_back({false, field, msg});
    };

    if (!(s.duration_s > 0.0)) error("duration_s", "must be positive");
    if (!(s.fix_rate_hz > 0.0)) error("fix_rate_hz", "must be positive");
    if (s.matcher.window_size < 2) error("matcher.window_size", "must be >= 2");
    if (!(s.matcher.candidate_distance_m > 0.0)) {
        error("matcher.candidate_distance_m", "must be positive");
    }
    if (s.channel.latency_min_s < 0.0 || s.channel.latency_max_s < s.channel.latency_min_s) {
        error("channel.latency", "bounds must satisfy 0 <= min <= max");
    }
    if (s.channel.loss_probability < 0.0 || s.channel.loss_probability > 1.0) {
        error("channel.loss_probability", "must be in [0, 1]");
    }
    if (!(s.channel.bandwidth_bps > 0.0)) error("channel.bandwidth_bps", "must be positive");
    if (s.errors.receiver_noise_sigma_m < 0.0 || s.errors.base_noise_sigma_m < 0.0) {
        error("errors", "noise sigmas must be non-negative");
    }
    if (s.errors.iono_delay_max_ns < s.errors.iono_delay_min_ns) {
        error("errors.iono_delay", "max must be >= min");
    }
    if (s.constellation.empty()) {
        error("constellation", "at least one satellite required");
    } else if (s.constellation.size() < 4) {
        warning("constellation", "fewer than 4 satellites; clock bias not observable");
    }
    for (const SatelliteSpec& sat : s.constellation) {
        const CartesianCoord pos = sat.use_geodetic
                                       ? (s.frame == Frame::Paper
                                              ? to_cartesian_paper(sat.geodetic, s.earth)
                                              : to_cartesian_spherical(sat.geodetic, s.earth))
                                       : sat.cartesian;
        if (s.frame == Frame::Paper && pos.z_km <= s.vehicle.height_km) {
            warning("constellation", "satellite prn " + std::to_string(sat.prn) +
                                         " not above receiver in flat mode");
        }
    }

    if (!std::filesystem::exists(s.network_file)) {
        error("network_file", "file does not exist: " + s.network_file);
        return out;  // lane references cannot be checked
    }
    try {
        const LaneNetwork net = load_network(s.network_file);
        if (s.vehicle.mode == VehicleSpec::Mode::LaneFollow) {
            if (!net.has_lane(s.vehicle.initial_lane)) {
                error("vehicle.initial_lane", "lane not present in network");
            }
            for (const LaneChangeSpec& lc : s.vehicle.lane_changes) {
                if (!net.has_lane(lc.to_lane)) {
                    error("vehicle.lane_changes", "target lane " + std::to_string(lc.to_lane) +
                                                      " not present in network");
                }
                if (lc.t_s + lc.duration_s > s.duration_s) {
                    warning("vehicle.lane_changes", "lane change extends past duration");
                }
            }
        } else if (s.vehicle.waypoints.size() < 2) {
            error("vehicle.waypoints", "waypoint mode needs >= 2 waypoints");
        }
    } catch (const Error& e) {
        error("network_file", e.what());
    }
    return out;
}

std::vector<SatelliteState> constellation_at(const Scenario& s, double t) {
    std::vector<SatelliteState> out;
    for (const SatelliteSpec& spec : s.constellation) {
        const CartesianCoord pos0 = spec.use_geodetic
                                        ? (s.frame == Frame::Paper
                                               ? to_cartesian_paper(spec.geodetic, s.earth)
                                               : to_cartesian_spherical(spec.geodetic, s.earth))
                                        : spec.cartesian;
        Ephemeris eph;
        eph.prn_id = spec.prn;
        eph.mode = spec.mode;
        eph.epoch_time_s = 0.0;
        eph.position_at_epoch = pos0;
        eph.rotation_axis = spec.rotation_axis;
        eph.angular_rate_rad_per_s = spec.angular_rate_rad_per_s;
        eph.clock_offset_s = spec.clock_error_ns * 1e-9;
        eph.validity_span_s = std::max(4.0 * 3600.0, s.duration_s + 1.0);
        SatelliteState st = propagate(eph, t);
        st.healthy = spec.healthy;
        out.push_back(st);
    }
    return out;
}

Almanac scenario_almanac(const Scenario& s) {
    Almanac alm;
    for (const SatelliteState& st : constellation_at(s, 0.0)) {
        alm.entries.push_back({st.prn_id, st.healthy, st.position, st.clock_error_s});
    }
    alm.iono_delay_s = 0.5 * (s.errors.iono_delay_min_ns + s.errors.iono_delay_max_ns) * 1e-9;
    return alm;
}

}  // namespace avl
