#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avl/constellation.hpp"
#include "avl/dgps.hpp"
#include "avl/geodesy.hpp"
#include "avl/lane_map.hpp"
#include "avl/pnt_solver.hpp"

namespace avl {

enum class Frame { Paper, Spherical };

struct SatelliteSpec {
    int prn = 0;
    bool use_geodetic = false;
    GeodeticCoord geodetic;
    CartesianCoord cartesian;
    double clock_error_ns = 0.0;
    OrbitMode mode = OrbitMode::Static;
    CartesianCoord rotation_axis{0.0, 0.0, 1.0};
    double angular_rate_rad_per_s = 0.0;
    bool healthy = true;
};

struct MatcherConfig {
    int window_size = 10;
    double candidate_distance_m = 10.0;
    int commit_epochs = 2;
};

struct ScenarioErrors {
    double iono_delay_min_ns = 0.0;
    double iono_delay_max_ns = 0.0;
    double receiver_noise_sigma_m = 0.0;
    double base_noise_sigma_m = 0.0;
    double receiver_clock_bias_ms = 0.0;
    double base_clock_bias_ms = 0.0;
    /// Base-side corrections are averaged over this many 1 Hz samples
    /// before each emission.
    int base_smoothing_epochs = 30;
};

struct LaneChangeSpec {
    double t_s = 0.0;
    int to_lane = 0;
    double duration_s = 3.0;
};

struct VehicleSpec {
    enum class Mode { LaneFollow, Waypoints };
    Mode mode = Mode::LaneFollow;
    double speed_mps = 15.0;
    int initial_lane = 1;
    double start_arclength_km = 0.0;
    std::vector<LaneChangeSpec> lane_changes;
    std::vector<std::pair<Vec2, double>> waypoints;  // point, speed_mps
    double height_km = 0.0;
};

struct BaseStationSpec {
    CartesianCoord position;
    uint16_t station_id = 1;
};

struct ChannelSpec : ChannelConfig {
    double max_age_s = 30.0;
};

struct Scenario {
    uint64_t seed = 1;
    double duration_s = 0.0;
    double fix_rate_hz = 1.0;
    bool dgps_enabled = true;
    Frame frame = Frame::Paper;
    EarthModel earth;
    std::string network_file;
    MatcherConfig matcher;
    SolverConfig solver;
    ScenarioErrors errors;
    ChannelSpec channel;
    BaseStationSpec base_station;
    std::vector<SatelliteSpec> constellation;
    VehicleSpec vehicle;
};

Scenario parse_scenario_json(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

struct Diagnostic {
    bool is_error = false;
    std::string field;
    std::string message;
};

std::vector<Diagnostic> validate_scenario(const Scenario& s);

/// Satellite truth states at time t from the scenario constellation.
std::vector<SatelliteState> constellation_at(const Scenario& s, double t);

/// Coarse almanac derived from the scenario constellation (positions at t=0).
Almanac scenario_almanac(const Scenario& s);

}  // namespace avl
