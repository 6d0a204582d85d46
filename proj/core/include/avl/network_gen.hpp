#pragma once

#include <string>

#include "avl/lane_map.hpp"

namespace avl {

/// Parallel-lane test course: a straight run, an optional left-hand arc, and
/// a straight tail. Lane 1 is the rightmost; lanes are offset to the left of
/// the base centerline, which starts at the origin heading +x.
struct NetworkGenSpec {
    int lanes = 3;
    double lane_width_m = 3.6;
    double lane_spacing_m = 3.6;
    double straight_km = 1.0;
    double arc_radius_km = 0.0;  // 0 disables the arc
    double arc_deg = 0.0;
    double tail_km = 0.0;
    double point_spacing_m = 50.0;
    double arc_point_spacing_m = 10.0;
    int first_lane_id = 1;
};

LaneNetwork generate_lane_grid(const NetworkGenSpec& spec);

NetworkGenSpec parse_network_gen_spec(const std::string& json_text);

}  // namespace avl
