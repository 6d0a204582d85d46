#include "avl/network_gen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "avl/errors.hpp"

namespace avl {

LaneNetwork generate_lane_grid(const NetworkGenSpec& spec) {
    if (spec.lanes < 1 || spec.straight_km <= 0.0 || spec.point_spacing_m <= 0.0) {
        throw std::invalid_argument("invalid network generation spec");
    }
    const double arc_rad = spec.arc_deg * std::numbers::pi / 180.0;
    const bool has_arc = spec.arc_radius_km > 0.0 && arc_rad > 0.0;

    LaneNetwork net;
    for (int lane_idx = 0; lane_idx < spec.lanes; ++lane_idx) {
        const double offset_km = lane_idx * spec.lane_spacing_m * 1e-3;  // to the left
        LanePolyline lane;
        lane.lane_id = spec.first_lane_id + lane_idx;
        lane.width_m = spec.lane_width_m;

        // Straight run along +x; left offset is +y.
        const double step = spec.point_spacing_m * 1e-3;
        const int n_straight = std::max(1, static_cast<int>(std::ceil(spec.straight_km / step)));
        for (int i = 0; i <= n_straight; ++i) {
            const double x = spec.straight_km * i / n_straight;
            lane.points.push_back({x, offset_km});
        }

        double heading = 0.0;
        Vec2 base_end{spec.straight_km, 0.0};
        if (has_arc) {
            // Left turn: centre sits one radius to the left of the base line.
            const Vec2 centre{spec.straight_km, spec.arc_radius_km};
            const double r_lane = spec.arc_radius_km - offset_km;
            const double arc_step = spec.arc_point_spacing_m * 1e-3;
            const int n_arc =
                std::max(1, static_cast<int>(std::ceil(r_lane * arc_rad / arc_step)));
            for (int i = 1; i <= n_arc; ++i) {
                const double a = arc_rad * i / n_arc;
                lane.points.push_back({centre.x_km + r_lane * std::sin(a),
                                       centre.y_km - r_lane * std::cos(a)});
            }
            heading = arc_rad;
            base_end = {centre.x_km + spec.arc_radius_km * std::sin(arc_rad),
                        centre.y_km - spec.arc_radius_km * std::cos(arc_rad)};
        }
        if (spec.tail_km > 0.0) {
            const Vec2 dir{std::cos(heading), std::sin(heading)};
            const Vec2 left{-std::sin(heading), std::cos(heading)};
            const Vec2 start = base_end + offset_km * left;
            const int n_tail = std::max(1, static_cast<int>(std::ceil(spec.tail_km / step)));
            for (int i = 1; i <= n_tail; ++i) {
                lane.points.push_back(start + (spec.tail_km * i / n_tail) * dir);
            }
        }
        lane.finalize();
        net.add_lane(std::move(lane));
    }
    net.finalize();
    return net;
}

NetworkGenSpec parse_network_gen_spec(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("network spec is not valid JSON: ") + e.what());
    }
    NetworkGenSpec spec;
    spec.lanes = doc.value("lanes", spec.lanes);
    spec.lane_width_m = doc.value("lane_width_m", spec.lane_width_m);
    spec.lane_spacing_m = doc.value("lane_spacing_m", spec.lane_spacing_m);
    spec.straight_km = doc.value("straight_km", spec.straight_km);
    spec.arc_radius_km = doc.value("arc_radius_km", spec.arc_radius_km);
    spec.arc_deg = doc.value("arc_deg", spec.arc_deg);
    spec.tail_km = doc.value("tail_km", spec.tail_km);
    spec.point_spacing_m = doc.value("point_spacing_m", spec.point_spacing_m);
    spec.arc_point_spacing_m = doc.value("arc_point_spacing_m", spec.arc_point_spacing_m);
    spec.first_lane_id = doc.value("first_lane_id", spec.first_lane_id);
    return spec;
}

}  // namespace avl
