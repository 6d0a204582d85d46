#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace avl {

struct Vec2 {
    double x_km = 0.0;
    double y_km = 0.0;

    friend Vec2 operator+(const Vec2& a, const Vec2& b) {
        return {a.x_km + b.x_km, a.y_km + b.y_km};
    }
    friend Vec2 operator-(const Vec2& a, const Vec2& b) {
        return {a.x_km - b.x_km, a.y_km - b.y_km};
    }
    friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x_km, s * a.y_km}; }
    double dot(const Vec2& o) const { return x_km * o.x_km + y_km * o.y_km; }
    double cross(const Vec2& o) const { return x_km * o.y_km - y_km * o.x_km; }
    double norm() const;
    bool operator==(const Vec2&) const = default;
};

double distance_km(const Vec2& a, const Vec2& b);

/// Piecewise-linear lane arc: endpoints are nodes, interior vertices are
/// shape points. `finalize()` validates the invariants and builds the
/// cumulative arc-length table; geometric queries require a finalized lane.
struct LanePolyline {
    int lane_id = 0;
    std::vector<Vec2> points;
    double width_m = 3.6;
    std::vector<int> successors;
    std::vector<int> predecessors;

    void finalize();
    bool finalized() const { return !cumulative_km_.empty(); }
    double total_length_km() const { return cumulative_km_.back(); }
    std::span<const double> cumulative_km() const { return cumulative_km_; }

private:
    std::vector<double> cumulative_km_;
};

struct LanePolygon {
    std::vector<Vec2> boundary;
    bool closed = true;
};

/// Midpoint conversion: output point k is the midpoint of boundary edge
/// (L_k, L_{k+1}); the closing edge contributes one more point when the
/// polygon is closed. Throws on fewer than 4 points, repeated consecutive
/// vertices, or a self-intersecting closed boundary.
LanePolyline polygon_to_polyline(const LanePolygon& poly);

struct Projection {
    Vec2 foot;
    double arc_length_km = 0.0;
    double distance_km = 0.0;
};

Projection project_point(const LanePolyline& lane, const Vec2& p);

struct ArcPoint {
    Vec2 point;
    bool overflowed = false;  // s ran past the lane end; point clamped
};

ArcPoint point_at_arclength(const LanePolyline& lane, double s_km);

struct LoadReport {
    std::vector<std::string> warnings;
    int converted_polygons = 0;
};

class LaneNetwork {
public:
    /// Lane must be finalized; duplicate ids are rejected.
    void add_lane(LanePolyline lane);
    /// Validates connectivity references and builds the spatial index.
    void finalize(double cell_size_km = 0.1);

    const std::vector<LanePolyline>& lanes() const { return lanes_; }
    const LanePolyline& lane(int lane_id) const;
    bool has_lane(int lane_id) const { return index_.contains(lane_id); }

    /// Lanes whose minimal distance to p is <= d_km, sorted by lane id.
    std::vector<int> candidate_lanes(const Vec2& p, double d_km) const;

private:
    int64_t cell_key(int cx, int cy) const;

    std::vector<LanePolyline> lanes_;
    std::unordered_map<int, size_t> index_;
    std::unordered_map<int64_t, std::vector<int>> grid_;
    double cell_size_km_ = 0.1;
};

LaneNetwork load_network(const std::string& path, LoadReport* report = nullptr);
void save_network(const LaneNetwork& network, const std::string& path);

/// In-memory variants of the file codec (also used by the run-geometry dump).
LaneNetwork parse_network_json(const std::string& text, LoadReport* report = nullptr);
std::string network_to_json(const LaneNetwork& network);

}  // namespace avl
