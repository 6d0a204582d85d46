#include "avl/lane_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "avl/errors.hpp"

namespace avl {

double Vec2::norm() const { return std::hypot(x_km, y_km); }

double distance_km(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

void LanePolyline::finalize() {
    if (points.size() < 2) {
        throw std::invalid_argument("lane polyline needs at least 2 points");
    }
    cumulative_km_.clear();
    cumulative_km_.reserve(points.size());
    cumulative_km_.push_back(0.0);
    for (size_t i = 1; i < points.size(); ++i) {
        const double seg = distance_km(points[i - 1], points[i]);
        if (seg <= 0.0) {
            cumulative_km_.clear();
            throw std::invalid_argument("consecutive lane points must be distinct");
        }
        cumulative_km_.push_back(cumulative_km_.back() + seg);
    }
}

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        const double v = (q - p).cross(r - p);
        return (v > 0.0) - (v < 0.0);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4;
}

void validate_polygon(const LanePolygon& poly) {
    const auto& b = poly.boundary;
    if (b.size() < 4) {
        throw std::invalid_argument("polygon needs at least 4 points");
    }
    const size_t n = b.size();
    for (size_t i = 0; i < n; ++i) {
        const size_t j = (i + 1) % n;
        if (!poly.closed && j == 0) {
            continue;
        }
        if (b[i] == b[j]) {
            throw std::invalid_argument("polygon has repeated consecutive vertices");
        }
    }
    if (poly.closed) {
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                // Skip edges sharing a vertex.
                if (j == i || (j + 1) % n == i || (i + 1) % n == j) {
                    continue;
                }
                if (segments_intersect(b[i], b[(i + 1) % n], b[j], b[(j + 1) % n])) {
                    throw std::invalid_argument("polygon boundary self-intersects");
                }
            }
        }
    }
}

}  // namespace

LanePolyline polygon_to_polyline(const LanePolygon& poly) {
    validate_polygon(poly);
    const auto& b = poly.boundary;
    const size_t n = b.size();
    LanePolyline lane;
    const size_t edges = poly.closed ? n : n - 1;
    for (size_t k = 0; k < edges; ++k) {
        lane.points.push_back(0.5 * (b[k] + b[(k + 1) % n]));
    }
    lane.finalize();
    return lane;
}

Projection project_point(const LanePolyline& lane, const Vec2& p) {
    if (!lane.finalized()) {
        throw std::logic_error("lane not finalized");
    }
    Projection best;
    best.distance_km = std::numeric_limits<double>::infinity();
    const auto cum = lane.cumulative_km();
    for (size_t i = 0; i + 1 < lane.points.size(); ++i) {
        const Vec2 a = lane.points[i];
        const Vec2 ab = lane.points[i + 1] - a;
        const double len2 = ab.dot(ab);
        double t = (p - a).dot(ab) / len2;
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 foot = a + t * ab;
        const double d = distance_km(p, foot);
        if (d < best.distance_km) {
            best.foot = foot;
            best.distance_km = d;
            best.arc_length_km = cum[i] + t * std::sqrt(len2);
        }
    }
    return best;
}

ArcPoint point_at_arclength(const LanePolyline& lane, double s_km) {
    if (!lane.finalized()) {
        throw std::logic_error("lane not finalized");
    }
    if (s_km < 0.0) {
        throw std::invalid_argument("arc length must be non-negative");
    }
    const auto cum = lane.cumulative_km();
    if (s_km >= lane.total_length_km()) {
        return {lane.points.back(), s_km > lane.total_length_km()};
    }
    const auto it = std::upper_bound(cum.begin(), cum.end(), s_km);
    const size_t i = static_cast<size_t>(it - cum.begin()) - 1;
    const double seg_len = cum[i + 1] - cum[i];
    const double t = (s_km - cum[i]) / seg_len;
    return {lane.points[i] + t * (lane.points[i + 1] - lane.points[i]), false};
}

void LaneNetwork::add_lane(LanePolyline lane) {
    if (!lane.finalized()) {
        lane.finalize();
    }
    if (index_.contains(lane.lane_id)) {
        throw std::invalid_argument("duplicate lane id " + std::to_string(lane.lane_id));
    }
    index_[lane.lane_id] = lanes_.size();
    lanes_.push_back(std::move(lane));
    grid_.clear();
}

int64_t LaneNetwork::cell_key(int cx, int cy) const {
    return (static_cast<int64_t>(cx) << 32) ^ (static_cast<int64_t>(cy) & 0xFFFFFFFFll);
}

void LaneNetwork::finalize(double cell_size_km) {
    for (const LanePolyline& lane : lanes_) {
        for (int ref : lane.successors) {
            if (!index_.contains(ref)) {
                throw SchemaError("lane " + std::to_string(lane.lane_id) +
                                  " references unknown successor " + std::to_string(ref));
            }
        }
        for (int ref : lane.predecessors) {
            if (!index_.contains(ref)) {
                throw SchemaError("lane " + std::to_string(lane.lane_id) +
                                  " references unknown predecessor " + std::to_string(ref));
            }
        }
    }
    cell_size_km_ = cell_size_km;
    grid_.clear();
    for (const LanePolyline& lane : lanes_) {
        for (size_t i = 0; i + 1 < lane.points.size(); ++i) {
            const Vec2 a = lane.points[i];
            const Vec2 b = lane.points[i + 1];
            const int cx0 = static_cast<int>(std::floor(std::min(a.x_km, b.x_km) / cell_size_km_));
            const int cx1 = static_cast<int>(std::floor(std::max(a.x_km, b.x_km) / cell_size_km_));
            const int cy0 = static_cast<int>(std::floor(std::min(a.y_km, b.y_km) / cell_size_km_));
            const int cy1 = static_cast<int>(std::floor(std::max(a.y_km, b.y_km) / cell_size_km_));
            for (int cx = cx0; cx <= cx1; ++cx) {
                for (int cy = cy0; cy <= cy1; ++cy) {
                    auto& cell = grid_[cell_key(cx, cy)];
                    if (cell.empty() || cell.back() != lane.lane_id) {
                        cell.push_back(lane.lane_id);
                    }
                }
            }
        }
    }
}

const LanePolyline& LaneNetwork::lane(int lane_id) const {
    const auto it = index_.find(lane_id);
    if (it == index_.end()) {
        throw std::invalid_argument("unknown lane id " + std::to_string(lane_id));
    }
    return lanes_[it->second];
}

std::vector<int> LaneNetwork::candidate_lanes(const Vec2& p, double d_km) const {
    if (!(d_km > 0.0)) {
        throw std::invalid_argument("candidate distance must be positive");
    }
    std::set<int> shortlist;
    if (grid_.empty()) {
        for (const LanePolyline& lane : lanes_) {
            shortlist.insert(lane.lane_id);
        }
    } else {
        const int cx0 = static_cast<int>(std::floor((p.x_km - d_km) / cell_size_km_));
        const int cx1 = static_cast<int>(std::floor((p.x_km + d_km) / cell_size_km_));
        const int cy0 = static_cast<int>(std::floor((p.y_km - d_km) / cell_size_km_));
        const int cy1 = static_cast<int>(std::floor((p.y_km + d_km) / cell_size_km_));
        for (int cx = cx0; cx <= cx1; ++cx) {
            for (int cy = cy0; cy <= cy1; ++cy) {
                const auto it = grid_.find(cell_key(cx, cy));
                if (it != grid_.end()) {
                    shortlist.insert(it->second.begin(), it->second.end());
                }
            }
        }
    }
    std::vector<int> out;
    for (int id : shortlist) {
        if (project_point(lane(id), p).distance_km <= d_km) {
            out.push_back(id);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// File format: JSON document {version, units, lanes:[...]}; see
// docs/network-format.md. Coordinates are km in the flat frame.

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr double kChordDeviationWarnKm = 0.25e-3;  // quarter lane width

json require_field(const json& obj, const char* name, const std::string& where) {
    if (!obj.contains(name)) {
        throw SchemaError("missing field '" + std::string(name) + "' in " + where);
    }
    return obj.at(name);
}

std::vector<Vec2> parse_points(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.size() < 2) {
        throw SchemaError("'points' must be an array of >= 2 [x, y] pairs in " + where);
    }
    std::vector<Vec2> pts;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw SchemaError("point entries must be [x_km, y_km] pairs in " + where);
        }
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return pts;
}

// Sagitta of each interior vertex's local circumcircle against its chord.
void warn_on_coarse_shape(const LanePolyline& lane, LoadReport* report) {
    if (report == nullptr) {
        return;
    }
    for (size_t i = 1; i + 1 < lane.points.size(); ++i) {
        const Vec2 a = lane.points[i - 1];
        const Vec2 b = lane.points[i];
        const Vec2 c = lane.points[i + 1];
        const double cross = (b - a).cross(c - a);
        if (cross == 0.0) {
            continue;
        }
        const double la = distance_km(b, c);
        const double lb = distance_km(a, c);
        const double lc = distance_km(a, b);
        const double r = la * lb * lc / (2.0 * std::abs(cross));
        const double half_chord = 0.5 * std::max(la, lc);
        if (half_chord < r) {
            const double sagitta = r - std::sqrt(r * r - half_chord * half_chord);
            if (sagitta > kChordDeviationWarnKm) {
                report->warnings.push_back(
                    "lane " + std::to_string(lane.lane_id) +
                    ": chord-to-arc deviation exceeds 0.25 m near shape point " +
                    std::to_string(i));
                break;
            }
        }
    }
}

}  // namespace

LaneNetwork parse_network_json(const std::string& text, LoadReport* report) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("network file is not valid JSON: ") + e.what());
    }
    if (require_field(doc, "version", "document").get<int>() != kFormatVersion) {
        throw SchemaError("unsupported network format version");
    }
    if (require_field(doc, "units", "document").get<std::string>() != "km") {
        throw SchemaError("field 'units' must be \"km\"");
    }
    LaneNetwork net;
    const json lanes = require_field(doc, "lanes", "document");
    if (!lanes.is_array()) {
        throw SchemaError("'lanes' must be an array");
    }
    for (size_t i = 0; i < lanes.size(); ++i) {
        const json& rec = lanes[i];
        const std::string where = "lanes[" + std::to_string(i) + "]";
        LanePolyline lane;
        lane.lane_id = require_field(rec, "lane_id", where).get<int>();
        const std::string kind = rec.value("kind", std::string("polyline"));
        const auto pts = parse_points(require_field(rec, "points", where), where);
        if (kind == "polyline") {
            lane.points = pts;
        } else if (kind == "polygon") {
            LanePolygon poly{pts, rec.value("closed", true)};
            try {
                lane.points = polygon_to_polyline(poly).points;
            } catch (const std::invalid_argument& e) {
                throw SchemaError(where + ": " + e.what());
            }
            if (report != nullptr) {
                ++report->converted_polygons;
                report->warnings.push_back(where + ": polygon record converted to polyline");
            }
        } else {
            throw SchemaError("unknown lane kind '" + kind + "' in " + where);
        }
        lane.width_m = rec.value("width_m", 3.6);
        lane.successors = rec.value("successors", std::vector<int>{});
        lane.predecessors = rec.value("predecessors", std::vector<int>{});
        try {
            lane.finalize();
        } catch (const std::invalid_argument& e) {
            throw SchemaError(where + ": " + e.what());
        }
        warn_on_coarse_shape(lane, report);
        try {
            net.add_lane(std::move(lane));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }
    net.finalize();
    return net;
}

std::string network_to_json(const LaneNetwork& network) {
    json lanes = json::array();
    for (const LanePolyline& lane : network.lanes()) {
        json pts = json::array();
        for (const Vec2& p : lane.points) {
            pts.push_back({p.x_km, p.y_km});
        }
        lanes.push_back({{"lane_id", lane.lane_id},
                         {"kind", "polyline"},
                         {"points", pts},
                         {"width_m", lane.width_m},
                         {"successors", lane.successors},
                         {"predecessors", lane.predecessors}});
    }
    const json doc = {{"version", kFormatVersion}, {"units", "km"}, {"lanes", lanes}};
    return doc.dump(2) + "\n";
}

LaneNetwork load_network(const std::string& path, LoadReport* report) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open network file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network_json(buf.str(), report);
}

void save_network(const LaneNetwork& network, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write network file: " + path);
    }
    out << network_to_json(network);
}

}  // namespace avl
