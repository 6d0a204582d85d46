#include "avl/lane_matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace avl {

TrajectoryWindow::TrajectoryWindow(size_t capacity) : capacity_(capacity) {
    if (capacity < 2) {
        throw std::invalid_argument("trajectory window capacity must be >= 2");
    }
}

void TrajectoryWindow::push_fix(double t_s, const Vec2& position) {
    if (!fixes_.empty() && t_s <= fixes_.back().t_s) {
        throw std::invalid_argument("fix timestamp must be strictly increasing");
    }
    fixes_.push_back({t_s, position});
    if (fixes_.size() > capacity_) {
        fixes_.pop_front();
    }
}

CorrespondingSegment corresponding_segment(const LanePolyline& lane,
                                           const TrajectoryWindow& window) {
    if (!window.full()) {
        throw std::invalid_argument("trajectory window is not full");
    }
    const auto& fixes = window.fixes();

    CorrespondingSegment seg;
    seg.lane_id = lane.lane_id;
    seg.lane_width_m = lane.width_m;

    const Projection first = project_point(lane, fixes.front().position);
    seg.start_arc_length_km = first.arc_length_km;
    seg.points.push_back(first.foot);

    double s = first.arc_length_km;
    for (size_t k = 1; k < fixes.size(); ++k) {
        s += distance_km(fixes[k - 1].position, fixes[k].position);
        const ArcPoint ap = point_at_arclength(lane, s);
        seg.points.push_back(ap.point);
        if (ap.overflowed) {
            seg.overflowed = true;
        }
    }
    if (seg.overflowed) {
        seg.missing_length_km = s - lane.total_length_km();
    }
    return seg;
}

namespace {

// Shoelace area of the quadrilateral (a, b, c, d), evaluated relative to the
// first vertex so translations of the whole scene cancel exactly.
double quad_area(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const Vec2 u = b - a;
    const Vec2 v = c - a;
    const Vec2 w = d - a;
    return 0.5 * std::abs(u.cross(v) + v.cross(w));
}

}  // namespace

double curve_distance(const TrajectoryWindow& window, const CorrespondingSegment& segment) {
    const auto& fixes = window.fixes();
    if (fixes.size() != segment.points.size()) {
        throw std::invalid_argument("window and corresponding segment sizes differ");
    }
    double area = 0.0;
    for (size_t k = 0; k + 1 < fixes.size(); ++k) {
        area += quad_area(fixes[k].position, fixes[k + 1].position, segment.points[k + 1],
                          segment.points[k]);
    }
    // A lane that ends mid-window pays one lane width per missing metre.
    area += (segment.lane_width_m * 1e-3) * segment.missing_length_km;
    return area;
}

MatchResult match_lane(const TrajectoryWindow& window, const LaneNetwork& network,
                       double d_km, std::optional<int> prior) {
    if (!window.full()) {
        throw std::invalid_argument("trajectory window is not full");
    }
    MatchResult result;
    result.epoch_s = window.fixes().back().t_s;

    const std::vector<int> candidates =
        network.candidate_lanes(window.fixes().front().position, d_km);
    if (candidates.empty()) {
        return result;
    }
    for (int id : candidates) {
        const CorrespondingSegment seg = corresponding_segment(network.lane(id), window);
        result.distances.emplace_back(id, curve_distance(window, seg));
    }

    double best = std::numeric_limits<double>::infinity();
    double runner_up = std::numeric_limits<double>::infinity();
    for (const auto& [id, dist] : result.distances) {
        if (dist < best) {
            runner_up = best;
            best = dist;
        } else if (dist < runner_up) {
            runner_up = dist;
        }
    }
    // Candidates are id-sorted, so the first tied entry is the lowest id;
    // the prior lane wins the tie when it is among the tied set.
    int chosen = -1;
    for (const auto& [id, dist] : result.distances) {
        if (dist == best) {
            if (chosen < 0) {
                chosen = id;
            }
            if (prior && id == *prior) {
                chosen = id;
                break;
            }
        }
    }
    result.lane_id = chosen;
    result.margin = runner_up - best;
    return result;
}

MatchResult LaneTracker::update(const TrajectoryWindow& window, const LaneNetwork& network) {
    MatchResult raw = match_lane(window, network, d_km_, committed_);
    if (!raw.lane_id) {
        pending_.reset();
        pending_count_ = 0;
        raw.lane_id = std::nullopt;
        return raw;
    }
    if (!committed_ || *raw.lane_id == *committed_) {
        if (!committed_) {
            committed_ = raw.lane_id;
        }
        pending_.reset();
        pending_count_ = 0;
    } else {
        if (pending_ && *pending_ == *raw.lane_id) {
            ++pending_count_;
        } else {
            pending_ = raw.lane_id;
            pending_count_ = 1;
        }
        if (pending_count_ >= commit_epochs_) {
            committed_ = pending_;
            pending_.reset();
            pending_count_ = 0;
        }
    }
    raw.lane_id = committed_;
    return raw;
}

}  // namespace avl
