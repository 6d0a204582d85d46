#pragma once

#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "avl/lane_map.hpp"

namespace avl {

struct TimedPoint {
    double t_s = 0.0;
    Vec2 position;
};

/// Sliding window of the last m position fixes (planar; z is dropped at the
/// matcher boundary). Timestamps must be strictly increasing.
class TrajectoryWindow {
public:
    explicit TrajectoryWindow(size_t capacity = 10);

    void push_fix(double t_s, const Vec2& position);
    bool full() const { return fixes_.size() == capacity_; }
    size_t size() const { return fixes_.size(); }
    size_t capacity() const { return capacity_; }
    const std::deque<TimedPoint>& fixes() const { return fixes_; }

private:
    size_t capacity_;
    std::deque<TimedPoint> fixes_;
};

/// The m lane points mirroring the window's step lengths, marched from the
/// perpendicular foot of the oldest window point.
struct CorrespondingSegment {
    int lane_id = 0;
    std::vector<Vec2> points;
    double start_arc_length_km = 0.0;
    bool overflowed = false;
    double missing_length_km = 0.0;  // arc length requested past the lane end
    double lane_width_m = 3.6;
};

CorrespondingSegment corresponding_segment(const LanePolyline& lane,
                                           const TrajectoryWindow& window);

/// Modified-area distance: per-step absolute shoelace quadrilateral area
/// between the two curves (km^2), plus width * missing-length when the lane
/// ended before the window did.
double curve_distance(const TrajectoryWindow& window, const CorrespondingSegment& segment);

struct MatchResult {
    double epoch_s = 0.0;
    std::optional<int> lane_id;
    std::vector<std::pair<int, double>> distances;  // lane id -> modified area
    double margin = 0.0;                            // runner-up minus winner
};

/// Argmin of curve_distance over lanes within d_km of the oldest window
/// point. Exact ties go to `prior` when tied, else to the lowest lane id.
MatchResult match_lane(const TrajectoryWindow& window, const LaneNetwork& network,
                       double d_km, std::optional<int> prior = std::nullopt);

/// Per-vehicle matcher state: a raw per-epoch winner only displaces the
/// committed lane after two consecutive epochs favoring it.
class LaneTracker {
public:
    explicit LaneTracker(double d_km = 0.01, int commit_epochs = 2)
        : d_km_(d_km), commit_epochs_(commit_epochs) {}

    MatchResult update(const TrajectoryWindow& window, const LaneNetwork& network);
    std::optional<int> current_lane() const { return committed_; }

private:
    double d_km_;
    int commit_epochs_;
    std::optional<int> committed_;
    std::optional<int> pending_;
    int pending_count_ = 0;
};

}  // namespace avl
