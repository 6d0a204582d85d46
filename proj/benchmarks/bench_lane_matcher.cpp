#include <benchmark/benchmark.h>

#include "avl/lane_matcher.hpp"
#include "avl/network_gen.hpp"

namespace {

void BM_MatchLane(benchmark::State& state) {
    avl::NetworkGenSpec spec;
    spec.lanes = 3;
    spec.straight_km = 5.0;
    spec.arc_radius_km = 0.5;
    spec.arc_deg = 90.0;
    spec.tail_km = 2.0;
    const avl::LaneNetwork net = avl::generate_lane_grid(spec);

    avl::TrajectoryWindow window(10);
    const avl::LanePolyline& lane = net.lane(2);
    for (int i = 0; i < 10; ++i) {
        window.push_fix(i, avl::point_at_arclength(lane, 1.0 + 0.015 * i).point);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(avl::match_lane(window, net, 0.01));
    }
}
BENCHMARK(BM_MatchLane);

void BM_CandidateLanes(benchmark::State& state) {
    avl::NetworkGenSpec spec;
    spec.lanes = 8;
    spec.straight_km = 20.0;
    const avl::LaneNetwork net = avl::generate_lane_grid(spec);
    const avl::Vec2 p{10.0, 0.01};
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.candidate_lanes(p, 0.02));
    }
}
BENCHMARK(BM_CandidateLanes);

}  // namespace

BENCHMARK_MAIN();
