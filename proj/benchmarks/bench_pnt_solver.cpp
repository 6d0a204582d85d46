#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "avl/constellation.hpp"
#include "avl/pnt_solver.hpp"

namespace {

struct Instance {
    std::vector<avl::SatelliteState> sats;
    std::vector<avl::PseudorangeObservation> obs;
    avl::CartesianCoord truth;
};

Instance make_instance() {
    Instance in;
    in.truth = {554.0, 907.0, 0.0};
    const avl::EarthModel earth;
    const double c = earth.speed_of_light_km_per_s;
    const double b = 0.5e-3;
    const std::vector<avl::CartesianCoord> sat_pos{
        {20000.0, 0.0, 20000.0},  {-14000.0, 14000.0, 20000.0},
        {0.0, -20000.0, 20000.0}, {5000.0, 5000.0, 26000.0},
        {-8000.0, -3000.0, 26000.0}, {15000.0, -9000.0, 22000.0}};
    int prn = 1;
    for (const auto& p : sat_pos) {
        const double range = (p - in.truth).norm();
        in.sats.push_back({prn, p, 0.0, true});
        in.obs.push_back({prn, 0.0, range / c + b, range + b * c});
        ++prn;
    }
    return in;
}

void BM_SolveThreeSphere(benchmark::State& state) {
    const Instance in = make_instance();
    const std::span<const avl::PseudorangeObservation> obs3(in.obs.data(), 3);
    const std::span<const avl::SatelliteState> sats3(in.sats.data(), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(avl::solve_three_sphere(obs3, sats3));
    }
}
BENCHMARK(BM_SolveThreeSphere);

void BM_SolveIterative(benchmark::State& state) {
    const Instance in = make_instance();
    const avl::CartesianCoord guess{0.0, 0.0, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(avl::solve_iterative(in.obs, in.sats, guess));
    }
}
BENCHMARK(BM_SolveIterative);

}  // namespace
