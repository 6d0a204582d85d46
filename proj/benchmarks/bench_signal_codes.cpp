#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "avl/signal_codes.hpp"

namespace {

std::vector<uint8_t> received_for(int prn, int lag, double flip_rate, uint64_t seed) {
    const avl::PrnCode code = avl::generate_ca_code(prn);
    std::vector<uint8_t> rx(avl::kChipsPerCode);
    for (int i = 0; i < avl::kChipsPerCode; ++i) {
        rx[i] = code.chips[(i + lag) % avl::kChipsPerCode];
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution flip(flip_rate);
    for (auto& chip : rx) {
        if (flip(rng)) {
            chip ^= 1;
        }
    }
    return rx;
}

void BM_GenerateCaCode(benchmark::State& state) {
    int prn = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(avl::generate_ca_code(prn));
        prn = prn % avl::kMaxPrn + 1;
    }
}
BENCHMARK(BM_GenerateCaCode);

void BM_CorrelateSingleLag(benchmark::State& state) {
    const auto rx = received_for(7, 131, 0.0, 42);
    const avl::PrnCode code = avl::generate_ca_code(7);
    int lag = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(avl::correlate(rx, code, lag));
        lag = (lag + 1) % avl::kChipsPerCode;
    }
}
BENCHMARK(BM_CorrelateSingleLag);

void BM_IdentifySatellite(benchmark::State& state) {
    const auto rx = received_for(19, 500, 0.1, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(avl::identify_satellite(rx));
    }
}
BENCHMARK(BM_IdentifySatellite);

}  // namespace
