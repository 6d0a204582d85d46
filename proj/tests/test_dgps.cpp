#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "avl/dgps.hpp"
#include "avl/errors.hpp"
#include "support/oracles.hpp"

using namespace avl;

static const EarthModel kEarth;
static const double kC = kEarth.speed_of_light_km_per_s;

namespace {

std::vector<SatelliteState> test_sats() {
    return {{1, {20000.0, 0.0, 20000.0}, 0.0, true},
            {2, {-14000.0, 14000.0, 20000.0}, 0.0, true},
            {3, {0.0, -20000.0, 22000.0}, 0.0, true},
            {4, {5000.0, 5000.0, 26000.0}, 0.0, true}};
}

CorrectionMessage random_message(std::mt19937_64& rng) {
    CorrectionMessage msg;
    msg.epoch_time_s = static_cast<uint32_t>(rng() % 604800);
    msg.station_id = static_cast<uint16_t>(rng() % 4096);
    const int n = 1 + static_cast<int>(rng() % 12);
    std::uniform_real_distribution<double> corr(-1000.0, 1000.0);
    for (int i = 0; i < n; ++i) {
        const double quantized =
            std::nearbyint(corr(rng) / kCorrectionResolutionM) * kCorrectionResolutionM;
        msg.entries.push_back({1 + i, quantized});
    }
    return msg;
}

}  // namespace

TEST_CASE("corrections vanish on perfect observations") {
    const CartesianCoord base{0.0, 0.0, 0.0};
    const auto sats = test_sats();
    const auto obs = oracle::exact_observations(base, sats);
    const ComputedCorrections cc = compute_corrections(base, obs, sats, 100, 7);
    CHECK(cc.skipped == 0);
    CHECK(cc.message.entries.size() == 4);
    for (const auto& e : cc.message.entries) {
        CHECK(e.range_correction_m == 0.0);
    }
}

TEST_CASE("iono delay on one satellite maps to minus c times the delay") {
    const CartesianCoord base{0.0, 0.0, 0.0};
    const auto sats = test_sats();
    const double delay = 50e-9;
    std::vector<double> delays{delay, 0.0, 0.0, 0.0};
    const auto obs = oracle::exact_observations(base, sats, 0.0, delays);
    const ComputedCorrections cc = compute_corrections(base, obs, sats, 100, 7);
    CHECK(std::abs(cc.message.entries[0].range_correction_m - (-kC * delay * 1e3)) <=
          kCorrectionResolutionM / 2.0);
    CHECK(cc.message.entries[1].range_correction_m == 0.0);
}

TEST_CASE("the base removes its own solved clock bias first") {
    const CartesianCoord base{100.0, 200.0, 0.0};
    const auto sats = test_sats();
    const double b = 1e-3;
    const auto obs = oracle::exact_observations(base, sats, b);
    const ComputedCorrections cc = compute_corrections(base, obs, sats, 100, 7, b);
    for (const auto& e : cc.message.entries) {
        CHECK(std::abs(e.range_correction_m) <= kCorrectionResolutionM / 2.0);
    }
}

TEST_CASE("unknown satellites are skipped with a count") {
    const CartesianCoord base{0.0, 0.0, 0.0};
    auto sats = test_sats();
    auto obs = oracle::exact_observations(base, sats);
    obs.push_back(obs.back());
    obs.back().prn_id = 31;
    const ComputedCorrections cc = compute_corrections(base, obs, sats, 100, 7);
    CHECK(cc.skipped == 1);
    CHECK(cc.message.entries.size() == 4);
}

TEST_CASE("corrections beyond the representable span are rejected") {
    const CartesianCoord base{0.0, 0.0, 0.0};
    const auto sats = test_sats();
    auto obs = oracle::exact_observations(base, sats);
    obs[0].pseudorange_km += 1100.0;  // > 2^20 m
    CHECK_THROWS_AS(compute_corrections(base, obs, sats, 100, 7), EncodingError);
}

TEST_CASE("wire codec") {
    SUBCASE("single-satellite message is exactly 12 bytes") {
        CorrectionMessage msg;
        msg.epoch_time_s = 12345;
        msg.station_id = 99;
        msg.entries.push_back({7, -12.625});
        const auto bytes = encode(msg);
        CHECK(bytes.size() == 12);
        CHECK(decode(bytes) == msg);
    }
    SUBCASE("random round trips") {
        std::mt19937_64 rng(17);
        for (int i = 0; i < 500; ++i) {
            const CorrectionMessage msg = random_message(rng);
            CHECK(decode(encode(msg)) == msg);
        }
    }
    SUBCASE("flipped bit fails the crc") {
        std::mt19937_64 rng(18);
        auto bytes = encode(random_message(rng));
        bytes[3] ^= 0x10;
        CHECK_THROWS_AS(decode(bytes), CrcError);
    }
    SUBCASE("truncated buffer rejected") {
        std::mt19937_64 rng(19);
        auto bytes = encode(random_message(rng));
        bytes.pop_back();
        CHECK_THROWS_AS(decode(bytes), EncodingError);
    }
}

TEST_CASE("applying corrections") {
    const auto sats = test_sats();

    SUBCASE("zero corrections leave observations unchanged") {
        const auto obs = oracle::exact_observations({1.0, 2.0, 0.0}, sats);
        CorrectionMessage msg;
        msg.epoch_time_s = 10;
        for (const auto& s : sats) {
            msg.entries.push_back({s.prn_id, 0.0});
        }
        const CorrectedObservations co = apply_corrections(obs, msg, 20.0);
        for (size_t i = 0; i < obs.size(); ++i) {
            CHECK(co.observations[i].pseudorange_km == obs[i].pseudorange_km);
            CHECK(co.corrected[i]);
        }
    }
    SUBCASE("co-located base and rover cancel identical errors") {
        const CartesianCoord here{50.0, 60.0, 0.0};
        std::vector<double> delays{40e-9, 55e-9, 33e-9, 48e-9};
        const auto base_obs = oracle::exact_observations(here, sats, 0.0, delays);
        const auto rover_obs = oracle::exact_observations(here, sats, 0.0, delays);
        const ComputedCorrections cc = compute_corrections(here, base_obs, sats, 0, 1);
        const CorrectedObservations co = apply_corrections(rover_obs, cc.message, 5.0);
        for (size_t i = 0; i < sats.size(); ++i) {
            const double range = distance_km(here, sats[i].position);
            CHECK(std::abs(co.observations[i].pseudorange_km - range) <=
                  kCorrectionResolutionM * 1e-3);
        }
    }
    SUBCASE("satellites without corrections pass through flagged") {
        const auto obs = oracle::exact_observations({0.0, 0.0, 0.0}, sats);
        CorrectionMessage msg;
        msg.epoch_time_s = 0;
        msg.entries.push_back({1, 1.0});
        const CorrectedObservations co = apply_corrections(obs, msg, 5.0);
        CHECK(co.corrected[0]);
        CHECK_FALSE(co.corrected[1]);
        CHECK(co.observations[1].pseudorange_km == obs[1].pseudorange_km);
    }
    SUBCASE("stale messages rejected at the boundary") {
        const auto obs = oracle::exact_observations({0.0, 0.0, 0.0}, sats);
        CorrectionMessage msg;
        msg.epoch_time_s = 100;
        CHECK_NOTHROW(apply_corrections(obs, msg, 130.0, 30.0));
        CHECK_THROWS_AS(apply_corrections(obs, msg, 131.0, 30.0), StaleCorrectionError);
    }
}

TEST_CASE("channel model") {
    CorrectionMessage msg;
    msg.epoch_time_s = 0;
    msg.entries.push_back({1, 0.0});
    const size_t bytes = encode(msg).size();

    SUBCASE("zero latency reduces to the transmission delay") {
        ChannelConfig cfg;
        cfg.latency_min_s = 0.0;
        cfg.latency_max_s = 0.0;
        const DeliveryEvent ev = channel_send(msg, 100.0, cfg, 1);
        CHECK_FALSE(ev.lost);
        CHECK(ev.bytes == bytes);
        CHECK(ev.t_arrive_s == doctest::Approx(100.0 + bytes * 8.0 / cfg.bandwidth_bps));
    }
    SUBCASE("latency draw stays within the configured bounds") {
        ChannelConfig cfg;
        for (uint64_t seed = 0; seed < 200; ++seed) {
            const DeliveryEvent ev = channel_send(msg, 0.0, cfg, seed);
            const double latency = ev.t_arrive_s - bytes * 8.0 / cfg.bandwidth_bps;
            CHECK(latency >= cfg.latency_min_s);
            CHECK(latency <= cfg.latency_max_s);
        }
    }
    SUBCASE("certain loss") {
        ChannelConfig cfg;
        cfg.loss_probability = 1.0;
        for (uint64_t seed = 0; seed < 20; ++seed) {
            CHECK(channel_send(msg, 0.0, cfg, seed).lost);
        }
    }
    SUBCASE("loss rate matches the configured probability") {
        ChannelConfig cfg;
        cfg.loss_probability = 0.1;
        int lost = 0;
        for (uint64_t seed = 0; seed < 10000; ++seed) {
            lost += channel_send(msg, 0.0, cfg, seed).lost ? 1 : 0;
        }
        CHECK(std::abs(lost / 10000.0 - 0.1) < 0.01);
    }
    SUBCASE("deterministic per seed") {
        ChannelConfig cfg;
        const DeliveryEvent a = channel_send(msg, 5.0, cfg, 42);
        const DeliveryEvent b = channel_send(msg, 5.0, cfg, 42);
        CHECK(a.t_arrive_s == b.t_arrive_s);
        CHECK(a.lost == b.lost);
    }
}
