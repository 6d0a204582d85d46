#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "avl/constellation.hpp"
#include "avl/geodesy.hpp"

namespace avl {

/// One per-satellite scalar pseudorange correction. Wire resolution is
/// 2^-3 m in a signed 24-bit field, so |correction| < 2^20 m.
struct CorrectionEntry {
    int prn_id = 0;
    double range_correction_m = 0.0;

    bool operator==(const CorrectionEntry&) const = default;
};

struct CorrectionMessage {
    uint32_t epoch_time_s = 0;
    uint16_t station_id = 0;  // 12-bit on the wire
    std::vector<CorrectionEntry> entries;

    bool operator==(const CorrectionMessage&) const = default;
};

inline constexpr double kCorrectionResolutionM = 0.125;
inline constexpr double kCorrectionSpanM = 1048576.0;  // 2^20

struct ComputedCorrections {
    CorrectionMessage message;
    int skipped = 0;  // observations without a matching satellite state
};

/// correction = geometric_range(base, sat) - measured_pseudorange, with the
/// base receiver's own solved clock bias removed first.
ComputedCorrections compute_corrections(const CartesianCoord& base_truth,
                                        std::span<const PseudorangeObservation> obs,
                                        std::span<const SatelliteState> sats,
                                        uint32_t epoch_time_s, uint16_t station_id,
                                        double base_clock_bias_s = 0.0,
                                        const EarthModel& earth = {});

std::vector<uint8_t> encode(const CorrectionMessage& msg);
CorrectionMessage decode(std::span<const uint8_t> bytes);

struct CorrectedObservations {
    std::vector<PseudorangeObservation> observations;
    std::vector<bool> corrected;  // parallel to observations
};

/// Adds each matching correction onto the pseudorange; throws
/// StaleCorrectionError when the message is older than `max_age_s`.
CorrectedObservations apply_corrections(std::span<const PseudorangeObservation> obs,
                                        const CorrectionMessage& msg, double now_s,
                                        double max_age_s = 30.0,
                                        const EarthModel& earth = {});

struct ChannelConfig {
    double latency_min_s = 5.0;
    double latency_max_s = 10.0;
    double loss_probability = 0.0;
    double bandwidth_bps = 20000.0;
    double correction_period_s = 30.0;
};

struct DeliveryEvent {
    bool lost = false;
    double t_arrive_s = 0.0;
    size_t bytes = 0;
};

/// Draws one latency sample plus a loss coin from the seed; transmission
/// time is message size over bandwidth.
DeliveryEvent channel_send(const CorrectionMessage& msg, double t_send_s,
                           const ChannelConfig& cfg, uint64_t rng_seed);

}  // namespace avl
