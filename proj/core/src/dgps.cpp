#include "avl/dgps.hpp"

#include <cmath>
#include <random>

#include "avl/bitio.hpp"
#include "avl/errors.hpp"

namespace avl {

namespace {

double quantize_correction(double correction_m) {
    const double q = std::nearbyint(correction_m / kCorrectionResolutionM) *
                     kCorrectionResolutionM;
    if (std::abs(q) >= kCorrectionSpanM) {
        throw EncodingError("pseudorange correction exceeds wire span");
    }
    return q;
}

}  // namespace

ComputedCorrections compute_corrections(const CartesianCoord& base_truth,
                                        std::span<const PseudorangeObservation> obs,
                                        std::span<const SatelliteState> sats,
                                        uint32_t epoch_time_s, uint16_t station_id,
                                        double base_clock_bias_s, const EarthModel& earth) {
    if (obs.empty()) {
        throw std::invalid_argument("no observations to correct");
    }
    ComputedCorrections out;
    out.message.epoch_time_s = epoch_time_s;
    out.message.station_id = station_id;
    for (const PseudorangeObservation& o : obs) {
        const SatelliteState* sat = nullptr;
        for (const SatelliteState& s : sats) {
            if (s.prn_id == o.prn_id) {
                sat = &s;
                break;
            }
        }
        if (sat == nullptr) {
            ++out.skipped;
            continue;
        }
        const double range_km = distance_km(base_truth, sat->position);
        const double measured_km =
            o.pseudorange_km - base_clock_bias_s * earth.speed_of_light_km_per_s;
        const double correction_m = (range_km - measured_km) * 1000.0;
        out.message.entries.push_back({o.prn_id, quantize_correction(correction_m)});
    }
    return out;
}

std::vector<uint8_t> encode(const CorrectionMessage& msg) {
    if (msg.entries.size() > 63) {
        throw EncodingError("correction message holds at most 63 satellites");
    }
    if (msg.station_id >= 4096) {
        throw EncodingError("station id exceeds 12 bits");
    }
    BitWriter w;
    w.write(msg.epoch_time_s, 32);
    w.write(msg.station_id, 12);
    w.write(msg.entries.size(), 6);
    for (const CorrectionEntry& e : msg.entries) {
        if (e.prn_id < 0 || e.prn_id >= 64) {
            throw EncodingError("prn id exceeds 6 bits");
        }
        w.write(static_cast<uint64_t>(e.prn_id), 6);
        w.write_signed(to_fixed(e.range_correction_m, 3, 24), 24);
    }
    const uint16_t crc = crc16_ccitt(w.bits());
    w.write(crc, 16);
    return bits_to_bytes(w.bits());
}

CorrectionMessage decode(std::span<const uint8_t> bytes) {
    if (bytes.size() * 8 < 32 + 12 + 6 + 16) {
        throw EncodingError("correction message truncated");
    }
    // Count field determines the true bit length; re-check buffer size, then CRC.
    const BitVec all = bytes_to_bits(bytes, bytes.size() * 8);
    BitReader header(all);
    header.read(32);
    header.read(12);
    const auto count = header.read(6);
    const size_t total_bits = 32 + 12 + 6 + count * 30 + 16;
    if (all.size() < total_bits) {
        throw EncodingError("correction message truncated");
    }
    const std::span<const uint8_t> bits(all.data(), total_bits);
    const uint16_t computed = crc16_ccitt(bits.first(total_bits - 16));

    BitReader r(bits);
    CorrectionMessage msg;
    msg.epoch_time_s = static_cast<uint32_t>(r.read(32));
    msg.station_id = static_cast<uint16_t>(r.read(12));
    r.read(6);
    for (uint64_t i = 0; i < count; ++i) {
        CorrectionEntry e;
        e.prn_id = static_cast<int>(r.read(6));
        e.range_correction_m = from_fixed(r.read_signed(24), 3);
        msg.entries.push_back(e);
    }
    if (computed != static_cast<uint16_t>(r.read(16))) {
        throw CrcError("correction message checksum mismatch");
    }
    return msg;
}

CorrectedObservations apply_corrections(std::span<const PseudorangeObservation> obs,
                                        const CorrectionMessage& msg, double now_s,
                                        double max_age_s, const EarthModel& earth) {
    if (now_s - static_cast<double>(msg.epoch_time_s) > max_age_s) {
        throw StaleCorrectionError("correction message older than max age");
    }
    CorrectedObservations out;
    for (const PseudorangeObservation& o : obs) {
        PseudorangeObservation c = o;
        bool applied = false;
        for (const CorrectionEntry& e : msg.entries) {
            if (e.prn_id == o.prn_id) {
                c.pseudorange_km += e.range_correction_m / 1000.0;
                c.receive_time_s =
                    c.transmit_time_s + c.pseudorange_km / earth.speed_of_light_km_per_s;
                applied = true;
                break;
            }
        }
        out.observations.push_back(c);
        out.corrected.push_back(applied);
    }
    return out;
}

DeliveryEvent channel_send(const CorrectionMessage& msg, double t_send_s,
                           const ChannelConfig& cfg, uint64_t rng_seed) {
    DeliveryEvent ev;
    ev.bytes = encode(msg).size();
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double latency =
        cfg.latency_min_s + (cfg.latency_max_s - cfg.latency_min_s) * unit(rng);
    ev.lost = unit(rng) < cfg.loss_probability;
    ev.t_arrive_s = t_send_s + latency + static_cast<double>(ev.bytes) * 8.0 / cfg.bandwidth_bps;
    return ev;
}

}  // namespace avl
