#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "avl/bitio.hpp"
#include "avl/geodesy.hpp"

namespace avl {

inline constexpr int kChipsPerCode = 1023;
inline constexpr int kMinPrn = 1;
inline constexpr int kMaxPrn = 32;

inline constexpr int kFrameBits = 1500;
inline constexpr int kClockSectionBits = 300;     // 6 s at 50 bit/s
inline constexpr int kEphemerisSectionBits = 600; // 12 s
inline constexpr int kAlmanacSectionBits = 600;   // 12 s
inline constexpr int kAlmanacSlices = 25;

/// One repeat of a satellite's spreading code; chips are 0/1.
struct PrnCode {
    int prn_id = 0;
    std::array<uint8_t, kChipsPerCode> chips{};
};

PrnCode generate_ca_code(int prn_id);

/// All 32 codes, generated once.
const std::array<PrnCode, kMaxPrn>& ca_code_table();

/// Circular +-1 correlation of `received` against one code repeat at the
/// given chip lag. `received` must hold at least one full code period.
int correlate(std::span<const uint8_t> received, const PrnCode& code, int lag);

struct CodeLock {
    int prn_id;
    int lag;
    int peak;
};

/// Exhaustive search over all PRNs and lags; throws NoLockError when the
/// best peak falls below `threshold`.
CodeLock identify_satellite(std::span<const uint8_t> received, int threshold = 400);

enum class OrbitMode : uint8_t { Static = 0, Circular = 1 };

/// Orbit record broadcast by one satellite. Circular mode rotates the epoch
/// position about `rotation_axis` (through the frame origin) at a constant
/// angular rate.
struct Ephemeris {
    int prn_id = 0;
    OrbitMode mode = OrbitMode::Static;
    double epoch_time_s = 0.0;
    CartesianCoord position_at_epoch;
    CartesianCoord rotation_axis{0.0, 0.0, 1.0};
    double angular_rate_rad_per_s = 0.0;
    double clock_offset_s = 0.0;
    double validity_span_s = 4.0 * 3600.0;

    bool operator==(const Ephemeris&) const = default;
};

struct AlmanacEntry {
    int prn_id = 0;
    bool healthy = true;
    CartesianCoord coarse_position;
    double clock_offset_s = 0.0;

    bool operator==(const AlmanacEntry&) const = default;
};

struct Almanac {
    std::vector<AlmanacEntry> entries;
    double iono_delay_s = 0.0;  // scalar ionospheric model

    bool operator==(const Almanac&) const = default;
};

struct ClockData {
    uint16_t week = 0;
    uint32_t time_of_week_s = 0;
    double clock_offset_s = 0.0;
    uint8_t health = 0;

    bool operator==(const ClockData&) const = default;
};

/// One 1/25th chunk of the serialized almanac bit stream.
struct AlmanacSlice {
    uint8_t index = 0;
    BitVec bits;

    bool operator==(const AlmanacSlice&) const = default;
};

struct NavFrame {
    BitVec bits;  // exactly kFrameBits

    std::span<const uint8_t> clock_section() const;
    std::span<const uint8_t> ephemeris_section() const;
    std::span<const uint8_t> almanac_section() const;
};

struct ParsedFrame {
    uint8_t frame_index = 0;
    int prn_id = 0;
    ClockData clock;
    Ephemeris ephemeris;
    AlmanacSlice almanac_slice;
};

/// Snaps every real-valued field to its wire resolution. Frame codecs
/// round-trip exactly on quantized records.
Ephemeris quantize(const Ephemeris& e);
ClockData quantize(const ClockData& c);
Almanac quantize(const Almanac& a);

BitVec serialize_almanac(const Almanac& a);
Almanac deserialize_almanac(std::span<const uint8_t> bits);
std::vector<AlmanacSlice> almanac_slices(const Almanac& a);
/// Accepts the 25 slices in any order; throws on missing or duplicate index.
Almanac reassemble_almanac(std::span<const AlmanacSlice> slices);

NavFrame build_nav_frame(const Ephemeris& eph, const AlmanacSlice& alm_slice,
                         const ClockData& clock, int frame_index);
ParsedFrame parse_nav_frame(std::span<const uint8_t> bits);

/// Short acquisition message: 6-bit PRN + 64-bit fixed-point time-of-week
/// (2^-20 s resolution) + CRC-16 = 86 bits.
struct CompactMessage {
    int prn_id = 0;
    double transmit_time_s = 0.0;

    bool operator==(const CompactMessage&) const = default;
};

inline constexpr int kCompactMessageBits = 86;

BitVec build_compact_message(int prn_id, double transmit_time_s);
CompactMessage parse_compact_message(std::span<const uint8_t> bits);

}  // namespace avl
