#include "avl/signal_codes.hpp"

#include <algorithm>
#include <stdexcept>

#include "avl/errors.hpp"

namespace avl {

namespace {

// G2 phase-select taps per PRN (1-indexed stages).
constexpr std::array<std::pair<int, int>, 32> kG2Taps = {{
    {2, 6},  {3, 7},  {4, 8},  {5, 9},  {1, 9},  {2, 10}, {1, 8},  {2, 9},
    {3, 10}, {2, 3},  {3, 4},  {5, 6},  {6, 7},  {7, 8},  {8, 9},  {9, 10},
    {1, 4},  {2, 5},  {3, 6},  {4, 7},  {5, 8},  {6, 9},  {1, 3},  {4, 6},
    {5, 7},  {6, 8},  {7, 9},  {8, 10}, {1, 6},  {2, 7},  {3, 8},  {4, 9},
}};

inline int pm(uint8_t chip) { return chip ? -1 : 1; }

}  // namespace

PrnCode generate_ca_code(int prn_id) {
    if (prn_id < kMinPrn || prn_id > kMaxPrn) {
        throw std::invalid_argument("prn_id must be in [1, 32]");
    }
    const auto [t1, t2] = kG2Taps[prn_id - 1];

    std::array<uint8_t, 10> g1, g2;
    g1.fill(1);
    g2.fill(1);

    PrnCode code;
    code.prn_id = prn_id;
    for (int i = 0; i < kChipsPerCode; ++i) {
        code.chips[i] = static_cast<uint8_t>(g1[9] ^ g2[t1 - 1] ^ g2[t2 - 1]);
        const uint8_t g1_fb = g1[2] ^ g1[9];
        const uint8_t g2_fb =
            static_cast<uint8_t>(g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9]);
        std::rotate(g1.rbegin(), g1.rbegin() + 1, g1.rend());
        std::rotate(g2.rbegin(), g2.rbegin() + 1, g2.rend());
        g1[0] = g1_fb;
        g2[0] = g2_fb;
    }
    return code;
}

const std::array<PrnCode, kMaxPrn>& ca_code_table() {
    static const std::array<PrnCode, kMaxPrn> table = [] {
        std::array<PrnCode, kMaxPrn> t;
        for (int prn = kMinPrn; prn <= kMaxPrn; ++prn) {
            t[prn - 1] = generate_ca_code(prn);
        }
        return t;
    }();
    return table;
}

int correlate(std::span<const uint8_t> received, const PrnCode& code, int lag) {
    const size_t n = received.size();
    if (n < kChipsPerCode) {
        throw std::invalid_argument("received sequence shorter than one code period");
    }
    int sum = 0;
    for (int i = 0; i < kChipsPerCode; ++i) {
        sum += pm(received[(i + lag) % n]) * pm(code.chips[i]);
    }
    return sum;
}

CodeLock identify_satellite(std::span<const uint8_t> received, int threshold) {
    const size_t n = received.size();
    if (n < kChipsPerCode) {
        throw std::invalid_argument("received sequence shorter than one code period");
    }
    // +-1 copy, doubled so the circular lag becomes a plain offset.
    std::vector<int8_t> r(2 * n);
    for (size_t i = 0; i < n; ++i) {
        r[i] = r[i + n] = static_cast<int8_t>(pm(received[i]));
    }

    CodeLock best{0, 0, 0};
    for (const PrnCode& code : ca_code_table()) {
        std::array<int8_t, kChipsPerCode> c;
        for (int i = 0; i < kChipsPerCode; ++i) {
            c[i] = static_cast<int8_t>(pm(code.chips[i]));
        }
        for (size_t lag = 0; lag < n; ++lag) {
            int sum = 0;
            const int8_t* rp = r.data() + lag;
            for (int i = 0; i < kChipsPerCode; ++i) {
                sum += rp[i] * c[i];
            }
            if (sum > best.peak) {
                best = {code.prn_id, static_cast<int>(lag), sum};
            }
        }
    }
    if (best.peak < threshold) {
        throw NoLockError("correlation peak below lock threshold");
    }
    return best;
}

// ---------------------------------------------------------------------------
// Navigation message framing. Field layouts are fixed and documented in
// docs/wire-format.md; each section carries its own CRC-16 in the last
// 16 bits before the section boundary.

namespace {

constexpr int kClockPayloadBits = kClockSectionBits - 16;
constexpr int kEphPayloadBits = kEphemerisSectionBits - 16;
constexpr int kAlmPayloadBits = kAlmanacSectionBits - 16;
constexpr int kAlmChunkCapacityBits = kAlmPayloadBits - 24;  // index + length
constexpr uint8_t kPreamble = 0x8B;

void append_section(BitWriter& w, BitWriter&& payload, int payload_bits) {
    if (static_cast<int>(payload.size()) > payload_bits) {
        throw EncodingError("section payload overflow");
    }
    BitWriter padded;
    padded.append(payload.bits());
    padded.write(0, payload_bits - static_cast<int>(payload.size()));
    const uint16_t crc = crc16_ccitt(padded.bits());
    w.append(padded.bits());
    w.write(crc, 16);
}

BitVec checked_section(std::span<const uint8_t> section, const char* name) {
    const size_t payload_bits = section.size() - 16;
    BitReader crc_reader(section.subspan(payload_bits));
    const auto stored = static_cast<uint16_t>(crc_reader.read(16));
    if (crc16_ccitt(section.first(payload_bits)) != stored) {
        throw CrcError(std::string("bad checksum in ") + name + " section");
    }
    return BitVec(section.begin(), section.begin() + payload_bits);
}

}  // namespace

std::span<const uint8_t> NavFrame::clock_section() const {
    return std::span(bits).first(kClockSectionBits);
}
std::span<const uint8_t> NavFrame::ephemeris_section() const {
    return std::span(bits).subspan(kClockSectionBits, kEphemerisSectionBits);
}
std::span<const uint8_t> NavFrame::almanac_section() const {
    return std::span(bits).subspan(kClockSectionBits + kEphemerisSectionBits);
}

Ephemeris quantize(const Ephemeris& e) {
    Ephemeris q = e;
    q.epoch_time_s = static_cast<double>(static_cast<uint32_t>(e.epoch_time_s));
    q.position_at_epoch = {from_fixed(to_fixed(e.position_at_epoch.x_km, 20, 64), 20),
                           from_fixed(to_fixed(e.position_at_epoch.y_km, 20, 64), 20),
                           from_fixed(to_fixed(e.position_at_epoch.z_km, 20, 64), 20)};
    q.rotation_axis = {from_fixed(to_fixed(e.rotation_axis.x_km, 30, 32), 30),
                       from_fixed(to_fixed(e.rotation_axis.y_km, 30, 32), 30),
                       from_fixed(to_fixed(e.rotation_axis.z_km, 30, 32), 30)};
    q.angular_rate_rad_per_s = from_fixed(to_fixed(e.angular_rate_rad_per_s, 45, 64), 45);
    q.clock_offset_s = from_fixed(to_fixed(e.clock_offset_s, 40, 64), 40);
    q.validity_span_s = static_cast<double>(static_cast<uint32_t>(e.validity_span_s));
    return q;
}

ClockData quantize(const ClockData& c) {
    ClockData q = c;
    q.clock_offset_s = from_fixed(to_fixed(c.clock_offset_s, 40, 64), 40);
    return q;
}

Almanac quantize(const Almanac& a) {
    Almanac q = a;
    q.iono_delay_s = from_fixed(to_fixed(a.iono_delay_s, 40, 64), 40);
    for (AlmanacEntry& e : q.entries) {
        e.coarse_position = {from_fixed(to_fixed(e.coarse_position.x_km, 5, 32), 5),
                             from_fixed(to_fixed(e.coarse_position.y_km, 5, 32), 5),
                             from_fixed(to_fixed(e.coarse_position.z_km, 5, 32), 5)};
        e.clock_offset_s = from_fixed(to_fixed(e.clock_offset_s, 30, 32), 30);
    }
    return q;
}

BitVec serialize_almanac(const Almanac& a) {
    if (a.entries.empty() || a.entries.size() > 63) {
        throw EncodingError("almanac must hold 1..63 entries");
    }
    BitWriter w;
    w.write(a.entries.size(), 8);
    w.write_signed(to_fixed(a.iono_delay_s, 40, 64), 64);
    for (const AlmanacEntry& e : a.entries) {
        w.write(static_cast<uint64_t>(e.prn_id), 8);
        w.write(e.healthy ? 1 : 0, 8);
        w.write_signed(to_fixed(e.coarse_position.x_km, 5, 32), 32);
        w.write_signed(to_fixed(e.coarse_position.y_km, 5, 32), 32);
        w.write_signed(to_fixed(e.coarse_position.z_km, 5, 32), 32);
        w.write_signed(to_fixed(e.clock_offset_s, 30, 32), 32);
    }
    return w.bits();
}

Almanac deserialize_almanac(std::span<const uint8_t> bits) {
    BitReader r(bits);
    Almanac a;
    const auto count = r.read(8);
    a.iono_delay_s = from_fixed(r.read_signed(64), 40);
    for (uint64_t i = 0; i < count; ++i) {
        AlmanacEntry e;
        e.prn_id = static_cast<int>(r.read(8));
        e.healthy = r.read(8) != 0;
        e.coarse_position.x_km = from_fixed(r.read_signed(32), 5);
        e.coarse_position.y_km = from_fixed(r.read_signed(32), 5);
        e.coarse_position.z_km = from_fixed(r.read_signed(32), 5);
        e.clock_offset_s = from_fixed(r.read_signed(32), 30);
        a.entries.push_back(e);
    }
    return a;
}

std::vector<AlmanacSlice> almanac_slices(const Almanac& a) {
    const BitVec all = serialize_almanac(a);
    const size_t chunk = (all.size() + kAlmanacSlices - 1) / kAlmanacSlices;
    if (chunk > kAlmChunkCapacityBits) {
        throw EncodingError("almanac too large for 25 frame slices");
    }
    std::vector<AlmanacSlice> slices(kAlmanacSlices);
    for (int k = 0; k < kAlmanacSlices; ++k) {
        const size_t begin = std::min(all.size(), k * chunk);
        const size_t end = std::min(all.size(), (k + 1) * chunk);
        slices[k].index = static_cast<uint8_t>(k);
        slices[k].bits.assign(all.begin() + begin, all.begin() + end);
    }
    return slices;
}

Almanac reassemble_almanac(std::span<const AlmanacSlice> slices) {
    if (slices.size() != kAlmanacSlices) {
        throw EncodingError("almanac reassembly needs exactly 25 slices");
    }
    std::array<const AlmanacSlice*, kAlmanacSlices> by_index{};
    for (const AlmanacSlice& s : slices) {
        if (s.index >= kAlmanacSlices || by_index[s.index] != nullptr) {
            throw EncodingError("duplicate or out-of-range almanac slice index");
        }
        by_index[s.index] = &s;
    }
    BitVec all;
    for (const AlmanacSlice* s : by_index) {
        all.insert(all.end(), s->bits.begin(), s->bits.end());
    }
    return deserialize_almanac(all);
}

NavFrame build_nav_frame(const Ephemeris& eph, const AlmanacSlice& alm_slice,
                         const ClockData& clock, int frame_index) {
    if (frame_index < 0 || frame_index >= kAlmanacSlices) {
        throw std::invalid_argument("frame_index must be in [0, 25)");
    }
    BitWriter w;

    BitWriter clk;
    clk.write(kPreamble, 8);
    clk.write(static_cast<uint64_t>(frame_index), 8);
    clk.write(static_cast<uint64_t>(eph.prn_id), 8);
    clk.write(clock.week, 16);
    clk.write(clock.time_of_week_s, 32);
    clk.write_signed(to_fixed(clock.clock_offset_s, 40, 64), 64);
    clk.write(clock.health, 8);
    append_section(w, std::move(clk), kClockPayloadBits);

    BitWriter ep;
    ep.write(static_cast<uint64_t>(eph.prn_id), 8);
    ep.write(static_cast<uint64_t>(eph.mode), 8);
    ep.write(static_cast<uint32_t>(eph.epoch_time_s), 32);
    ep.write_signed(to_fixed(eph.position_at_epoch.x_km, 20, 64), 64);
    ep.write_signed(to_fixed(eph.position_at_epoch.y_km, 20, 64), 64);
    ep.write_signed(to_fixed(eph.position_at_epoch.z_km, 20, 64), 64);
    ep.write_signed(to_fixed(eph.rotation_axis.x_km, 30, 32), 32);
    ep.write_signed(to_fixed(eph.rotation_axis.y_km, 30, 32), 32);
    ep.write_signed(to_fixed(eph.rotation_axis.z_km, 30, 32), 32);
    ep.write_signed(to_fixed(eph.angular_rate_rad_per_s, 45, 64), 64);
    ep.write_signed(to_fixed(eph.clock_offset_s, 40, 64), 64);
    ep.write(static_cast<uint32_t>(eph.validity_span_s), 32);
    append_section(w, std::move(ep), kEphPayloadBits);

    if (alm_slice.bits.size() > kAlmChunkCapacityBits) {
        throw EncodingError("almanac slice exceeds section capacity");
    }
    BitWriter al;
    al.write(static_cast<uint64_t>(frame_index), 8);
    al.write(alm_slice.bits.size(), 16);
    al.append(alm_slice.bits);
    append_section(w, std::move(al), kAlmPayloadBits);

    return NavFrame{w.bits()};
}

ParsedFrame parse_nav_frame(std::span<const uint8_t> bits) {
    if (bits.size() != kFrameBits) {
        throw std::invalid_argument("navigation frame must be exactly 1500 bits");
    }
    ParsedFrame out;

    const BitVec clk = checked_section(bits.first(kClockSectionBits), "clock");
    BitReader cr(clk);
    if (cr.read(8) != kPreamble) {
        throw EncodingError("bad frame preamble");
    }
    out.frame_index = static_cast<uint8_t>(cr.read(8));
    out.prn_id = static_cast<int>(cr.read(8));
    out.clock.week = static_cast<uint16_t>(cr.read(16));
    out.clock.time_of_week_s = static_cast<uint32_t>(cr.read(32));
    out.clock.clock_offset_s = from_fixed(cr.read_signed(64), 40);
    out.clock.health = static_cast<uint8_t>(cr.read(8));

    const BitVec eph =
        checked_section(bits.subspan(kClockSectionBits, kEphemerisSectionBits), "ephemeris");
    BitReader er(eph);
    out.ephemeris.prn_id = static_cast<int>(er.read(8));
    out.ephemeris.mode = static_cast<OrbitMode>(er.read(8));
    out.ephemeris.epoch_time_s = static_cast<double>(er.read(32));
    out.ephemeris.position_at_epoch.x_km = from_fixed(er.read_signed(64), 20);
    out.ephemeris.position_at_epoch.y_km = from_fixed(er.read_signed(64), 20);
    out.ephemeris.position_at_epoch.z_km = from_fixed(er.read_signed(64), 20);
    out.ephemeris.rotation_axis.x_km = from_fixed(er.read_signed(32), 30);
    out.ephemeris.rotation_axis.y_km = from_fixed(er.read_signed(32), 30);
    out.ephemeris.rotation_axis.z_km = from_fixed(er.read_signed(32), 30);
    out.ephemeris.angular_rate_rad_per_s = from_fixed(er.read_signed(64), 45);
    out.ephemeris.clock_offset_s = from_fixed(er.read_signed(64), 40);
    out.ephemeris.validity_span_s = static_cast<double>(er.read(32));

    const BitVec alm =
        checked_section(bits.subspan(kClockSectionBits + kEphemerisSectionBits), "almanac");
    BitReader ar(alm);
    out.almanac_slice.index = static_cast<uint8_t>(ar.read(8));
    const auto chunk_bits = ar.read(16);
    if (chunk_bits > kAlmChunkCapacityBits) {
        throw EncodingError("almanac slice length out of range");
    }
    out.almanac_slice.bits = ar.read_bits(chunk_bits);

    return out;
}

BitVec build_compact_message(int prn_id, double transmit_time_s) {
    if (prn_id < kMinPrn || prn_id > kMaxPrn) {
        throw std::invalid_argument("prn_id must be in [1, 32]");
    }
    if (!(transmit_time_s >= 0.0)) {
        throw std::invalid_argument("transmit time must be non-negative");
    }
    BitWriter w;
    w.write(static_cast<uint64_t>(prn_id), 6);
    w.write(static_cast<uint64_t>(to_fixed(transmit_time_s, 20, 64)), 64);
    const uint16_t crc = crc16_ccitt(w.bits());
    w.write(crc, 16);
    return w.bits();
}

CompactMessage parse_compact_message(std::span<const uint8_t> bits) {
    if (bits.size() != kCompactMessageBits) {
        throw std::invalid_argument("compact message must be exactly 86 bits");
    }
    const uint16_t computed = crc16_ccitt(bits.first(70));
    BitReader r(bits);
    CompactMessage m;
    m.prn_id = static_cast<int>(r.read(6));
    m.transmit_time_s = from_fixed(static_cast<int64_t>(r.read(64)), 20);
    if (computed != static_cast<uint16_t>(r.read(16))) {
        throw CrcError("compact message checksum mismatch");
    }
    return m;
}

}  // namespace avl
