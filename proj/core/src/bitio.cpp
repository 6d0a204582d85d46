#include "avl/bitio.hpp"

#include <cmath>
#include <stdexcept>

#include "avl/errors.hpp"

namespace avl {

void BitWriter::write(uint64_t value, int n) {
    for (int i = n - 1; i >= 0; --i) {
        bits_.push_back(static_cast<uint8_t>((value >> i) & 1u));
    }
}

void BitWriter::write_signed(int64_t value, int n) {
    write(static_cast<uint64_t>(value), n);
}

void BitWriter::append(std::span<const uint8_t> bits) {
    bits_.insert(bits_.end(), bits.begin(), bits.end());
}

uint64_t BitReader::read(int n) {
    if (pos_ + static_cast<size_t>(n) > bits_.size()) {
        throw EncodingError("bit stream truncated");
    }
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
        v = (v << 1) | bits_[pos_++];
    }
    return v;
}

int64_t BitReader::read_signed(int n) {
    uint64_t v = read(n);
    if (n < 64 && (v & (uint64_t{1} << (n - 1)))) {
        v |= ~((uint64_t{1} << n) - 1);  // sign extend
    }
    return static_cast<int64_t>(v);
}

BitVec BitReader::read_bits(size_t n) {
    if (pos_ + n > bits_.size()) {
        throw EncodingError("bit stream truncated");
    }
    BitVec out(bits_.begin() + pos_, bits_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

std::vector<uint8_t> bits_to_bytes(std::span<const uint8_t> bits) {
    std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
        }
    }
    return out;
}

BitVec bytes_to_bits(std::span<const uint8_t> bytes, size_t bit_count) {
    if (bit_count > bytes.size() * 8) {
        throw EncodingError("byte buffer shorter than requested bit count");
    }
    BitVec out(bit_count);
    for (size_t i = 0; i < bit_count; ++i) {
        out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
    }
    return out;
}

uint16_t crc16_ccitt(std::span<const uint8_t> bits) {
    uint16_t crc = 0xFFFF;
    for (uint8_t bit : bits) {
        const bool msb = (crc & 0x8000u) != 0;
        crc = static_cast<uint16_t>(crc << 1);
        if (msb != (bit != 0)) {
            crc ^= 0x1021;
        }
    }
    return crc;
}

int64_t to_fixed(double value, int frac_bits, int total_bits) {
    const double scaled = value * std::ldexp(1.0, frac_bits);
    if (!std::isfinite(scaled)) {
        throw EncodingError("non-finite value in fixed-point encode");
    }
    const double rounded = std::nearbyint(scaled);
    const double limit = std::ldexp(1.0, total_bits - 1);
    if (rounded >= limit || rounded < -limit) {
        throw EncodingError("value out of fixed-point range");
    }
    return static_cast<int64_t>(rounded);
}

double from_fixed(int64_t raw, int frac_bits) {
    return std::ldexp(static_cast<double>(raw), -frac_bits);
}

}  // namespace avl
