#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace avl {

/// Bit sequence as one value per element (0 or 1). Wire order is MSB-first.
using BitVec = std::vector<uint8_t>;

class BitWriter {
public:
    /// Appends the low `n` bits of `value`, most significant first.
    void write(uint64_t value, int n);
    void write_signed(int64_t value, int n);
    void append(std::span<const uint8_t> bits);

    const BitVec& bits() const { return bits_; }
    size_t size() const { return bits_.size(); }

private:
    BitVec bits_;
};

class BitReader {
public:
    explicit BitReader(std::span<const uint8_t> bits) : bits_(bits) {}

    uint64_t read(int n);
    int64_t read_signed(int n);
    BitVec read_bits(size_t n);
    size_t remaining() const { return bits_.size() - pos_; }
    size_t position() const { return pos_; }

private:
    std::span<const uint8_t> bits_;
    size_t pos_ = 0;
};

/// MSB-first packing; the final byte is zero-padded.
std::vector<uint8_t> bits_to_bytes(std::span<const uint8_t> bits);
BitVec bytes_to_bits(std::span<const uint8_t> bytes, size_t bit_count);

/// CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF) over a bit sequence.
uint16_t crc16_ccitt(std::span<const uint8_t> bits);

/// Round-to-nearest fixed-point encode; throws EncodingError when the value
/// does not fit a signed `total_bits` integer.
int64_t to_fixed(double value, int frac_bits, int total_bits);
double from_fixed(int64_t raw, int frac_bits);

}  // namespace avl
