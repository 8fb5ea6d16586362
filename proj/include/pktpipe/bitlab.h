// Copyright 2026 The pktpipe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PKTPIPE_BITLAB_H_
#define PKTPIPE_BITLAB_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pktpipe {

using BitOffset = std::size_t;
using BitWidth = std::size_t;

inline constexpr BitWidth kMaxBusWidth = 4096;
inline constexpr BitWidth kDefaultMaxKeyWidth = 64;

// Raised when a size or width parameter falls outside its configured range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a bit slice does not fit inside the word it is taken from.
class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Raised by shift_def when a key crosses a bus-word boundary.
class KeyPlacementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fixed-width unsigned bit vector.
//
// Bits are addressed two ways. Numeric operations (shifts, masks, to_u64)
// treat the vector as an unsigned integer. Positional accessors (get/set,
// from_bytes, extract_bits) count from the most-significant bit, so byte 0 of
// a packet occupies the top 8 bits of a bus word. Bits at or above `width()`
// are always zero in the backing limbs.
class WideBits {
 public:
  WideBits() = default;
  explicit WideBits(BitWidth width);

  static WideBits from_u64(BitWidth width, std::uint64_t value);
  // Packs `bytes` MSB-first; missing trailing bytes are zero.
  static WideBits from_bytes(std::span<const std::uint8_t> bytes,
                             BitWidth width);
  static WideBits from_hex(BitWidth width, const std::string& hex);

  BitWidth width() const { return width_; }

  // MSB-first positional access.
  bool get(BitOffset pos) const;
  void set(BitOffset pos, bool value);

  // Bytes MSB-first; width must be a multiple of 8.
  std::vector<std::uint8_t> to_bytes() const;
  // Low 64 bits of the numeric value.
  std::uint64_t to_u64() const;
  // "0x" followed by ceil(width/4) lowercase digits.
  std::string to_hex() const;

  std::size_t popcount() const;
  bool is_zero() const;

  // Value truncated or zero-extended to `width` (numeric low bits kept).
  WideBits resized(BitWidth width) const;

  WideBits operator>>(std::size_t n) const;
  WideBits operator<<(std::size_t n) const;
  WideBits operator&(const WideBits& rhs) const;
  WideBits operator|(const WideBits& rhs) const;
  WideBits operator^(const WideBits& rhs) const;
  WideBits operator~() const;

  bool operator==(const WideBits& rhs) const = default;

 private:
  void clear_unused();
  static void require_same_width(const WideBits& a, const WideBits& b);

  BitWidth width_ = 0;
  std::vector<std::uint64_t> limbs_;  // limbs_[0] holds the numeric bits 0..63
};

// Minimal bit count that represents the value n; numbits(0) == 1.
constexpr BitWidth numbits(std::uint64_t n) {
  BitWidth bits = 1;
  while (bits < 64 && (n >> bits) != 0) ++bits;
  return bits;
}

constexpr std::uint64_t b2b(std::uint64_t bytes) { return bytes * 8; }

// Value with the `width` least-significant bits set, returned at the
// configured maximum key width.
WideBits create_mask(BitWidth width,
                     BitWidth max_key_width = kDefaultMaxKeyWidth);
std::uint64_t create_mask_u64(BitWidth width);

// Right shift that brings a key ending at `key_end_bit` (exclusive, counted
// MSB-first from the header start) to bit 0 of the bus word containing it.
// A key that ends on a word boundary yields 0.
std::size_t shift_def(std::uint64_t header_bits, BitWidth bus_bits,
                      BitOffset key_end_bit);
// Same, rejecting keys of `key_width` bits that straddle two bus words.
std::size_t shift_def(std::uint64_t header_bits, BitWidth bus_bits,
                      BitOffset key_end_bit, BitWidth key_width);

// Bit slice [offset, offset + width) counted MSB-first, as a value of
// `width` bits.
WideBits extract_bits(const WideBits& word, BitOffset offset, BitWidth width);
std::uint64_t extract_u64(const WideBits& word, BitOffset offset,
                          BitWidth width);

}  // namespace pktpipe

#endif  // PKTPIPE_BITLAB_H_
