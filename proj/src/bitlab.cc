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

#include "pktpipe/bitlab.h"

#include <algorithm>
#include <bit>
#include <cctype>

namespace pktpipe {
namespace {

constexpr std::size_t kLimbBits = 64;

std::size_t limb_count(BitWidth width) {
  return (width + kLimbBits - 1) / kLimbBits;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

WideBits::WideBits(BitWidth width) : width_(width), limbs_(limb_count(width)) {
  if (width == 0 || width > kMaxBusWidth) {
    throw ConfigError("bit width " + std::to_string(width) +
                      " outside 1.." + std::to_string(kMaxBusWidth));
  }
}

WideBits WideBits::from_u64(BitWidth width, std::uint64_t value) {
  WideBits w(width);
  w.limbs_[0] = value;
  w.clear_unused();
  return w;
}

WideBits WideBits::from_bytes(std::span<const std::uint8_t> bytes,
                              BitWidth width) {
  WideBits w(width);
  const std::size_t nbytes = std::min(bytes.size(), width / 8);
  for (std::size_t i = 0; i < nbytes; ++i) {
    // Byte i covers MSB positions [8i, 8i+8) -> numeric bits ending at
    // width - 8i - 1.
    const std::size_t low = width - 8 * i - 8;
    const std::size_t limb = low / kLimbBits;
    const std::size_t sh = low % kLimbBits;
    w.limbs_[limb] |= static_cast<std::uint64_t>(bytes[i]) << sh;
    if (sh > kLimbBits - 8) {
      w.limbs_[limb + 1] |= static_cast<std::uint64_t>(bytes[i]) >>
                            (kLimbBits - sh);
    }
  }
  // A partial byte at the end of a non-byte-multiple width.
  if (width % 8 != 0 && bytes.size() > nbytes) {
    const std::size_t rem = width % 8;
    const std::uint8_t b = bytes[nbytes];
    for (std::size_t j = 0; j < rem; ++j) {
      w.set(8 * nbytes + j, (b >> (7 - j)) & 1U);
    }
  }
  return w;
}

WideBits WideBits::from_hex(BitWidth width, const std::string& hex) {
  std::string_view digits = hex;
  if (digits.size() >= 2 && digits[0] == '0' &&
      (digits[1] == 'x' || digits[1] == 'X')) {
    digits.remove_prefix(2);
  }
  if (digits.empty()) throw ConfigError("empty hex literal");
  WideBits w(width);
  std::size_t bit = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it, bit += 4) {
    const int d = hex_digit(*it);
    if (d < 0) throw ConfigError("invalid hex digit in '" + hex + "'");
    for (int j = 0; j < 4; ++j) {
      if (((d >> j) & 1) == 0) continue;
      const std::size_t b = bit + static_cast<std::size_t>(j);
      if (b >= width) {
        throw ConfigError("hex literal '" + hex + "' exceeds " +
                          std::to_string(width) + " bits");
      }
      w.limbs_[b / kLimbBits] |= std::uint64_t{1} << (b % kLimbBits);
    }
  }
  return w;
}

bool WideBits::get(BitOffset pos) const {
  if (pos >= width_) throw BoundsError("bit position out of range");
  const std::size_t b = width_ - 1 - pos;
  return (limbs_[b / kLimbBits] >> (b % kLimbBits)) & 1U;
}

void WideBits::set(BitOffset pos, bool value) {
  if (pos >= width_) throw BoundsError("bit position out of range");
  const std::size_t b = width_ - 1 - pos;
  const std::uint64_t m = std::uint64_t{1} << (b % kLimbBits);
  if (value) {
    limbs_[b / kLimbBits] |= m;
  } else {
    limbs_[b / kLimbBits] &= ~m;
  }
}

std::vector<std::uint8_t> WideBits::to_bytes() const {
  if (width_ % 8 != 0) throw ConfigError("to_bytes needs a byte-multiple width");
  std::vector<std::uint8_t> out(width_ / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t low = width_ - 8 * i - 8;
    const std::size_t limb = low / kLimbBits;
    const std::size_t sh = low % kLimbBits;
    std::uint64_t v = limbs_[limb] >> sh;
    if (sh > kLimbBits - 8) v |= limbs_[limb + 1] << (kLimbBits - sh);
    out[i] = static_cast<std::uint8_t>(v & 0xFF);
  }
  return out;
}

std::uint64_t WideBits::to_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

std::string WideBits::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t ndigits = (width_ + 3) / 4;
  std::string out = "0x";
  out.reserve(2 + ndigits);
  for (std::size_t d = ndigits; d-- > 0;) {
    const std::size_t b = 4 * d;
    std::uint64_t v = limbs_[b / kLimbBits] >> (b % kLimbBits);
    out.push_back(kDigits[v & 0xF]);
  }
  return out;
}

std::size_t WideBits::popcount() const {
  std::size_t n = 0;
  for (auto limb : limbs_) n += static_cast<std::size_t>(std::popcount(limb));
  return n;
}

bool WideBits::is_zero() const {
  return std::all_of(limbs_.begin(), limbs_.end(),
                     [](std::uint64_t l) { return l == 0; });
}

WideBits WideBits::resized(BitWidth width) const {
  WideBits w(width);
  const std::size_t n = std::min(w.limbs_.size(), limbs_.size());
  std::copy_n(limbs_.begin(), n, w.limbs_.begin());
  w.clear_unused();
  return w;
}

WideBits WideBits::operator>>(std::size_t n) const {
  WideBits out(width_);
  if (n >= width_) return out;
  const std::size_t limb_shift = n / kLimbBits;
  const std::size_t bit_shift = n % kLimbBits;
  for (std::size_t i = 0; i + limb_shift < limbs_.size(); ++i) {
    std::uint64_t v = limbs_[i + limb_shift] >> bit_shift;
    if (bit_shift != 0 && i + limb_shift + 1 < limbs_.size()) {
      v |= limbs_[i + limb_shift + 1] << (kLimbBits - bit_shift);
    }
    out.limbs_[i] = v;
  }
  return out;
}

WideBits WideBits::operator<<(std::size_t n) const {
  WideBits out(width_);
  if (n >= width_) return out;
  const std::size_t limb_shift = n / kLimbBits;
  const std::size_t bit_shift = n % kLimbBits;
  for (std::size_t i = limbs_.size(); i-- > limb_shift;) {
    std::uint64_t v = limbs_[i - limb_shift] << bit_shift;
    if (bit_shift != 0 && i - limb_shift >= 1) {
      v |= limbs_[i - limb_shift - 1] >> (kLimbBits - bit_shift);
    }
    out.limbs_[i] = v;
  }
  out.clear_unused();
  return out;
}

WideBits WideBits::operator&(const WideBits& rhs) const {
  require_same_width(*this, rhs);
  WideBits out = *this;
  for (std::size_t i = 0; i < limbs_.size(); ++i) out.limbs_[i] &= rhs.limbs_[i];
  return out;
}

WideBits WideBits::operator|(const WideBits& rhs) const {
  require_same_width(*this, rhs);
  WideBits out = *this;
  for (std::size_t i = 0; i < limbs_.size(); ++i) out.limbs_[i] |= rhs.limbs_[i];
  return out;
}

WideBits WideBits::operator^(const WideBits& rhs) const {
  require_same_width(*this, rhs);
  WideBits out = *this;
  for (std::size_t i = 0; i < limbs_.size(); ++i) out.limbs_[i] ^= rhs.limbs_[i];
  return out;
}

WideBits WideBits::operator~() const {
  WideBits out = *this;
  for (auto& limb : out.limbs_) limb = ~limb;
  out.clear_unused();
  return out;
}

void WideBits::clear_unused() {
  const std::size_t used = width_ % kLimbBits;
  if (used != 0 && !limbs_.empty()) {
    limbs_.back() &= (std::uint64_t{1} << used) - 1;
  }
}

void WideBits::require_same_width(const WideBits& a, const WideBits& b) {
  if (a.width_ != b.width_) {
    throw ConfigError("width mismatch: " + std::to_string(a.width_) + " vs " +
                      std::to_string(b.width_));
  }
}

std::uint64_t create_mask_u64(BitWidth width) {
  if (width == 0 || width > 64) {
    throw ConfigError("mask width " + std::to_string(width) + " outside 1..64");
  }
  return width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

WideBits create_mask(BitWidth width, BitWidth max_key_width) {
  if (width == 0 || width > max_key_width) {
    throw ConfigError("mask width " + std::to_string(width) + " outside 1.." +
                      std::to_string(max_key_width));
  }
  return ~WideBits(max_key_width) >> (max_key_width - width);
}

std::size_t shift_def(std::uint64_t header_bits, BitWidth bus_bits,
                      BitOffset key_end_bit) {
  if (bus_bits == 0) throw ConfigError("bus width must be positive");
  if (key_end_bit > header_bits) {
    throw ConfigError("key ends at bit " + std::to_string(key_end_bit) +
                      " beyond header of " + std::to_string(header_bits) +
                      " bits");
  }
  const std::size_t in_word = key_end_bit % bus_bits;
  return in_word == 0 ? 0 : bus_bits - in_word;
}

std::size_t shift_def(std::uint64_t header_bits, BitWidth bus_bits,
                      BitOffset key_end_bit, BitWidth key_width) {
  if (key_width == 0 || key_width > key_end_bit) {
    throw ConfigError("key width " + std::to_string(key_width) +
                      " inconsistent with key end " +
                      std::to_string(key_end_bit));
  }
  const std::size_t shift = shift_def(header_bits, bus_bits, key_end_bit);
  const BitOffset first = key_end_bit - key_width;
  if (first / bus_bits != (key_end_bit - 1) / bus_bits) {
    throw KeyPlacementError("key [" + std::to_string(first) + ", " +
                            std::to_string(key_end_bit) +
                            ") straddles a " + std::to_string(bus_bits) +
                            "-bit bus word boundary");
  }
  return shift;
}

WideBits extract_bits(const WideBits& word, BitOffset offset, BitWidth width) {
  if (width == 0 || offset + width > word.width()) {
    throw BoundsError("slice [" + std::to_string(offset) + ", " +
                      std::to_string(offset + width) + ") outside " +
                      std::to_string(word.width()) + "-bit word");
  }
  return (word >> (word.width() - offset - width)).resized(width);
}

std::uint64_t extract_u64(const WideBits& word, BitOffset offset,
                          BitWidth width) {
  if (width > 64) throw ConfigError("extract_u64 limited to 64 bits");
  return extract_bits(word, offset, width).to_u64();
}

}  // namespace pktpipe
