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

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

namespace pktpipe {
namespace {

using boost::multiprecision::cpp_int;

cpp_int as_int(const WideBits& w) { return cpp_int(w.to_hex()); }

cpp_int pow2(unsigned n) { return cpp_int(1) << n; }

WideBits random_word(std::mt19937_64& rng, BitWidth width) {
  WideBits w(width);
  for (BitOffset i = 0; i < width; ++i) w.set(i, (rng() & 1) != 0);
  return w;
}

TEST(Numbits, SpecExamples) {
  EXPECT_EQ(numbits(1), 1u);
  EXPECT_EQ(numbits(255), 8u);
  EXPECT_EQ(numbits(256), 9u);
  EXPECT_EQ(numbits(0), 1u);
}

TEST(Numbits, ExhaustiveAgainstSmallestWidth) {
  for (std::uint64_t n = 1; n <= (1u << 20); ++n) {
    BitWidth w = 1;
    while ((std::uint64_t{1} << w) <= n) ++w;
    ASSERT_EQ(numbits(n), w) << n;
    ASSERT_LE(std::uint64_t{1} << (w - 1), n);
  }
}

TEST(Numbits, Extremes) {
  EXPECT_EQ(numbits(~std::uint64_t{0}), 64u);
  EXPECT_EQ(numbits(std::uint64_t{1} << 63), 64u);
  EXPECT_EQ(numbits((std::uint64_t{1} << 63) - 1), 63u);
}

TEST(B2b, Examples) {
  EXPECT_EQ(b2b(14), 112u);
  EXPECT_EQ(b2b(0), 0u);
  EXPECT_EQ(b2b(40), 320u);
}

TEST(CreateMask, Examples) {
  EXPECT_EQ(create_mask(16).to_u64(), 0xFFFFu);
  EXPECT_EQ(create_mask(1).to_u64(), 0x1u);
  EXPECT_EQ(as_int(create_mask(9)), (cpp_int(1) << 9) - 1);
}

TEST(CreateMask, AllWidthsMatchBigInteger) {
  for (BitWidth w = 1; w <= 64; ++w) {
    const WideBits m = create_mask(w);
    EXPECT_EQ(m.width(), kDefaultMaxKeyWidth);
    EXPECT_EQ(m.popcount(), w);
    EXPECT_EQ(as_int(m) + 1, pow2(static_cast<unsigned>(w)));
    EXPECT_EQ(cpp_int(create_mask_u64(w)), as_int(m));
  }
}

TEST(CreateMask, ConfigurableMaximum) {
  const WideBits m = create_mask(100, 128);
  EXPECT_EQ(m.width(), 128u);
  EXPECT_EQ(as_int(m), pow2(100) - 1);
  EXPECT_THROW(create_mask(65), ConfigError);
  EXPECT_THROW(create_mask(0), ConfigError);
  EXPECT_THROW(create_mask_u64(65), ConfigError);
}

TEST(ShiftDef, Examples) {
  EXPECT_EQ(shift_def(112, 512, 112), 400u);
  EXPECT_EQ(shift_def(512, 512, 512), 0u);
  EXPECT_EQ(shift_def(160, 512, 80), 432u);
}

// Byte-aligned keys of 8 and 16 bits at every position of a 64-byte header:
// shifting the word that holds the key and masking must give the key bytes.
TEST(ShiftDef, ExtractsKeyBytes) {
  std::vector<std::uint8_t> header(64);
  for (std::size_t i = 0; i < header.size(); ++i) {
    header[i] = static_cast<std::uint8_t>(i * 37 + 11);
  }
  for (BitWidth bus : {64u, 128u, 256u, 512u}) {
    for (BitWidth kw : {8u, 16u}) {
      for (BitOffset off = 0; off + kw <= 512; off += 8) {
        const BitOffset end = off + kw;
        if (off / bus != (end - 1) / bus) {
          EXPECT_THROW(shift_def(512, bus, end, kw), KeyPlacementError);
          continue;
        }
        const std::size_t word = off / bus;
        const WideBits w = WideBits::from_bytes(
            std::span(header).subspan(word * bus / 8, bus / 8), bus);
        const std::uint64_t got =
            (w >> shift_def(512, bus, end, kw)).to_u64() & create_mask_u64(kw);
        std::uint64_t want = 0;
        for (BitOffset b = off; b < end; b += 8) want = (want << 8) | header[b / 8];
        ASSERT_EQ(got, want) << "bus " << bus << " off " << off << " kw " << kw;
      }
    }
  }
}

TEST(ShiftDef, Errors) {
  EXPECT_THROW(shift_def(64, 0, 8), ConfigError);
  EXPECT_THROW(shift_def(64, 64, 72), ConfigError);
  EXPECT_THROW(shift_def(128, 64, 72, 16), KeyPlacementError);
  EXPECT_NO_THROW(shift_def(128, 64, 64, 16));
}

TEST(ExtractBits, Examples) {
  WideBits w(512);
  for (BitOffset i = 0; i < 8; ++i) w.set(i, ((0xAB >> (7 - i)) & 1) != 0);
  EXPECT_EQ(extract_u64(w, 0, 8), 0xABu);

  std::mt19937_64 rng(7);
  const WideBits r = random_word(rng, 300);
  EXPECT_EQ(extract_bits(r, 0, 300), r);
}

TEST(ExtractBits, RandomSlicesMatchBitLoop) {
  std::mt19937_64 rng(20190306);
  for (int trial = 0; trial < 1000; ++trial) {
    const BitWidth width = 1 + rng() % kMaxBusWidth;
    const WideBits word = random_word(rng, width);
    const BitWidth w = 1 + rng() % width;
    const BitOffset off = rng() % (width - w + 1);

    cpp_int want = 0;
    for (BitOffset i = 0; i < w; ++i) want = (want << 1) | (word.get(off + i) ? 1 : 0);
    const WideBits got = extract_bits(word, off, w);
    ASSERT_EQ(got.width(), w);
    ASSERT_EQ(as_int(got), want) << "width " << width << " off " << off << " w " << w;

    // Shift-and-mask identity.
    const cpp_int shifted = as_int(word) >> static_cast<unsigned>(width - off - w);
    ASSERT_EQ(shifted & (pow2(static_cast<unsigned>(w)) - 1), want);
    if (w <= 64) {
      ASSERT_EQ(cpp_int(extract_u64(word, off, w)), want);
    }
  }
}

TEST(ExtractBits, OutOfRange) {
  const WideBits w(64);
  EXPECT_THROW(extract_bits(w, 60, 8), BoundsError);
  EXPECT_THROW(extract_u64(WideBits(128), 0, 65), ConfigError);
}

TEST(WideBits, ShiftsAndLogicMatchBigInteger) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const BitWidth width = 1 + rng() % 700;
    const WideBits a = random_word(rng, width);
    const WideBits b = random_word(rng, width);
    const cpp_int full = pow2(static_cast<unsigned>(width)) - 1;
    const std::size_t n = rng() % (width + 3);
    ASSERT_EQ(as_int(a >> n), as_int(a) >> static_cast<unsigned>(n));
    ASSERT_EQ(as_int(a << n), (as_int(a) << static_cast<unsigned>(n)) & full);
    ASSERT_EQ(as_int(a & b), as_int(a) & as_int(b));
    ASSERT_EQ(as_int(a | b), as_int(a) | as_int(b));
    ASSERT_EQ(as_int(a ^ b), as_int(a) ^ as_int(b));
    ASSERT_EQ(as_int(~a), full ^ as_int(a));
  }
}

TEST(WideBits, BytesAndHexRoundTrip) {
  const std::vector<std::uint8_t> bytes = {0xde, 0xad, 0xbe, 0xef, 0x01};
  const WideBits w = WideBits::from_bytes(bytes, 64);
  EXPECT_EQ(w.to_hex(), "0xdeadbeef01000000");
  EXPECT_EQ(WideBits::from_hex(64, w.to_hex()), w);
  EXPECT_EQ(WideBits::from_bytes(w.to_bytes(), 64), w);
  EXPECT_EQ(WideBits::from_u64(12, 0xabc).to_hex(), "0xabc");
  EXPECT_EQ(WideBits::from_u64(13, 0x1abc).to_hex(), "0x1abc");
  EXPECT_TRUE(WideBits(5).is_zero());
  EXPECT_THROW(WideBits(0), ConfigError);
  EXPECT_THROW(WideBits(kMaxBusWidth + 1), ConfigError);
  EXPECT_THROW(WideBits::from_hex(8, "0x1ff"), ConfigError);
  EXPECT_THROW(WideBits(8).get(8), BoundsError);
}

}  // namespace
}  // namespace pktpipe
