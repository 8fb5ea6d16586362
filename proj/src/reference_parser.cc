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

#include <stdexcept>

#include "pktpipe/simulator.h"

namespace pktpipe {
namespace {

bool bit_at(std::span<const std::uint8_t> packet, std::uint64_t pos) {
  return (packet[pos / 8] >> (7 - pos % 8)) & 1U;
}

std::uint64_t read_uint(std::span<const std::uint8_t> packet,
                        std::uint64_t offset, BitWidth width) {
  std::uint64_t v = 0;
  for (BitWidth b = 0; b < width; ++b) {
    v = (v << 1) | (bit_at(packet, offset + b) ? 1U : 0U);
  }
  return v;
}

WideBits read_wide(std::span<const std::uint8_t> packet, std::uint64_t offset,
                   BitWidth width) {
  WideBits v(width);
  for (BitWidth b = 0; b < width; ++b) v.set(b, bit_at(packet, offset + b));
  return v;
}

}  // namespace

ParseResult reference_parse(const ParserGraph& graph,
                            std::span<const std::uint8_t> packet) {
  ParseResult r;
  for (const auto& h : graph.headers) r.phv[h.id] = HeaderVector{};
  const std::uint64_t total = packet.size() * 8;
  std::uint64_t offset = 0;
  std::string current = graph.start;
  auto abort = [&](ParseStatus status, std::string reason) {
    r.status = status;
    r.reason = std::move(reason);
    r.payload_offset_bits = offset;
    return r;
  };

  while (current != kAccept) {
    const HeaderSpec& spec = graph.at(current);
    std::uint64_t len = 0;
    if (const auto* var = std::get_if<VariableLength>(&spec.length)) {
      const FieldSpec& lf = var->len_field;
      if (offset + lf.end_bits() > total) {
        return abort(ParseStatus::kTruncated, truncated_reason(spec.id));
      }
      try {
        len = header_size_bits(
            spec, read_uint(packet, offset + lf.offset_bits, lf.width_bits));
      } catch (const MalformedLength& e) {
        return abort(ParseStatus::kMalformed, e.what());
      }
    } else {
      len = spec.min_size_bits();
    }
    if (offset + len > total) {
      return abort(ParseStatus::kTruncated, truncated_reason(spec.id));
    }

    HeaderVector& hv = r.phv[spec.id];
    hv.valid = true;
    for (const auto& f : spec.fields) {
      hv.fields.emplace(f.name,
                        read_wide(packet, offset + f.offset_bits, f.width_bits));
    }

    std::string next(kAccept);
    if (spec.key) {
      const std::uint64_t key =
          read_uint(packet, offset + spec.key->offset_bits, spec.key->width_bits);
      for (const auto& t : spec.transitions) {
        if ((key & t.mask) == t.value) {
          next = t.next;
          break;
        }
      }
    } else if (!spec.transitions.empty()) {
      next = spec.transitions.front().next;
    }

    r.path.push_back(spec.id);
    r.header_bytes.emplace_back(packet.begin() + offset / 8,
                                packet.begin() + (offset + len) / 8);
    offset += len;
    current = next;
  }
  r.payload_offset_bits = offset;
  r.payload.assign(packet.begin() + offset / 8, packet.end());
  return r;
}

}  // namespace pktpipe
