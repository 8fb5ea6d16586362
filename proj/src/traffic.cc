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

#include "pktpipe/traffic.h"

#include <optional>
#include <random>

namespace pktpipe {
namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Inclusive range. Modulo bias is irrelevant for test traffic and keeps
  // the sequence identical across standard libraries.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    return span == 0 ? engine_() : lo + engine_() % span;
  }
  std::uint8_t byte() { return static_cast<std::uint8_t>(engine_()); }

 private:
  std::mt19937_64 engine_;
};

void put_bits(Packet& bytes, std::uint64_t offset, BitWidth width,
              std::uint64_t value) {
  for (BitWidth b = 0; b < width; ++b) {
    const std::uint64_t pos = offset + b;
    const bool bit = (value >> (width - 1 - b)) & 1U;
    const auto m = static_cast<std::uint8_t>(0x80U >> (pos % 8));
    if (bit) {
      bytes[pos / 8] |= m;
    } else {
      bytes[pos / 8] &= static_cast<std::uint8_t>(~m);
    }
  }
}

std::uint64_t get_bits(const Packet& bytes, std::uint64_t offset,
                       BitWidth width) {
  std::uint64_t v = 0;
  for (BitWidth b = 0; b < width; ++b) {
    const std::uint64_t pos = offset + b;
    v = (v << 1) | ((bytes[pos / 8] >> (7 - pos % 8)) & 1U);
  }
  return v;
}

struct BuiltHeader {
  const HeaderSpec* spec;
  Packet bytes;
};

std::optional<std::uint64_t> non_matching_key(const HeaderSpec& spec, Rng& rng) {
  const std::uint64_t mask = create_mask_u64(spec.key->width_bits);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::uint64_t k = rng.uniform(0, mask);
    bool hit = false;
    for (const auto& t : spec.transitions) hit |= (k & t.mask) == t.value;
    if (!hit) return k;
  }
  return std::nullopt;
}

// Fills one header with random content, a valid length and a key steering to
// a random successor; returns the chosen successor.
std::string build_header(const HeaderSpec& spec, Rng& rng, Packet& out) {
  std::uint64_t len_value = 0;
  std::uint64_t len_bits = spec.min_size_bits();
  const auto* var = std::get_if<VariableLength>(&spec.length);
  if (var != nullptr) {
    len_value = rng.uniform(var->min_value, var->max_value);
    len_bits = header_size_bits(spec, len_value);
  }
  out.resize(len_bits / 8);
  for (auto& b : out) b = rng.byte();

  std::string next(kAccept);
  std::optional<std::uint64_t> key_value;
  if (spec.key) {
    const std::uint64_t width_mask = create_mask_u64(spec.key->width_bits);
    const std::uint64_t pick = rng.uniform(0, spec.transitions.size());
    if (pick < spec.transitions.size()) {
      const auto& t = spec.transitions[pick];
      key_value = t.value | (rng.uniform(0, width_mask) & ~t.mask & width_mask);
      next = t.next;
    } else if (auto k = non_matching_key(spec, rng)) {
      key_value = *k;
    } else {
      const auto& t = spec.transitions.front();
      key_value = t.value | (rng.uniform(0, width_mask) & ~t.mask & width_mask);
      next = t.next;
    }
    put_bits(out, spec.key->offset_bits, spec.key->width_bits, *key_value);
  } else if (!spec.transitions.empty()) {
    next = spec.transitions.front().next;
  }
  // The length field is written last so the header always has a valid
  // length even if it overlaps the key.
  if (var != nullptr) {
    put_bits(out, var->len_field.offset_bits, var->len_field.width_bits,
             len_value);
    if (spec.key && get_bits(out, spec.key->offset_bits,
                             spec.key->width_bits) != *key_value) {
      const std::uint64_t k =
          get_bits(out, spec.key->offset_bits, spec.key->width_bits);
      next = std::string(kAccept);
      for (const auto& t : spec.transitions) {
        if ((k & t.mask) == t.value) next = t.next;
      }
    }
  }
  return next;
}

std::vector<BuiltHeader> build_path(const ParserGraph& graph, Rng& rng) {
  std::vector<BuiltHeader> path;
  std::string current = graph.start;
  while (current != kAccept) {
    const HeaderSpec& spec = graph.at(current);
    BuiltHeader h{&spec, {}};
    current = build_header(spec, rng, h.bytes);
    path.push_back(std::move(h));
  }
  return path;
}

Packet concat(const std::vector<BuiltHeader>& path, std::size_t upto) {
  Packet p;
  for (std::size_t i = 0; i < upto && i < path.size(); ++i) {
    p.insert(p.end(), path[i].bytes.begin(), path[i].bytes.end());
  }
  return p;
}

bool make_malformed(std::vector<BuiltHeader>& path, Rng& rng, Packet& out) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto* var = std::get_if<VariableLength>(&path[i].spec->length);
    if (var == nullptr) continue;
    const std::uint64_t top = create_mask_u64(var->len_field.width_bits);
    if (var->min_value > 0 || var->max_value < top) candidates.push_back(i);
  }
  if (candidates.empty()) return false;
  const std::size_t at = candidates[rng.uniform(0, candidates.size() - 1)];
  const auto& var = std::get<VariableLength>(path[at].spec->length);
  const std::uint64_t top = create_mask_u64(var.len_field.width_bits);
  std::uint64_t bad;
  const bool below = var.min_value > 0 &&
                     (var.max_value == top || rng.uniform(0, 1) == 0);
  if (below) {
    bad = rng.uniform(0, var.min_value - 1);
  } else {
    bad = rng.uniform(var.max_value + 1, top);
  }
  put_bits(path[at].bytes, var.len_field.offset_bits, var.len_field.width_bits,
           bad);
  out = concat(path, at + 1);
  return true;
}

bool make_truncated(const std::vector<BuiltHeader>& path, Rng& rng,
                    Packet& out) {
  std::vector<std::pair<std::size_t, std::size_t>> cuts;  // [lo, hi] bytes
  std::size_t start = 0;
  for (const auto& h : path) {
    const std::size_t end = start + h.bytes.size();
    const std::size_t lo = std::max<std::size_t>(start, 1);
    if (end >= 1 && lo <= end - 1) cuts.emplace_back(lo, end - 1);
    start = end;
  }
  if (cuts.empty()) return false;
  const auto [lo, hi] = cuts[rng.uniform(0, cuts.size() - 1)];
  out = concat(path, path.size());
  out.resize(rng.uniform(lo, hi));
  return true;
}

}  // namespace

std::vector<GeneratedPacket> generate_traffic(const ParserGraph& graph,
                                              std::size_t count,
                                              std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t payload_max = 3 * graph.bus_width_bits / 8;
  std::vector<GeneratedPacket> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto path = build_path(graph, rng);
    GeneratedPacket g;
    bool broken = false;
    if (i % 5 == 0) {
      const bool want_malformed = (i / 5) % 2 == 1;
      if (want_malformed && make_malformed(path, rng, g.bytes)) {
        g.intent = PacketIntent::kMalformed;
        broken = true;
      } else if (make_truncated(path, rng, g.bytes)) {
        g.intent = PacketIntent::kTruncated;
        broken = true;
      } else if (make_malformed(path, rng, g.bytes)) {
        g.intent = PacketIntent::kMalformed;
        broken = true;
      }
    }
    if (!broken) {
      g.bytes = concat(path, path.size());
      const std::size_t extra = rng.uniform(0, payload_max);
      for (std::size_t b = 0; b < extra; ++b) g.bytes.push_back(rng.byte());
      if (g.bytes.empty()) g.bytes.push_back(rng.byte());
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace pktpipe
