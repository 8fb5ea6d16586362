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

#ifndef PKTPIPE_TRAFFIC_H_
#define PKTPIPE_TRAFFIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pktpipe/graph_model.h"
#include "pktpipe/packet_io.h"

namespace pktpipe {

inline constexpr std::uint64_t kDefaultSeed = 20190306;

enum class PacketIntent { kValid, kMalformed, kTruncated };

struct GeneratedPacket {
  Packet bytes;
  PacketIntent intent = PacketIntent::kValid;
};

// Walks random paths of a validated graph. Every fifth packet (starting with
// the first) is deliberately broken: alternately cut short inside a header or
// given an out-of-range length field. A graph with no variable-length header
// only yields truncated breakage. Deterministic for a given (graph, seed).
std::vector<GeneratedPacket> generate_traffic(const ParserGraph& graph,
                                              std::size_t count,
                                              std::uint64_t seed = kDefaultSeed);

}  // namespace pktpipe

#endif  // PKTPIPE_TRAFFIC_H_
