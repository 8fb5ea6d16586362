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

#ifndef PKTPIPE_PACKET_IO_H_
#define PKTPIPE_PACKET_IO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pktpipe/simulator.h"

namespace pktpipe {

using Packet = std::vector<std::uint8_t>;

class PacketFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PacketFormat { kHex, kRaw, kPcap };

std::optional<PacketFormat> parse_packet_format(std::string_view name);

// One packet per line as hex digits; whitespace between digits is ignored,
// as are blank lines and lines starting with '#'.
std::vector<Packet> read_hex_packets(std::string_view text);
std::string write_hex_packets(const std::vector<Packet>& packets);

// Records of a 2-byte big-endian length followed by that many bytes.
std::vector<Packet> read_raw_packets(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> write_raw_packets(const std::vector<Packet>& packets);

// Classic microsecond pcap in either byte order. The nanosecond variant and
// pcapng are rejected.
std::vector<Packet> read_pcap(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> write_pcap(const std::vector<Packet>& packets,
                                     bool big_endian = false);

std::vector<Packet> read_packets_file(const std::string& path,
                                      PacketFormat format);

// Canonical single-line JSON for one result.
std::string result_to_json(const ParseResult& result, std::size_t index);

}  // namespace pktpipe

#endif  // PKTPIPE_PACKET_IO_H_
