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

#include "pktpipe/packet_io.h"

#include <cctype>
#include <fstream>
#include <iterator>
#include <system_error>

#include "json.hpp"

namespace pktpipe {
namespace {

constexpr std::uint32_t kPcapMagic = 0xA1B2C3D4;
constexpr std::uint32_t kPcapNanoMagic = 0xA1B23C4D;
constexpr std::uint32_t kPcapngMagic = 0x0A0D0D0A;
constexpr std::size_t kPcapGlobalHeader = 24;
constexpr std::size_t kPcapRecordHeader = 16;

std::uint32_t load32(std::span<const std::uint8_t> d, std::size_t at,
                     bool big_endian) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t b = big_endian ? i : 3 - i;
    v = (v << 8) | d[at + b];
  }
  return v;
}

void store32(std::vector<std::uint8_t>& out, std::uint32_t v, bool big_endian) {
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t sh = big_endian ? 8 * (3 - i) : 8 * i;
    out.push_back(static_cast<std::uint8_t>(v >> sh));
  }
}

void store16(std::vector<std::uint8_t>& out, std::uint16_t v, bool big_endian) {
  if (big_endian) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  } else {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
}

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<PacketFormat> parse_packet_format(std::string_view name) {
  if (name == "hex") return PacketFormat::kHex;
  if (name == "raw") return PacketFormat::kRaw;
  if (name == "pcap") return PacketFormat::kPcap;
  return std::nullopt;
}

std::vector<Packet> read_hex_packets(std::string_view text) {
  std::vector<Packet> packets;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    std::string digits;
    for (char c : line) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      digits.push_back(c);
    }
    if (digits.empty() || digits.front() == '#') continue;
    if (digits.size() % 2 != 0) {
      throw PacketFormatError("line " + std::to_string(line_no) +
                              ": odd number of hex digits");
    }
    Packet p;
    p.reserve(digits.size() / 2);
    for (std::size_t i = 0; i < digits.size(); i += 2) {
      const int hi = nibble(digits[i]);
      const int lo = nibble(digits[i + 1]);
      if (hi < 0 || lo < 0) {
        throw PacketFormatError("line " + std::to_string(line_no) +
                                ": invalid hex digit");
      }
      p.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    packets.push_back(std::move(p));
  }
  return packets;
}

std::string write_hex_packets(const std::vector<Packet>& packets) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (const auto& p : packets) {
    for (auto b : p) {
      out.push_back(kDigits[b >> 4]);
      out.push_back(kDigits[b & 0xF]);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<Packet> read_raw_packets(std::span<const std::uint8_t> data) {
  std::vector<Packet> packets;
  std::size_t at = 0;
  while (at < data.size()) {
    if (data.size() - at < 2) {
      throw PacketFormatError("raw stream: dangling length prefix at byte " +
                              std::to_string(at));
    }
    const std::size_t len = static_cast<std::size_t>(data[at]) << 8 | data[at + 1];
    at += 2;
    if (data.size() - at < len) {
      throw PacketFormatError("raw stream: record at byte " +
                              std::to_string(at - 2) + " claims " +
                              std::to_string(len) + " bytes");
    }
    packets.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(at),
                         data.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += len;
  }
  return packets;
}

std::vector<std::uint8_t> write_raw_packets(const std::vector<Packet>& packets) {
  std::vector<std::uint8_t> out;
  for (const auto& p : packets) {
    if (p.size() > 0xFFFF) {
      throw PacketFormatError("raw format limits packets to 65535 bytes");
    }
    store16(out, static_cast<std::uint16_t>(p.size()), true);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<Packet> read_pcap(std::span<const std::uint8_t> data) {
  if (data.size() < kPcapGlobalHeader) {
    throw PacketFormatError("pcap: file shorter than the global header");
  }
  const std::uint32_t be = load32(data, 0, true);
  const std::uint32_t le = load32(data, 0, false);
  bool big_endian;
  if (be == kPcapMagic) {
    big_endian = true;
  } else if (le == kPcapMagic) {
    big_endian = false;
  } else if (be == kPcapNanoMagic || le == kPcapNanoMagic) {
    throw PacketFormatError(
        "pcap: nanosecond-resolution captures (magic 0xa1b23c4d) are not "
        "supported; convert to microsecond pcap");
  } else if (be == kPcapngMagic) {
    throw PacketFormatError("pcap: pcapng files are not supported");
  } else {
    throw PacketFormatError("pcap: unrecognized magic number");
  }

  std::vector<Packet> packets;
  std::size_t at = kPcapGlobalHeader;
  while (at < data.size()) {
    if (data.size() - at < kPcapRecordHeader) {
      throw PacketFormatError("pcap: truncated record header at byte " +
                              std::to_string(at));
    }
    const std::uint32_t incl = load32(data, at + 8, big_endian);
    at += kPcapRecordHeader;
    if (data.size() - at < incl) {
      throw PacketFormatError("pcap: truncated record data at byte " +
                              std::to_string(at));
    }
    packets.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(at),
                         data.begin() + static_cast<std::ptrdiff_t>(at + incl));
    at += incl;
  }
  return packets;
}

std::vector<std::uint8_t> write_pcap(const std::vector<Packet>& packets,
                                     bool big_endian) {
  std::vector<std::uint8_t> out;
  store32(out, kPcapMagic, big_endian);
  store16(out, 2, big_endian);
  store16(out, 4, big_endian);
  store32(out, 0, big_endian);       // thiszone
  store32(out, 0, big_endian);       // sigfigs
  store32(out, 65535, big_endian);   // snaplen
  store32(out, 1, big_endian);       // LINKTYPE_ETHERNET
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const auto& p = packets[i];
    store32(out, static_cast<std::uint32_t>(i), big_endian);
    store32(out, 0, big_endian);
    store32(out, static_cast<std::uint32_t>(p.size()), big_endian);
    store32(out, static_cast<std::uint32_t>(p.size()), big_endian);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<Packet> read_packets_file(const std::string& path,
                                      PacketFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), path);
  std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>()};
  switch (format) {
    case PacketFormat::kHex:
      return read_hex_packets(
          std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
    case PacketFormat::kRaw:
      return read_raw_packets(data);
    case PacketFormat::kPcap:
      return read_pcap(data);
  }
  return {};
}

std::string result_to_json(const ParseResult& result, std::size_t index) {
  nlohmann::json j;
  j["index"] = index;
  j["status"] = std::string(to_string(result.status));
  if (!result.ok()) j["reason"] = result.reason;
  j["path"] = result.path;
  j["latency_cycles"] = result.latency_cycles;
  j["payload_offset_bits"] = result.payload_offset_bits;
  nlohmann::json phv = nlohmann::json::object();
  for (const auto& [id, hv] : result.phv) {
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [name, value] : hv.fields) fields[name] = value.to_hex();
    phv[id] = {{"valid", hv.valid}, {"fields", fields}};
  }
  j["phv"] = phv;
  return j.dump();
}

}  // namespace pktpipe
