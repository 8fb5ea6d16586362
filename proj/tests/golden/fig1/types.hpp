// PHV records and constant tables for design "fig1": 5 headers, 512-bit bus.
#ifndef MPO_FIG1_TYPES_HPP_
#define MPO_FIG1_TYPES_HPP_

#include "module.hpp"

const unsigned BUS_BITS = 512;
typedef PacketData<BUS_BITS> PktDataType;

enum HeaderId {
  HDR_ETH = 0,
  HDR_IPV4 = 1,
  HDR_IPV6 = 2,
  HDR_UDP = 3,
  HDR_TCP = 4,
};

// ETH: fixed, 112 bits
struct eth_phv_t : public PHVData<112> {
  ap_uint<48> dst() const { return field<0, 48>(); }
  ap_uint<48> src() const { return field<48, 48>(); }
  ap_uint<16> ethertype() const { return field<96, 16>(); }
};
typedef HeaderLayout<ap_uint<16>, 2, 1> eth_layout_t;
const eth_layout_t eth_layout = {
    {{{0x800ULL, 0xffffULL, HDR_IPV4}, {0x86ddULL, 0xffffULL, HDR_IPV6}}},
    {96, 16},
    {0, 0},
    0,
    {{112}},
    {{112}},
    ACCEPT_ID,
};
typedef fixedHeaderFormat<112> eth_format_t;

// IPv4: variable, 32 * x + 0 bits for x in 5..15
struct ipv4_phv_t : public PHVData<160> {
  ap_uint<4> version() const { return field<0, 4>(); }
  ap_uint<4> ihl() const { return field<4, 4>(); }
  ap_uint<8> tos() const { return field<8, 8>(); }
  ap_uint<16> total_length() const { return field<16, 16>(); }
  ap_uint<16> identification() const { return field<32, 16>(); }
  ap_uint<3> flags() const { return field<48, 3>(); }
  ap_uint<13> frag_offset() const { return field<51, 13>(); }
  ap_uint<8> ttl() const { return field<64, 8>(); }
  ap_uint<8> protocol() const { return field<72, 8>(); }
  ap_uint<16> checksum() const { return field<80, 16>(); }
  ap_uint<32> src() const { return field<96, 32>(); }
  ap_uint<32> dst() const { return field<128, 32>(); }
};
typedef HeaderLayout<ap_uint<8>, 2, 11> ipv4_layout_t;
const ipv4_layout_t ipv4_layout = {
    {{{0x11ULL, 0xffULL, HDR_UDP}, {0x6ULL, 0xffULL, HDR_TCP}}},
    {72, 8},
    {4, 4},
    5,
    {{160, 192, 224, 256, 288, 320, 352, 384, 416, 448, 480}},
    {{160, 192, 224, 256, 288, 320, 352, 384, 416, 448, 480}},
    ACCEPT_ID,
};
typedef varHeaderFormat<32, 0> ipv4_format_t;

// IPv6: fixed, 320 bits
struct ipv6_phv_t : public PHVData<320> {
  ap_uint<4> version() const { return field<0, 4>(); }
  ap_uint<8> traffic_class() const { return field<4, 8>(); }
  ap_uint<20> flow_label() const { return field<12, 20>(); }
  ap_uint<16> payload_length() const { return field<32, 16>(); }
  ap_uint<8> next_header() const { return field<48, 8>(); }
  ap_uint<8> hop_limit() const { return field<56, 8>(); }
  ap_uint<128> src() const { return field<64, 128>(); }
  ap_uint<128> dst() const { return field<192, 128>(); }
};
typedef HeaderLayout<ap_uint<8>, 2, 1> ipv6_layout_t;
const ipv6_layout_t ipv6_layout = {
    {{{0x11ULL, 0xffULL, HDR_UDP}, {0x6ULL, 0xffULL, HDR_TCP}}},
    {48, 8},
    {0, 0},
    0,
    {{320}},
    {{320}},
    ACCEPT_ID,
};
typedef fixedHeaderFormat<320> ipv6_format_t;

// UDP: fixed, 64 bits
struct udp_phv_t : public PHVData<64> {
  ap_uint<16> src_port() const { return field<0, 16>(); }
  ap_uint<16> dst_port() const { return field<16, 16>(); }
  ap_uint<16> length() const { return field<32, 16>(); }
  ap_uint<16> checksum() const { return field<48, 16>(); }
};
typedef HeaderLayout<ap_uint<1>, 0, 1> udp_layout_t;
const udp_layout_t udp_layout = {
    {{}},
    {0, 0},
    {0, 0},
    0,
    {{64}},
    {{64}},
    ACCEPT_ID,
};
typedef fixedHeaderFormat<64> udp_format_t;

// TCP: variable, 32 * x + 0 bits for x in 5..15
struct tcp_phv_t : public PHVData<160> {
  ap_uint<16> src_port() const { return field<0, 16>(); }
  ap_uint<16> dst_port() const { return field<16, 16>(); }
  ap_uint<32> seq() const { return field<32, 32>(); }
  ap_uint<32> ack() const { return field<64, 32>(); }
  ap_uint<4> data_offset() const { return field<96, 4>(); }
  ap_uint<12> flags() const { return field<100, 12>(); }
  ap_uint<16> window() const { return field<112, 16>(); }
  ap_uint<16> checksum() const { return field<128, 16>(); }
  ap_uint<16> urgent() const { return field<144, 16>(); }
};
typedef HeaderLayout<ap_uint<1>, 0, 11> tcp_layout_t;
const tcp_layout_t tcp_layout = {
    {{}},
    {0, 0},
    {96, 4},
    5,
    {{160, 192, 224, 256, 288, 320, 352, 384, 416, 448, 480}},
    {{160, 192, 224, 256, 288, 320, 352, 384, 416, 448, 480}},
    ACCEPT_ID,
};
typedef varHeaderFormat<32, 0> tcp_format_t;

#endif  // MPO_FIG1_TYPES_HPP_
