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

#ifndef PKTPIPE_SIMULATOR_H_
#define PKTPIPE_SIMULATOR_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pktpipe/bitlab.h"
#include "pktpipe/graph_model.h"
#include "pktpipe/planner.h"

namespace pktpipe {

enum class ParseStatus { kOk, kMalformed, kTruncated };

std::string_view to_string(ParseStatus status);

// Per-header slice of the packet header vector.
struct HeaderVector {
  bool valid = false;
  std::map<std::string, WideBits> fields;  // empty unless valid

  bool operator==(const HeaderVector&) const = default;
};

using Phv = std::map<std::string, HeaderVector>;

struct ParseResult {
  ParseStatus status = ParseStatus::kOk;
  std::string reason;  // empty when ok
  std::vector<std::string> path;
  Phv phv;
  std::uint64_t latency_cycles = 0;
  std::uint64_t payload_offset_bits = 0;
  // Raw bytes of each header on `path`, then whatever followed the last one.
  std::vector<std::vector<std::uint8_t>> header_bytes;
  std::vector<std::uint8_t> payload;

  bool ok() const { return status == ParseStatus::kOk; }
};

std::string truncated_reason(const std::string& header_id);

// One beat of the data bus plus its stream tags.
struct BusWord {
  WideBits data;
  bool valid = false;  // false = bubble
  bool sop = false;
  bool eop = false;
  std::size_t tail_bits = 0;  // meaningful MSB-first bits in `data`
  // Header the stream is destined for; nullopt once the parse accepted or
  // aborted.
  std::optional<std::size_t> dest;
  ParseStatus status = ParseStatus::kOk;
};

// Splits a packet into zero-padded bus beats. Always yields at least one.
std::vector<BusWord> pack_packet(std::span<const std::uint8_t> packet,
                                 BitWidth bus_width_bits,
                                 std::size_t start_index);

// Runtime state of one header module.
struct HeaderRuntime {
  std::uint64_t rx_bits = 0;  // saturates at 2^rx_counter_width - 1
  std::string next_header;    // header id or kAccept
  bool next_header_valid = false;
  bool key_evaluated = false;
  std::map<std::string, WideBits> phv_accum;
};

// Advances the received-bit counter by one bus word.
void advance_rx_bits(HeaderRuntime& rt, const HeaderPlan& hp,
                     BitWidth bus_width_bits);

// Key match on the word that completes the key location. Leaves `rt`
// untouched before the key arrives or once a transition has been taken.
void state_transition(HeaderRuntime& rt, const HeaderSpec& spec,
                      const HeaderPlan& hp, const WideBits& word);

// Output word whose first bit is the bit `consumed_bits mod bus` of
// `current`, continuing into `next`. The shift comes from the header's shift
// plan; lengths absent from the plan throw std::logic_error.
WideBits pipeline_adjust(const HeaderPlan& hp, const WideBits& current,
                         const WideBits& next, std::uint64_t consumed_bits);

// Streaming hardware model of one parser-graph node.
class HeaderStage {
 public:
  HeaderStage(const ParserGraph& graph, std::size_t index,
              const HeaderPlan& plan);

  void reset();
  // One clock: consumes `in` (possibly a bubble) and returns the beat driven
  // on the module output this cycle. Inactive modules forward their input.
  BusWord header_analysis(const BusWord& in);

  const std::string& id() const { return spec_->id; }
  // Drives the mux select: this module owns the current packet's stream.
  bool selected() const { return active_; }
  const HeaderRuntime& runtime() const { return rt_; }
  const HeaderVector& phv() const { return phv_; }
  std::optional<std::uint64_t> length_bits() const { return length_; }
  ParseStatus status() const { return status_; }
  const std::string& reason() const { return reason_; }
  std::vector<std::uint8_t> header_bytes() const;

 private:
  BusWord pop_or_bubble();
  void emit(WideBits data);
  void finish_stream();
  void complete_header();
  void fail(ParseStatus status, std::string reason);
  std::optional<std::size_t> next_dest() const;
  WideBits header_slice(BitOffset offset, BitWidth width) const;

  const ParserGraph* graph_;
  const HeaderSpec* spec_;
  const HeaderPlan* plan_;
  std::size_t index_;
  BitWidth bus_;

  HeaderRuntime rt_;
  bool active_ = false;
  bool swallow_ = false;
  bool complete_ = false;
  std::uint64_t words_in_ = 0;
  std::uint64_t bits_in_ = 0;
  std::optional<std::uint64_t> length_;
  std::vector<WideBits> header_words_;
  std::optional<WideBits> pending_;
  std::uint64_t words_out_ = 0;
  std::deque<BusWord> out_q_;
  HeaderVector phv_;
  ParseStatus status_ = ParseStatus::kOk;
  std::string reason_;
};

// Cycle-level model of the leveled pipeline: one register bank per level,
// level outputs merged by valid-flag muxes as the plan dictates.
class PipelineSimulator {
 public:
  PipelineSimulator(const ParserGraph& graph, const PipelinePlan& plan);

  ParseResult run(std::span<const std::uint8_t> packet);
  // Cycles spent by the last run until the final beat left the pipeline.
  std::uint64_t last_cycle_count() const { return last_cycles_; }

 private:
  BusWord merge(std::size_t level, const BusWord& in);

  const ParserGraph* graph_;
  const PipelinePlan* plan_;
  std::vector<std::vector<HeaderStage>> stages_;  // per level
  std::uint64_t last_cycles_ = 0;
};

ParseResult run_packet(const PipelinePlan& plan, const ParserGraph& graph,
                       std::span<const std::uint8_t> packet);

// Runs packets on up to `jobs` worker threads; results keep input order.
std::vector<ParseResult> run_batch(
    const PipelinePlan& plan, const ParserGraph& graph,
    const std::vector<std::vector<std::uint8_t>>& packets,
    unsigned jobs = 1);

// Sequential byte-walking interpreter of the graph with no bus or pipeline.
// latency_cycles is always 0.
ParseResult reference_parse(const ParserGraph& graph,
                            std::span<const std::uint8_t> packet);

// Fields compared by the oracle check: status, reason, path, PHV, payload
// offset. Returns an empty string when equal, else the first difference.
std::string compare_results(const ParseResult& pipeline,
                            const ParseResult& oracle);

}  // namespace pktpipe

#endif  // PKTPIPE_SIMULATOR_H_
