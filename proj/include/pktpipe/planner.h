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

#ifndef PKTPIPE_PLANNER_H_
#define PKTPIPE_PLANNER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pktpipe/bitlab.h"
#include "pktpipe/graph_model.h"

namespace pktpipe {

// Thrown by plan() when the graph fails validation.
class PlanError : public std::runtime_error {
 public:
  PlanError(const std::string& what, ValidationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Header ids scheduled at one pipeline depth, in declaration order.
using Levels = std::vector<std::vector<std::string>>;

// Merge of the outputs of every header at one level onto the single bus that
// feeds the next pipe register. `feeds_level` is the level the merged bus
// drives, or nullopt for the output merge after the deepest level.
struct MuxSpec {
  std::optional<std::size_t> feeds_level;
  std::vector<std::string> inputs;  // priority order; first valid wins
  std::string select;               // valid flag choosing inputs[0]

  bool is_output() const { return !feeds_level.has_value(); }

  bool operator==(const MuxSpec&) const = default;
};

struct FixedShift {
  std::size_t shift = 0;
  bool operator==(const FixedShift&) const = default;
};

// Valid header length (bits) -> alignment shift (length mod bus width).
struct ShiftLut {
  std::map<std::uint64_t, std::size_t> entries;
  bool operator==(const ShiftLut&) const = default;
};

using ShiftPlan = std::variant<FixedShift, ShiftLut>;

// Per-header constants folded at plan time.
struct HeaderPlan {
  std::string id;
  std::optional<std::size_t> state_shift;  // absent when the header has no key
  ShiftPlan shift_plan;
  // (valid length in bits, length > bus width), ascending by length.
  std::vector<std::pair<std::uint64_t, bool>> bus_span;
  BitWidth rx_counter_width = 1;

  bool has_length(std::uint64_t bits) const;
  // Alignment shift for a header of `bits` bits. Throws std::logic_error
  // when the length is not one the plan was built for.
  std::size_t shift_for(std::uint64_t bits) const;

  bool operator==(const HeaderPlan&) const = default;
};

struct PipelinePlan {
  std::string design;
  BitWidth bus_width_bits = 0;
  Levels levels;
  std::size_t register_banks = 0;  // one after every level
  std::vector<MuxSpec> muxes;
  std::map<std::string, HeaderPlan> header_plans;

  std::size_t level_of(const std::string& id) const;
  // Modeled latency for a packet streamed in `words` bus beats.
  std::uint64_t latency_cycles(std::uint64_t words) const;

  bool operator==(const PipelinePlan&) const = default;
};

// level(h) = longest path from start; requires an acyclic graph.
Levels level_schedule(const ParserGraph& graph);

std::vector<MuxSpec> place_muxes(const ParserGraph& graph,
                                 const Levels& levels);

HeaderPlan build_header_plan(const HeaderSpec& spec, BitWidth bus_width_bits);

// Validates then compiles. Throws PlanError on an invalid graph.
PipelinePlan plan(const ParserGraph& graph);

// Canonical exports.
std::string plan_to_json(const PipelinePlan& plan);
PipelinePlan plan_from_json(const std::string& text);
std::string plan_to_dot(const PipelinePlan& plan);

}  // namespace pktpipe

#endif  // PKTPIPE_PLANNER_H_
