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

#ifndef PKTPIPE_GRAPH_MODEL_H_
#define PKTPIPE_GRAPH_MODEL_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pktpipe/bitlab.h"

namespace pktpipe {

// Terminal transition target.
inline constexpr std::string_view kAccept = "ACCEPT";

// Load-time failure: malformed document, duplicate ids, unknown references.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldSpec {
  std::string name;
  BitOffset offset_bits = 0;
  BitWidth width_bits = 0;

  BitOffset end_bits() const { return offset_bits + width_bits; }
};

struct KeyLocation {
  BitOffset offset_bits = 0;
  BitWidth width_bits = 0;

  BitOffset end_bits() const { return offset_bits + width_bits; }
};

struct TransitionKey {
  std::uint64_t value = 0;
  std::uint64_t mask = 0;
  std::string next;  // header id or kAccept
};

struct FixedLength {
  std::uint64_t bytes = 0;
};

// length(x) = multiplier_bits * x + addend_bits, for min_value <= x <= max_value
// where x is read from `len_field`.
struct VariableLength {
  FieldSpec len_field;
  std::uint64_t multiplier_bits = 0;
  std::uint64_t addend_bits = 0;
  std::uint64_t min_value = 0;
  std::uint64_t max_value = 0;
};

using LengthSpec = std::variant<FixedLength, VariableLength>;

struct HeaderSpec {
  std::string id;
  std::string name;
  LengthSpec length;
  std::optional<KeyLocation> key;
  std::vector<TransitionKey> transitions;
  std::vector<FieldSpec> fields;

  bool is_variable() const {
    return std::holds_alternative<VariableLength>(length);
  }
  std::uint64_t min_size_bits() const;
  std::uint64_t max_size_bits() const;
  // Every length the header may take, ascending.
  std::vector<std::uint64_t> valid_sizes_bits() const;
  // Successor ids in declaration order, kAccept included when reachable.
  std::vector<std::string> successors() const;
};

struct ParserGraph {
  std::string name;
  BitWidth bus_width_bits = 0;
  std::string start;
  std::vector<HeaderSpec> headers;

  const HeaderSpec* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  const HeaderSpec& at(std::string_view id) const;
};

// Parses the JSON design document. Only structural checks are made here;
// semantic rules live in validate().
ParserGraph load_spec(std::string_view text);
ParserGraph load_spec_file(const std::string& path);

enum class ViolationKind {
  kCycle,
  kUnreachable,
  kKeyOutOfBounds,
  kKeyTooWide,
  kKeyOverlap,
  kStraddlingKey,
  kTransitionValue,
  kUnconditionalTransitions,
  kLengthSpec,
  kFieldOutOfBounds,
  kDuplicateField,
  kBusWidth,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string header;  // empty for graph-level violations
  std::string message;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

struct ValidationOptions {
  BitWidth max_key_width = kDefaultMaxKeyWidth;
};

ValidationReport validate(const ParserGraph& graph,
                          const ValidationOptions& options = {});

// True when some key value matches both transitions under their masks.
bool keys_overlap(const TransitionKey& a, const TransitionKey& b);

// Signals an out-of-range length field value at run time.
class MalformedLength : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header length in bits. Fixed headers ignore `expr_val`; variable headers
// evaluate multiplier * expr_val + addend and throw MalformedLength when
// expr_val lies outside [min_value, max_value].
std::uint64_t header_size_bits(const HeaderSpec& spec, std::uint64_t expr_val);

}  // namespace pktpipe

#endif  // PKTPIPE_GRAPH_MODEL_H_
