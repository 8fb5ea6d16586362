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

#include "pktpipe/graph_model.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pktpipe {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SpecError(where + ": " + what);
}

void expect_members(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(where, "unknown member '" + key + "'");
    }
  }
}

const json& member(const json& obj, const std::string& where,
                   const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing member '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const std::string& where,
                       const char* key) {
  const json& v = member(obj, where, key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::uint64_t get_uint(const json& obj, const std::string& where,
                       const char* key) {
  const json& v = member(obj, where, key);
  if (!v.is_number_unsigned()) {
    fail(where + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint64_t parse_hex_u64(const json& obj, const std::string& where,
                            const char* key) {
  const std::string s = get_string(obj, where, key);
  const std::string path = where + "." + key;
  if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) {
    fail(path, "expected a hex string such as \"0x0800\", got \"" + s + "\"");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 2; i < s.size(); ++i) {
    const char c = s[i];
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      fail(path, "invalid hex digit in \"" + s + "\"");
    }
    if (v >> 60 != 0) fail(path, "value \"" + s + "\" exceeds 64 bits");
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

FieldSpec parse_field(const json& j, const std::string& where, bool named) {
  if (named) {
    expect_members(j, where, {"name", "offset_bits", "width_bits"});
  } else {
    expect_members(j, where, {"offset_bits", "width_bits"});
  }
  FieldSpec f;
  if (named) f.name = get_string(j, where, "name");
  f.offset_bits = get_uint(j, where, "offset_bits");
  f.width_bits = get_uint(j, where, "width_bits");
  return f;
}

LengthSpec parse_length(const json& j, const std::string& where) {
  expect_members(j, where, {"fixed_bytes", "variable"});
  const bool has_fixed = j.contains("fixed_bytes");
  const bool has_var = j.contains("variable");
  if (has_fixed == has_var) {
    fail(where, "expected exactly one of 'fixed_bytes' or 'variable'");
  }
  if (has_fixed) return FixedLength{get_uint(j, where, "fixed_bytes")};
  const json& v = j.at("variable");
  const std::string vw = where + ".variable";
  expect_members(v, vw,
                 {"field", "multiplier_bits", "addend_bits", "min", "max"});
  VariableLength var;
  var.len_field = parse_field(member(v, vw, "field"), vw + ".field", false);
  var.multiplier_bits = get_uint(v, vw, "multiplier_bits");
  var.addend_bits = get_uint(v, vw, "addend_bits");
  var.min_value = get_uint(v, vw, "min");
  var.max_value = get_uint(v, vw, "max");
  return var;
}

HeaderSpec parse_header(const json& j, const std::string& where) {
  expect_members(j, where,
                 {"id", "name", "length", "key", "transitions", "fields"});
  HeaderSpec h;
  h.id = get_string(j, where, "id");
  if (h.id.empty()) fail(where + ".id", "header id must not be empty");
  if (h.id == kAccept) fail(where + ".id", "'ACCEPT' is reserved");
  h.name = j.contains("name") ? get_string(j, where, "name") : h.id;
  h.length = parse_length(member(j, where, "length"), where + ".length");
  if (j.contains("key")) {
    FieldSpec k = parse_field(j.at("key"), where + ".key", false);
    h.key = KeyLocation{k.offset_bits, k.width_bits};
  }
  if (j.contains("transitions")) {
    const json& ts = j.at("transitions");
    if (!ts.is_array()) fail(where + ".transitions", "expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string tw = where + ".transitions[" + std::to_string(i) + "]";
      expect_members(ts[i], tw, {"value", "mask", "next"});
      TransitionKey t;
      t.value = parse_hex_u64(ts[i], tw, "value");
      t.mask = parse_hex_u64(ts[i], tw, "mask");
      t.next = get_string(ts[i], tw, "next");
      h.transitions.push_back(std::move(t));
    }
  }
  if (j.contains("fields")) {
    const json& fs = j.at("fields");
    if (!fs.is_array()) fail(where + ".fields", "expected an array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      h.fields.push_back(parse_field(
          fs[i], where + ".fields[" + std::to_string(i) + "]", true));
    }
  }
  return h;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::uint64_t HeaderSpec::min_size_bits() const {
  return std::visit(
      Overloaded{
          [](const FixedLength& f) { return b2b(f.bytes); },
          [](const VariableLength& v) {
            return v.multiplier_bits * v.min_value + v.addend_bits;
          }},
      length);
}

std::uint64_t HeaderSpec::max_size_bits() const {
  return std::visit(
      Overloaded{
          [](const FixedLength& f) { return b2b(f.bytes); },
          [](const VariableLength& v) {
            return v.multiplier_bits * v.max_value + v.addend_bits;
          }},
      length);
}

std::vector<std::uint64_t> HeaderSpec::valid_sizes_bits() const {
  std::vector<std::uint64_t> out;
  std::visit(Overloaded{[&](const FixedLength& f) { out.push_back(b2b(f.bytes)); },
                        [&](const VariableLength& v) {
                          for (auto x = v.min_value; x <= v.max_value; ++x) {
                            out.push_back(header_size_bits(*this, x));
                            if (x == v.max_value) break;
                          }
                        }},
             length);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> HeaderSpec::successors() const {
  std::vector<std::string> out;
  for (const auto& t : transitions) {
    if (std::find(out.begin(), out.end(), t.next) == out.end()) {
      out.push_back(t.next);
    }
  }
  const bool can_fall_through = key.has_value() || transitions.empty();
  if (can_fall_through &&
      std::find(out.begin(), out.end(), kAccept) == out.end()) {
    out.emplace_back(kAccept);
  }
  return out;
}

const HeaderSpec* ParserGraph::find(std::string_view id) const {
  for (const auto& h : headers) {
    if (h.id == id) return &h;
  }
  return nullptr;
}

std::optional<std::size_t> ParserGraph::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < headers.size(); ++i) {
    if (headers[i].id == id) return i;
  }
  return std::nullopt;
}

const HeaderSpec& ParserGraph::at(std::string_view id) const {
  const HeaderSpec* h = find(id);
  if (h == nullptr) throw std::out_of_range("no header '" + std::string(id) + "'");
  return *h;
}

ParserGraph load_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw SpecError("syntax error at line " + std::to_string(line) +
                    ", column " + std::to_string(col) + ": " + e.what());
  }
  expect_members(doc, "spec", {"name", "bus_width_bits", "start", "headers"});
  ParserGraph g;
  g.name = get_string(doc, "spec", "name");
  g.bus_width_bits = get_uint(doc, "spec", "bus_width_bits");
  g.start = get_string(doc, "spec", "start");
  const json& hs = member(doc, "spec", "headers");
  if (!hs.is_array()) fail("spec.headers", "expected an array");
  if (hs.empty()) fail("spec.headers", "at least one header is required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const std::string where = "headers[" + std::to_string(i) + "]";
    HeaderSpec h = parse_header(hs[i], where);
    if (!ids.insert(h.id).second) {
      fail(where + ".id", "duplicate header id '" + h.id + "'");
    }
    g.headers.push_back(std::move(h));
  }
  if (ids.count(g.start) == 0) {
    fail("spec.start", "unknown header id '" + g.start + "'");
  }
  for (std::size_t i = 0; i < g.headers.size(); ++i) {
    for (std::size_t t = 0; t < g.headers[i].transitions.size(); ++t) {
      const std::string& next = g.headers[i].transitions[t].next;
      if (next != kAccept && ids.count(next) == 0) {
        fail("headers[" + std::to_string(i) + "].transitions[" +
                 std::to_string(t) + "].next",
             "unknown header id '" + next + "'");
      }
    }
  }
  return g;
}

ParserGraph load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_spec(ss.str());
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kCycle: return "cycle";
    case ViolationKind::kUnreachable: return "unreachable";
    case ViolationKind::kKeyOutOfBounds: return "key-out-of-bounds";
    case ViolationKind::kKeyTooWide: return "key-too-wide";
    case ViolationKind::kKeyOverlap: return "key-overlap";
    case ViolationKind::kStraddlingKey: return "straddling-key";
    case ViolationKind::kTransitionValue: return "transition-value";
    case ViolationKind::kUnconditionalTransitions:
      return "unconditional-transitions";
    case ViolationKind::kLengthSpec: return "length-spec";
    case ViolationKind::kFieldOutOfBounds: return "field-out-of-bounds";
    case ViolationKind::kDuplicateField: return "duplicate-field";
    case ViolationKind::kBusWidth: return "bus-width";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::string out(to_string(kind));
  out += ": ";
  if (!header.empty()) out += "[" + header + "] ";
  out += message;
  return out;
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

bool keys_overlap(const TransitionKey& a, const TransitionKey& b) {
  return ((a.value ^ b.value) & a.mask & b.mask) == 0;
}

namespace {

// Header sizes beyond this are rejected so length arithmetic stays exact.
constexpr std::uint64_t kMaxHeaderBits = std::uint64_t{1} << 24;
// Upper bound on the number of distinct lengths of a variable header.
constexpr std::uint64_t kMaxLengthEntries = 4096;

void check_length(const HeaderSpec& h, std::vector<Violation>& out) {
  auto add = [&](std::string msg) {
    out.push_back({ViolationKind::kLengthSpec, h.id, std::move(msg)});
  };
  if (const auto* f = std::get_if<FixedLength>(&h.length)) {
    if (f->bytes == 0) add("fixed header length must be at least one byte");
    if (b2b(f->bytes) > kMaxHeaderBits) add("fixed header length too large");
    return;
  }
  const auto& v = std::get<VariableLength>(h.length);
  const FieldSpec& lf = v.len_field;
  if (lf.width_bits == 0 || lf.width_bits > 64) {
    add("length field width must be 1..64 bits");
    return;
  }
  if (v.min_value > v.max_value) {
    add("min " + std::to_string(v.min_value) + " exceeds max " +
        std::to_string(v.max_value));
    return;
  }
  if (lf.width_bits < 64 && v.max_value >= (std::uint64_t{1} << lf.width_bits)) {
    add("max " + std::to_string(v.max_value) + " not representable in a " +
        std::to_string(lf.width_bits) + "-bit length field");
  }
  if (v.max_value > kMaxHeaderBits || v.multiplier_bits > kMaxHeaderBits ||
      v.addend_bits > kMaxHeaderBits ||
      h.max_size_bits() > kMaxHeaderBits) {
    add("header length range too large");
    return;
  }
  if (v.max_value - v.min_value >= kMaxLengthEntries) {
    add("more than " + std::to_string(kMaxLengthEntries) +
        " distinct length values");
    return;
  }
  if (v.max_value > v.min_value && v.multiplier_bits == 0) {
    add("multiplier_bits must be positive when min < max");
  }
  if (h.min_size_bits() == 0) add("header length may be zero");
  const bool all_bytes = (v.max_value == v.min_value)
                             ? h.min_size_bits() % 8 == 0
                             : v.multiplier_bits % 8 == 0 &&
                                   h.min_size_bits() % 8 == 0;
  if (!all_bytes) add("header lengths must all be multiples of 8 bits");
  if (lf.end_bits() > h.min_size_bits()) {
    add("length field ends at bit " + std::to_string(lf.end_bits()) +
        " beyond the minimum header length " +
        std::to_string(h.min_size_bits()));
  }
}

void check_key(const HeaderSpec& h, BitWidth bus, BitWidth max_key_width,
               std::vector<Violation>& out) {
  if (!h.key) {
    if (h.transitions.size() > 1) {
      out.push_back({ViolationKind::kUnconditionalTransitions, h.id,
                     "header without a key has " +
                         std::to_string(h.transitions.size()) +
                         " transitions; at most one is allowed"});
    }
    return;
  }
  const KeyLocation& k = *h.key;
  if (k.width_bits == 0 || k.width_bits > max_key_width) {
    out.push_back({ViolationKind::kKeyTooWide, h.id,
                   "key width " + std::to_string(k.width_bits) +
                       " outside 1.." + std::to_string(max_key_width)});
    return;
  }
  if (k.end_bits() > h.min_size_bits()) {
    out.push_back({ViolationKind::kKeyOutOfBounds, h.id,
                   "key ends at bit " + std::to_string(k.end_bits()) +
                       " beyond the minimum header length " +
                       std::to_string(h.min_size_bits())});
  }
  if (bus != 0 && k.offset_bits / bus != (k.end_bits() - 1) / bus) {
    out.push_back({ViolationKind::kStraddlingKey, h.id,
                   "key [" + std::to_string(k.offset_bits) + ", " +
                       std::to_string(k.end_bits()) + ") crosses a " +
                       std::to_string(bus) + "-bit bus word boundary"});
  }
  const std::uint64_t width_mask = create_mask_u64(k.width_bits);
  for (std::size_t i = 0; i < h.transitions.size(); ++i) {
    const auto& t = h.transitions[i];
    if ((t.value & ~t.mask) != 0) {
      out.push_back({ViolationKind::kTransitionValue, h.id,
                     "transition " + std::to_string(i) +
                         " value has bits outside its mask"});
    }
    if ((t.mask & ~width_mask) != 0) {
      out.push_back({ViolationKind::kTransitionValue, h.id,
                     "transition " + std::to_string(i) + " mask exceeds the " +
                         std::to_string(k.width_bits) + "-bit key"});
    }
  }
  for (std::size_t i = 0; i < h.transitions.size(); ++i) {
    for (std::size_t j = i + 1; j < h.transitions.size(); ++j) {
      if (keys_overlap(h.transitions[i], h.transitions[j])) {
        out.push_back({ViolationKind::kKeyOverlap, h.id,
                       "transitions " + std::to_string(i) + " (-> " +
                           h.transitions[i].next + ") and " +
                           std::to_string(j) + " (-> " +
                           h.transitions[j].next +
                           ") match a common key value"});
      }
    }
  }
}

void check_fields(const HeaderSpec& h, std::vector<Violation>& out) {
  std::set<std::string> names;
  for (const auto& f : h.fields) {
    if (!names.insert(f.name).second) {
      out.push_back({ViolationKind::kDuplicateField, h.id,
                     "field '" + f.name + "' declared twice"});
    }
    if (f.width_bits == 0 || f.end_bits() > h.min_size_bits() ||
        f.width_bits > kMaxBusWidth) {
      out.push_back({ViolationKind::kFieldOutOfBounds, h.id,
                     "field '" + f.name + "' [" +
                         std::to_string(f.offset_bits) + ", " +
                         std::to_string(f.end_bits()) +
                         ") outside the minimum header length " +
                         std::to_string(h.min_size_bits())});
    }
  }
}

void check_graph_shape(const ParserGraph& g, std::vector<Violation>& out) {
  const std::size_t n = g.headers.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& s : g.headers[i].successors()) {
      if (auto j = g.index_of(s)) adj[i].push_back(*j);
    }
  }

  // Recursive DFS; parser graphs are small.
  enum class Color { kWhite, kGrey, kBlack };
  std::vector<Color> color(n, Color::kWhite);
  std::vector<std::size_t> stack;
  std::set<std::vector<std::string>> reported;
  std::function<void(std::size_t)> dfs = [&](std::size_t u) {
    color[u] = Color::kGrey;
    stack.push_back(u);
    for (std::size_t v : adj[u]) {
      if (color[v] == Color::kGrey) {
        auto it = std::find(stack.begin(), stack.end(), v);
        std::vector<std::string> cyc;
        for (; it != stack.end(); ++it) cyc.push_back(g.headers[*it].id);
        auto rot = cyc;
        std::rotate(rot.begin(), std::min_element(rot.begin(), rot.end()),
                    rot.end());
        if (reported.insert(rot).second) {
          std::string msg;
          for (const auto& id : cyc) msg += id + " -> ";
          msg += g.headers[v].id;
          out.push_back({ViolationKind::kCycle, "", msg});
        }
      } else if (color[v] == Color::kWhite) {
        dfs(v);
      }
    }
    stack.pop_back();
    color[u] = Color::kBlack;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (color[i] == Color::kWhite) dfs(i);
  }

  std::vector<bool> seen(n, false);
  if (auto s = g.index_of(g.start)) {
    std::vector<std::size_t> work{*s};
    seen[*s] = true;
    while (!work.empty()) {
      const std::size_t u = work.back();
      work.pop_back();
      for (std::size_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          work.push_back(v);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) {
      out.push_back({ViolationKind::kUnreachable, g.headers[i].id,
                     "not reachable from start '" + g.start + "'"});
    }
  }
}

}  // namespace

ValidationReport validate(const ParserGraph& graph,
                          const ValidationOptions& options) {
  ValidationReport report;
  auto& out = report.violations;
  const BitWidth bus = graph.bus_width_bits;
  const bool bus_ok = bus >= 8 && bus <= kMaxBusWidth && bus % 8 == 0;
  if (!bus_ok) {
    out.push_back({ViolationKind::kBusWidth, "",
                   "bus width " + std::to_string(bus) +
                       " must be a multiple of 8 in 8.." +
                       std::to_string(kMaxBusWidth)});
  }
  check_graph_shape(graph, out);
  for (const auto& h : graph.headers) {
    check_length(h, out);
    check_key(h, bus_ok ? bus : 0, options.max_key_width, out);
    check_fields(h, out);
  }
  return report;
}

std::uint64_t header_size_bits(const HeaderSpec& spec,
                               std::uint64_t expr_val) {
  return std::visit(
      Overloaded{
          [](const FixedLength& f) { return b2b(f.bytes); },
          [&](const VariableLength& v) {
            if (expr_val < v.min_value || expr_val > v.max_value) {
              throw MalformedLength(
                  "length-out-of-range: " + spec.id + " length field value " +
                  std::to_string(expr_val) + " outside " +
                  std::to_string(v.min_value) + ".." +
                  std::to_string(v.max_value));
            }
            return v.multiplier_bits * expr_val + v.addend_bits;
          }},
      spec.length);
}

}  // namespace pktpipe
