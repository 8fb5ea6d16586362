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

#include "pktpipe/planner.h"

#include <algorithm>

namespace pktpipe {

bool HeaderPlan::has_length(std::uint64_t bits) const {
  return std::any_of(bus_span.begin(), bus_span.end(),
                     [bits](const auto& e) { return e.first == bits; });
}

std::size_t HeaderPlan::shift_for(std::uint64_t bits) const {
  if (const auto* lut = std::get_if<ShiftLut>(&shift_plan)) {
    auto it = lut->entries.find(bits);
    if (it == lut->entries.end()) {
      throw std::logic_error("header '" + id + "': length " +
                             std::to_string(bits) +
                             " missing from the shift table");
    }
    return it->second;
  }
  if (!has_length(bits)) {
    throw std::logic_error("header '" + id + "': length " +
                           std::to_string(bits) + " is not a planned length");
  }
  return std::get<FixedShift>(shift_plan).shift;
}

std::size_t PipelinePlan::level_of(const std::string& id) const {
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (std::find(levels[l].begin(), levels[l].end(), id) != levels[l].end()) {
      return l;
    }
  }
  throw std::out_of_range("header '" + id + "' not scheduled");
}

std::uint64_t PipelinePlan::latency_cycles(std::uint64_t words) const {
  return register_banks + (words == 0 ? 0 : words - 1);
}

Levels level_schedule(const ParserGraph& graph) {
  const std::size_t n = graph.headers.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& s : graph.headers[i].successors()) {
      if (auto j = graph.index_of(s)) {
        succ[i].push_back(*j);
        ++indegree[*j];
      }
    }
  }

  // Kahn's algorithm in declaration order; depth relaxes along each edge so
  // the final value is the longest distance from start.
  std::vector<std::size_t> depth(n, 0);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.front();
    ready.erase(ready.begin());
    ++visited;
    for (std::size_t v : succ[u]) {
      depth[v] = std::max(depth[v], depth[u] + 1);
      if (--indegree[v] == 0) ready.push_back(v);
    }
  }
  if (visited != n) {
    throw std::logic_error("level_schedule: parser graph has a cycle");
  }

  const std::size_t deepest = *std::max_element(depth.begin(), depth.end());
  Levels levels(deepest + 1);
  for (std::size_t i = 0; i < n; ++i) {
    levels[depth[i]].push_back(graph.headers[i].id);
  }
  return levels;
}

std::vector<MuxSpec> place_muxes(const ParserGraph& /*graph*/,
                                 const Levels& levels) {
  std::vector<MuxSpec> muxes;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (levels[l].size() < 2) continue;
    MuxSpec m;
    if (l + 1 < levels.size()) m.feeds_level = l + 1;
    m.inputs = levels[l];
    m.select = levels[l].front();
    muxes.push_back(std::move(m));
  }
  return muxes;
}

HeaderPlan build_header_plan(const HeaderSpec& spec, BitWidth bus_width_bits) {
  HeaderPlan hp;
  hp.id = spec.id;
  if (spec.key) {
    hp.state_shift = shift_def(spec.min_size_bits(), bus_width_bits,
                               spec.key->end_bits(), spec.key->width_bits);
  }
  const auto lengths = spec.valid_sizes_bits();
  for (auto len : lengths) hp.bus_span.emplace_back(len, len > bus_width_bits);

  const bool word_multiples =
      std::all_of(lengths.begin(), lengths.end(),
                  [&](std::uint64_t len) { return len % bus_width_bits == 0; });
  if (!spec.is_variable()) {
    hp.shift_plan = FixedShift{lengths.front() % bus_width_bits};
  } else if (word_multiples) {
    hp.shift_plan = FixedShift{0};
  } else {
    ShiftLut lut;
    for (auto len : lengths) lut.entries.emplace(len, len % bus_width_bits);
    hp.shift_plan = std::move(lut);
  }
  hp.rx_counter_width = numbits(spec.max_size_bits());
  return hp;
}

PipelinePlan plan(const ParserGraph& graph) {
  ValidationReport report = validate(graph);
  if (!report.ok()) {
    std::string what = "cannot plan invalid design '" + graph.name + "':";
    for (const auto& v : report.violations) what += "\n  " + v.describe();
    throw PlanError(what, std::move(report));
  }
  PipelinePlan p;
  p.design = graph.name;
  p.bus_width_bits = graph.bus_width_bits;
  p.levels = level_schedule(graph);
  p.register_banks = p.levels.size();
  p.muxes = place_muxes(graph, p.levels);
  for (const auto& h : graph.headers) {
    p.header_plans.emplace(h.id, build_header_plan(h, graph.bus_width_bits));
  }
  return p;
}

}  // namespace pktpipe
