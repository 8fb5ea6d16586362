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

#include <sstream>

#include "json.hpp"
#include "pktpipe/planner.h"

namespace pktpipe {
namespace {

using nlohmann::json;

json header_plan_json(const HeaderPlan& hp) {
  json j;
  j["state_shift"] = hp.state_shift ? json(*hp.state_shift) : json(nullptr);
  if (const auto* f = std::get_if<FixedShift>(&hp.shift_plan)) {
    j["shift_plan"] = {{"fixed", f->shift}};
  } else {
    json lut = json::array();
    for (const auto& [len, shift] : std::get<ShiftLut>(hp.shift_plan).entries) {
      lut.push_back({{"length_bits", len}, {"shift", shift}});
    }
    j["shift_plan"] = {{"lut", lut}};
  }
  json span = json::array();
  for (const auto& [len, spans] : hp.bus_span) {
    span.push_back({{"length_bits", len}, {"spans_bus", spans}});
  }
  j["bus_span"] = span;
  j["rx_counter_width"] = hp.rx_counter_width;
  return j;
}

HeaderPlan header_plan_from_json(const std::string& id, const json& j) {
  HeaderPlan hp;
  hp.id = id;
  if (!j.at("state_shift").is_null()) {
    hp.state_shift = j.at("state_shift").get<std::size_t>();
  }
  const json& sp = j.at("shift_plan");
  if (sp.contains("fixed")) {
    hp.shift_plan = FixedShift{sp.at("fixed").get<std::size_t>()};
  } else {
    ShiftLut lut;
    for (const auto& e : sp.at("lut")) {
      lut.entries.emplace(e.at("length_bits").get<std::uint64_t>(),
                          e.at("shift").get<std::size_t>());
    }
    hp.shift_plan = std::move(lut);
  }
  for (const auto& e : j.at("bus_span")) {
    hp.bus_span.emplace_back(e.at("length_bits").get<std::uint64_t>(),
                             e.at("spans_bus").get<bool>());
  }
  hp.rx_counter_width = j.at("rx_counter_width").get<BitWidth>();
  return hp;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string plan_to_json(const PipelinePlan& plan) {
  json j;
  j["design"] = plan.design;
  j["bus_width_bits"] = plan.bus_width_bits;
  j["register_banks"] = plan.register_banks;
  j["levels"] = plan.levels;
  json muxes = json::array();
  for (const auto& m : plan.muxes) {
    muxes.push_back({{"site", m.feeds_level ? json(*m.feeds_level)
                                            : json("OUTPUT")},
                     {"inputs", m.inputs},
                     {"select", m.select}});
  }
  j["muxes"] = muxes;
  json hps = json::object();
  for (const auto& [id, hp] : plan.header_plans) hps[id] = header_plan_json(hp);
  j["header_plans"] = hps;
  return j.dump(2) + "\n";
}

PipelinePlan plan_from_json(const std::string& text) {
  const json j = json::parse(text);
  PipelinePlan p;
  p.design = j.at("design").get<std::string>();
  p.bus_width_bits = j.at("bus_width_bits").get<BitWidth>();
  p.register_banks = j.at("register_banks").get<std::size_t>();
  p.levels = j.at("levels").get<Levels>();
  for (const auto& m : j.at("muxes")) {
    MuxSpec mux;
    if (m.at("site").is_number()) {
      mux.feeds_level = m.at("site").get<std::size_t>();
    }
    mux.inputs = m.at("inputs").get<std::vector<std::string>>();
    mux.select = m.at("select").get<std::string>();
    p.muxes.push_back(std::move(mux));
  }
  for (const auto& [id, hp] : j.at("header_plans").items()) {
    p.header_plans.emplace(id, header_plan_from_json(id, hp));
  }
  return p;
}

std::string plan_to_dot(const PipelinePlan& plan) {
  std::ostringstream os;
  os << "digraph " << quoted(plan.design) << " {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=box];\n";
  os << "  data_in [shape=plaintext, label=\"Data In\"];\n";
  os << "  data_out [shape=plaintext, label=\"Data Out\"];\n";

  auto mux_for_level = [&](std::size_t l) -> const MuxSpec* {
    for (const auto& m : plan.muxes) {
      const std::size_t src =
          m.feeds_level ? *m.feeds_level - 1 : plan.levels.size() - 1;
      if (src == l) return &m;
    }
    return nullptr;
  };

  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    os << "  subgraph cluster_level" << l << " {\n";
    os << "    label=\"level " << l << "\";\n";
    for (const auto& id : plan.levels[l]) os << "    " << quoted(id) << ";\n";
    os << "  }\n";
    os << "  pipe_reg" << l << " [shape=record, label=\"Pipe Register " << l
       << "\"];\n";
    if (const MuxSpec* m = mux_for_level(l)) {
      os << "  mux" << l << " [shape=trapezium, orientation=270, label=\"mux | "
         << m->select << ".Valid\"];\n";
    }
  }

  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    const std::string src = l == 0 ? "data_in" : "pipe_reg" + std::to_string(l - 1);
    for (const auto& id : plan.levels[l]) {
      os << "  " << src << " -> " << quoted(id) << ";\n";
    }
    if (mux_for_level(l) != nullptr) {
      for (const auto& id : plan.levels[l]) {
        os << "  " << quoted(id) << " -> mux" << l << ";\n";
      }
      os << "  mux" << l << " -> pipe_reg" << l << ";\n";
    } else {
      for (const auto& id : plan.levels[l]) {
        os << "  " << quoted(id) << " -> pipe_reg" << l << ";\n";
      }
    }
  }
  os << "  pipe_reg" << plan.levels.size() - 1 << " -> data_out;\n";
  os << "}\n";
  return os.str();
}

}  // namespace pktpipe
