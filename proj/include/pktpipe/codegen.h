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

#ifndef PKTPIPE_CODEGEN_H_
#define PKTPIPE_CODEGEN_H_

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pktpipe/graph_model.h"
#include "pktpipe/planner.h"

namespace pktpipe {

class CodegenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ManifestEntry {
  std::string path;
  std::string purpose;
  std::size_t bytes = 0;
};

// Generated files keyed by relative path. The manifest lists every file
// except MANIFEST.json itself.
struct SourceBundle {
  std::map<std::string, std::string> files;
  std::vector<ManifestEntry> manifest;
};

inline constexpr std::string_view kBackendMpoCxx = "mpo-cxx";
inline constexpr std::string_view kBackendPlanReport = "plan-report";

std::vector<std::string> available_backends();

// Lowercase, every non-alphanumeric becomes '_', a leading digit gets a
// leading '_'.
std::string sanitize_identifier(std::string_view raw);
// Header id -> unique identifier; collisions get _2, _3, ... in declaration
// order.
std::map<std::string, std::string> identifier_map(const ParserGraph& graph);

SourceBundle emit(const PipelinePlan& plan, const ParserGraph& graph,
                  std::string_view backend);

SourceBundle render_plan_report(const PipelinePlan& plan);

// The generic header module, identical for every design.
std::string_view generic_module_text();

// FNV-1a 64 over paths and contents, as 16 hex digits.
std::string bundle_digest(const SourceBundle& bundle);

}  // namespace pktpipe

#endif  // PKTPIPE_CODEGEN_H_
