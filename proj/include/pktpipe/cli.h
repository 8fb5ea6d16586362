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

#ifndef PKTPIPE_CLI_H_
#define PKTPIPE_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pktpipe/packet_io.h"
#include "pktpipe/traffic.h"

namespace pktpipe {

enum ExitCode : int {
  kExitOk = 0,
  kExitOperational = 1,  // I/O, syntax, unknown backend, oracle divergence
  kExitValidation = 2,
};

// Environment variable naming the default directory for `emit`.
inline constexpr const char* kOutDirEnv = "PKTPIPE_OUT_DIR";

struct RunConfig {
  std::string command;
  std::string spec_path;
  std::string packets_path;
  PacketFormat packet_format = PacketFormat::kHex;
  std::string out_path;  // empty: stdout, or the default directory for emit
  std::string plan_format = "text";
  std::string backend = "mpo-cxx";
  std::uint64_t seed = kDefaultSeed;
  std::size_t count = 100;
  unsigned jobs = 0;  // 0: hardware concurrency
  bool oracle_check = false;
  int verbosity = 0;
};

// Parses `args` (without the program name) and runs one command.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// Runs an already parsed configuration.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pktpipe

#endif  // PKTPIPE_CLI_H_
