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

#include "pktpipe/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <system_error>
#include <thread>

#include "CLI11.hpp"
#include "pktpipe/codegen.h"
#include "pktpipe/graph_model.h"
#include "pktpipe/planner.h"
#include "pktpipe/simulator.h"

namespace pktpipe {
namespace {

namespace fs = std::filesystem;

class OperationalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw OperationalError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw OperationalError(path.string() + ": write failed");
}

// Writes to --out when given, else to `out`.
void deliver(const RunConfig& cfg, std::ostream& out, std::string_view text) {
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    write_file(cfg.out_path, text);
  }
}

ParserGraph load(const RunConfig& cfg) { return load_spec_file(cfg.spec_path); }

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ParserGraph graph = load(cfg);
  const ValidationReport report = validate(graph);
  if (!report.ok()) {
    for (const auto& v : report.violations) err << v.describe() << "\n";
    return kExitValidation;
  }
  out << "ok: " << graph.name << " (" << graph.headers.size() << " headers)\n";
  return kExitOk;
}

int cmd_plan(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ParserGraph graph = load(cfg);
  const PipelinePlan p = plan(graph);
  if (cfg.plan_format == "json") {
    deliver(cfg, out, plan_to_json(p));
  } else if (cfg.plan_format == "dot") {
    deliver(cfg, out, plan_to_dot(p));
  } else {
    const SourceBundle report = render_plan_report(p);
    for (const auto& [path, text] : report.files) {
      if (path.ends_with("/report.txt")) deliver(cfg, out, text);
    }
  }
  return kExitOk;
}

int cmd_sim(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ParserGraph graph = load(cfg);
  const PipelinePlan p = plan(graph);
  const auto packets = read_packets_file(cfg.packets_path, cfg.packet_format);
  const unsigned jobs =
      cfg.jobs != 0 ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  const auto results = run_batch(p, graph, packets, jobs);

  std::string lines;
  for (std::size_t i = 0; i < results.size(); ++i) {
    lines += result_to_json(results[i], i);
    lines += '\n';
  }
  deliver(cfg, out, lines);

  std::size_t divergences = 0;
  if (cfg.oracle_check) {
    for (std::size_t i = 0; i < packets.size(); ++i) {
      const std::string diff =
          compare_results(results[i], reference_parse(graph, packets[i]));
      if (!diff.empty()) {
        ++divergences;
        err << "packet " << i << ": " << diff << "\n";
      }
    }
  }
  if (cfg.verbosity > 0) {
    std::map<ParseStatus, std::size_t> by_status;
    for (const auto& r : results) ++by_status[r.status];
    err << packets.size() << " packets:";
    for (const auto& [status, n] : by_status) err << " " << to_string(status) << "=" << n;
    if (cfg.oracle_check) err << " divergences=" << divergences;
    err << "\n";
  }
  return divergences == 0 ? kExitOk : kExitOperational;
}

int cmd_emit(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ParserGraph graph = load(cfg);
  const PipelinePlan p = plan(graph);
  const SourceBundle bundle = emit(p, graph, cfg.backend);
  fs::path root = cfg.out_path;
  if (root.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    root = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
  }
  for (const auto& [path, text] : bundle.files) {
    write_file(root / path, text);
    out << (root / path).string() << "\n";
  }
  return kExitOk;
}

int cmd_gen_traffic(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ParserGraph graph = load(cfg);
  const ValidationReport report = validate(graph);
  if (!report.ok()) throw PlanError("invalid parser graph", report);
  const auto traffic = generate_traffic(graph, cfg.count, cfg.seed);
  std::vector<Packet> packets;
  packets.reserve(traffic.size());
  for (const auto& g : traffic) packets.push_back(g.bytes);

  switch (cfg.packet_format) {
    case PacketFormat::kHex:
      deliver(cfg, out, write_hex_packets(packets));
      break;
    case PacketFormat::kRaw: {
      const auto bytes = write_raw_packets(packets);
      deliver(cfg, out, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
      break;
    }
    case PacketFormat::kPcap: {
      const auto bytes = write_pcap(packets);
      deliver(cfg, out, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
      break;
    }
  }
  if (cfg.verbosity > 0) {
    std::size_t broken = 0;
    for (const auto& g : traffic) broken += g.intent != PacketIntent::kValid;
    err << traffic.size() << " packets, " << broken << " malformed or truncated, seed "
        << cfg.seed << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "validate") return cmd_validate(cfg, out, err);
    if (cfg.command == "plan") return cmd_plan(cfg, out, err);
    if (cfg.command == "sim") return cmd_sim(cfg, out, err);
    if (cfg.command == "emit") return cmd_emit(cfg, out, err);
    if (cfg.command == "gen-traffic") return cmd_gen_traffic(cfg, out, err);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitOperational;
  } catch (const PlanError& e) {
    for (const auto& v : e.report().violations) err << v.describe() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOperational;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  RunConfig cfg;
  std::string packet_format = "hex";

  CLI::App app{"Packet parser pipeline compiler and simulator", "pktpipe"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all");
  app.add_flag("-v,--verbose", cfg.verbosity, "More diagnostics on stderr");

  auto spec_arg = [&cfg](CLI::App* sub) {
    sub->add_option("spec", cfg.spec_path, "Parser graph JSON")
        ->required()
        ->check(CLI::ExistingFile);
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a parser graph");
  spec_arg(validate_cmd);

  auto* plan_cmd = app.add_subcommand("plan", "Compute the pipeline plan");
  spec_arg(plan_cmd);
  plan_cmd->add_option("--format", cfg.plan_format, "text, json or dot")
      ->check(CLI::IsMember({"text", "json", "dot"}));
  plan_cmd->add_option("--out", cfg.out_path, "Output file (default stdout)");

  auto* sim_cmd = app.add_subcommand("sim", "Simulate the pipeline over packets");
  spec_arg(sim_cmd);
  sim_cmd->add_option("--packets", cfg.packets_path, "Packet file")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--packet-format", packet_format, "hex, raw or pcap")
      ->check(CLI::IsMember({"hex", "raw", "pcap"}));
  sim_cmd->add_option("--out", cfg.out_path, "JSON-lines results (default stdout)");
  sim_cmd->add_flag("--oracle-check", cfg.oracle_check,
                    "Compare every result with the reference interpreter");
  sim_cmd->add_option("--jobs", cfg.jobs, "Worker threads (default: all cores)");

  auto* emit_cmd = app.add_subcommand("emit", "Generate sources");
  spec_arg(emit_cmd);
  emit_cmd->add_option("--backend", cfg.backend, "mpo-cxx or plan-report");
  emit_cmd->add_option("--out", cfg.out_path,
                       std::string("Output directory (default $") + kOutDirEnv +
                           " or .)");

  auto* gen_cmd = app.add_subcommand("gen-traffic", "Generate a test packet corpus");
  spec_arg(gen_cmd);
  gen_cmd->add_option("--count", cfg.count, "Number of packets");
  gen_cmd->add_option("--seed", cfg.seed, "Generator seed");
  gen_cmd->add_option("--packet-format", packet_format, "hex, raw or pcap")
      ->check(CLI::IsMember({"hex", "raw", "pcap"}));
  gen_cmd->add_option("--out", cfg.out_path, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitOperational;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.packet_format = *parse_packet_format(packet_format);
  return run_command(cfg, out, err);
}

}  // namespace pktpipe
