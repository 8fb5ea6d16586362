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

// Drives the generated Parser() one bus word per call and checks every
// packet against the cycle-level simulator.
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "pipeline.cpp"
#include "harness_headers.h"
#include "pktpipe/planner.h"
#include "pktpipe/simulator.h"
#include "pktpipe/traffic.h"

namespace {

template <unsigned N>
std::vector<std::uint8_t> phv_bytes(const PHVData<N>& phv) {
  std::vector<std::uint8_t> out(N / 8);
  for (unsigned i = 0; i < N / 8; ++i) {
    out[i] = static_cast<std::uint8_t>((phv.Data >> (N - 8 * (i + 1))).to_uint() & 0xff);
  }
  return out;
}

struct Observed {
  bool finished = false;
  bool aborted = false;
  std::vector<std::uint8_t> payload;
};

void collect(const PktDataType& w, Observed& obs) {
  if (!w.Valid) return;
  if (w.Abort) obs.aborted = true;
  if (!w.Abort) {
    const unsigned bits = w.TailBits.to_uint();
    for (unsigned b = 0; b < bits / 8; ++b) {
      obs.payload.push_back(static_cast<std::uint8_t>(
          (w.Data >> (BUS_BITS - 8 * (b + 1))).to_uint() & 0xff));
    }
  }
  if (w.Finish) obs.finished = true;
}

// Header id named by a failure reason.
std::string failing_header(const std::string& reason) {
  for (const std::string prefix : {"truncated: stream ended inside ", "length-out-of-range: "}) {
    if (reason.rfind(prefix, 0) == 0) {
      const std::string rest = reason.substr(prefix.size());
      return rest.substr(0, rest.find(' '));
    }
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: harness SPEC COUNT\n";
    return 2;
  }
  const pktpipe::ParserGraph graph = pktpipe::load_spec_file(argv[1]);
  const pktpipe::PipelinePlan plan = pktpipe::plan(graph);
  const auto traffic = pktpipe::generate_traffic(graph, std::strtoull(argv[2], nullptr, 10));
  const unsigned start = static_cast<unsigned>(*graph.index_of(graph.start));

#define DECLARE_PHV(id, ident, bits) ident##_phv_t ident##_phv;
  HARNESS_HEADERS(DECLARE_PHV)
#undef DECLARE_PHV
#define PHV_ARG(id, ident, bits) ident##_phv,

  std::size_t failures = 0;
  auto fail = [&failures](std::size_t i, const std::string& what) {
    if (++failures <= 10) std::cerr << "packet " << i << ": " << what << "\n";
  };

  for (std::size_t i = 0; i < traffic.size(); ++i) {
    const auto& bytes = traffic[i].bytes;
    const pktpipe::ParseResult expected = pktpipe::run_packet(plan, graph, bytes);

    const std::size_t bus_bytes = BUS_BITS / 8;
    const std::size_t words = bytes.empty() ? 1 : (bytes.size() + bus_bytes - 1) / bus_bytes;
    Observed obs;
    std::size_t calls = 0;
    for (std::size_t k = 0; k < words; ++k, ++calls) {
      PktDataType in;
      in.Valid = true;
      in.Start = k == 0;
      in.Finish = k + 1 == words;
      in.NextHeader = start;
      const std::size_t first = k * bus_bytes;
      const std::size_t n = std::min(bus_bytes, bytes.size() - std::min(first, bytes.size()));
      in.TailBits = static_cast<unsigned>(n * 8);
      for (std::size_t b = 0; b < n; ++b) {
        in.Data = in.Data | (ap_uint<BUS_BITS>(bytes[first + b]) << (BUS_BITS - 8 * (b + 1)));
      }
      PktDataType out;
      Parser(in, HARNESS_HEADERS(PHV_ARG) out);
      collect(out, obs);
    }
    while (!obs.finished && calls < words + 4 * plan.register_banks + 8) {
      PktDataType in, out;
      Parser(in, HARNESS_HEADERS(PHV_ARG) out);
      collect(out, obs);
      ++calls;
    }
    if (!obs.finished) {
      fail(i, "no end of packet");
      continue;
    }

    std::set<std::string> valid;
    std::set<std::string> errored;
    std::vector<std::string> mismatched;
    auto check = [&](const std::string& id, bool v, bool e, const std::vector<std::uint8_t>& got) {
      if (e) errored.insert(id);
      if (!v || e) return;
      valid.insert(id);
      for (std::size_t p = 0; p < expected.path.size(); ++p) {
        if (expected.path[p] != id) continue;
        const auto& hb = expected.header_bytes[p];
        if (hb.size() < got.size() || !std::equal(got.begin(), got.end(), hb.begin())) {
          mismatched.push_back(id);
        }
      }
    };
#define CHECK_PHV(id, ident, bits) \
  check(id, ident##_phv.Valid, ident##_phv.Error, phv_bytes(ident##_phv));
    HARNESS_HEADERS(CHECK_PHV)
#undef CHECK_PHV

    const std::set<std::string> path(expected.path.begin(), expected.path.end());
    if (valid != path) fail(i, "valid headers differ from path");
    if (!mismatched.empty()) fail(i, "PHV bytes differ for " + mismatched.front());
    if (expected.ok()) {
      if (obs.aborted) fail(i, "aborted but simulator accepted");
      if (!errored.empty()) fail(i, "error flag on an accepted packet");
      if (obs.payload != expected.payload) fail(i, "payload differs");
    } else {
      if (!obs.aborted) fail(i, "no abort word for " + expected.reason);
      const std::string culprit = failing_header(expected.reason);
      if (errored != std::set<std::string>{culprit}) {
        fail(i, "error flag not on " + culprit);
      }
    }
  }
#undef PHV_ARG

  std::cout << graph.name << ": " << traffic.size() << " packets, " << failures
            << " mismatches\n";
  return failures == 0 ? 0 : 1;
}
