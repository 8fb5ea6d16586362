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

#include "pktpipe/traffic.h"

#include <gtest/gtest.h>

#include <set>

#include "pktpipe/planner.h"
#include "pktpipe/simulator.h"
#include "test_util.h"

namespace pktpipe {
namespace {

class TrafficTest : public ::testing::TestWithParam<std::string> {};

TEST_P(TrafficTest, DeterministicForSeed) {
  const ParserGraph g = testing::load_fixture_spec(GetParam());
  const auto a = generate_traffic(g, 100, 42);
  const auto b = generate_traffic(g, 100, 42);
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].bytes, b[i].bytes);
    EXPECT_EQ(a[i].intent, b[i].intent);
  }
  const auto c = generate_traffic(g, 100, 43);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].bytes != c[i].bytes;
  EXPECT_TRUE(differs);
}

TEST_P(TrafficTest, IntentsMatchParseOutcome) {
  const ParserGraph g = testing::load_fixture_spec(GetParam());
  const PipelinePlan p = plan(g);
  const auto traffic = generate_traffic(g, 1000);
  std::size_t broken = 0;
  for (const auto& pkt : traffic) {
    const ParseResult r = reference_parse(g, pkt.bytes);
    switch (pkt.intent) {
      case PacketIntent::kValid:
        EXPECT_TRUE(r.ok()) << r.reason;
        break;
      case PacketIntent::kMalformed:
        ++broken;
        EXPECT_EQ(r.status, ParseStatus::kMalformed);
        break;
      case PacketIntent::kTruncated:
        ++broken;
        EXPECT_EQ(r.status, ParseStatus::kTruncated);
        break;
    }
    EXPECT_EQ(run_packet(p, g, pkt.bytes).status, r.status);
  }
  EXPECT_GE(broken * 10, traffic.size());
}

TEST_P(TrafficTest, ValidPacketsCoverEveryHeader) {
  const ParserGraph g = testing::load_fixture_spec(GetParam());
  std::set<std::string> seen;
  for (const auto& pkt : generate_traffic(g, 1000)) {
    const ParseResult r = reference_parse(g, pkt.bytes);
    seen.insert(r.path.begin(), r.path.end());
  }
  EXPECT_EQ(seen.size(), g.headers.size());
}

INSTANTIATE_TEST_SUITE_P(Fixtures, TrafficTest,
                         ::testing::Values("fig1", "linear_chain", "diamond", "variable_only"));

TEST(Traffic, DefaultSeedIsStable) {
  const ParserGraph g = testing::load_fixture_spec("fig1");
  const auto a = generate_traffic(g, 10);
  const auto b = generate_traffic(g, 10, kDefaultSeed);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].bytes, b[i].bytes);
  EXPECT_TRUE(generate_traffic(g, 0).empty());
}

}  // namespace
}  // namespace pktpipe
