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

#include "pktpipe/simulator.h"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace pktpipe {

std::string_view to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::kOk: return "ok";
    case ParseStatus::kMalformed: return "malformed";
    case ParseStatus::kTruncated: return "truncated";
  }
  return "unknown";
}

std::string truncated_reason(const std::string& header_id) {
  return "truncated: stream ended inside " + header_id;
}

std::vector<BusWord> pack_packet(std::span<const std::uint8_t> packet,
                                 BitWidth bus_width_bits,
                                 std::size_t start_index) {
  const std::size_t bytes_per_word = bus_width_bits / 8;
  const std::size_t n = std::max<std::size_t>(
      1, (packet.size() + bytes_per_word - 1) / bytes_per_word);
  std::vector<BusWord> words(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = i * bytes_per_word;
    const std::size_t len =
        begin < packet.size() ? std::min(bytes_per_word, packet.size() - begin)
                              : 0;
    BusWord& w = words[i];
    w.data = WideBits::from_bytes(packet.subspan(begin, len), bus_width_bits);
    w.valid = true;
    w.sop = i == 0;
    w.eop = i + 1 == n;
    w.tail_bits = len * 8;
    w.dest = start_index;
  }
  return words;
}

void advance_rx_bits(HeaderRuntime& rt, const HeaderPlan& hp,
                     BitWidth bus_width_bits) {
  const std::uint64_t limit = hp.rx_counter_width >= 64
                                  ? ~std::uint64_t{0}
                                  : (std::uint64_t{1} << hp.rx_counter_width) - 1;
  rt.rx_bits = std::min(limit, rt.rx_bits + bus_width_bits);
}

void state_transition(HeaderRuntime& rt, const HeaderSpec& spec,
                      const HeaderPlan& hp, const WideBits& word) {
  if (rt.next_header_valid) return;
  if (!spec.key) {
    if (!spec.transitions.empty()) {
      rt.next_header = spec.transitions.front().next;
      rt.next_header_valid = true;
    }
    return;
  }
  // The key is evaluated once, on the first word taking rx_bits past its
  // offset; validation guarantees the whole key sits in that word.
  if (rt.key_evaluated || rt.rx_bits <= spec.key->offset_bits) return;
  rt.key_evaluated = true;
  const std::uint64_t mask = create_mask_u64(spec.key->width_bits);
  const std::uint64_t packet_key = (word >> *hp.state_shift).to_u64() & mask;
  for (const auto& key : spec.transitions) {
    if (key.value == (packet_key & key.mask)) {
      rt.next_header = key.next;
      rt.next_header_valid = true;
    }
  }
}

WideBits pipeline_adjust(const HeaderPlan& hp, const WideBits& current,
                         const WideBits& next, std::uint64_t consumed_bits) {
  const std::size_t shift = hp.shift_for(consumed_bits);
  if (shift == 0) return current;
  return (current << shift) | (next >> (current.width() - shift));
}

HeaderStage::HeaderStage(const ParserGraph& graph, std::size_t index,
                         const HeaderPlan& plan)
    : graph_(&graph),
      spec_(&graph.headers.at(index)),
      plan_(&plan),
      index_(index),
      bus_(graph.bus_width_bits) {}

void HeaderStage::reset() {
  rt_ = HeaderRuntime{};
  active_ = false;
  swallow_ = false;
  complete_ = false;
  words_in_ = 0;
  bits_in_ = 0;
  length_.reset();
  header_words_.clear();
  pending_.reset();
  words_out_ = 0;
  out_q_.clear();
  phv_ = HeaderVector{};
  status_ = ParseStatus::kOk;
  reason_.clear();
}

BusWord HeaderStage::pop_or_bubble() {
  if (out_q_.empty()) return BusWord{};
  BusWord w = std::move(out_q_.front());
  out_q_.pop_front();
  return w;
}

std::optional<std::size_t> HeaderStage::next_dest() const {
  if (!rt_.next_header_valid || rt_.next_header == kAccept) return std::nullopt;
  return graph_->index_of(rt_.next_header);
}

void HeaderStage::emit(WideBits data) {
  BusWord w;
  w.data = std::move(data);
  w.valid = true;
  w.sop = words_out_ == 0;
  w.tail_bits = bus_;
  w.dest = next_dest();
  out_q_.push_back(std::move(w));
  ++words_out_;
}

WideBits HeaderStage::header_slice(BitOffset offset, BitWidth width) const {
  WideBits out(width);
  BitOffset pos = offset;
  const BitOffset end = offset + width;
  while (pos < end) {
    const std::size_t word = pos / bus_;
    const BitOffset in_word = pos % bus_;
    const BitWidth take = std::min<BitWidth>(bus_ - in_word, end - pos);
    const WideBits piece = extract_bits(header_words_.at(word), in_word, take);
    out = (out << take) | piece.resized(width);
    pos += take;
  }
  return out;
}

void HeaderStage::complete_header() {
  complete_ = true;
  for (const auto& f : spec_->fields) {
    if (rt_.phv_accum.count(f.name) == 0) {
      rt_.phv_accum.emplace(f.name, header_slice(f.offset_bits, f.width_bits));
    }
  }
  phv_.valid = true;
  phv_.fields = rt_.phv_accum;
}

void HeaderStage::fail(ParseStatus status, std::string reason) {
  status_ = status;
  reason_ = std::move(reason);
  swallow_ = true;
  BusWord w;
  w.data = WideBits(bus_);
  w.valid = true;
  w.sop = words_out_ == 0;
  w.eop = true;
  w.status = status;
  out_q_.push_back(std::move(w));
  ++words_out_;
}

void HeaderStage::finish_stream() {
  const std::uint64_t len = *length_;
  const std::uint64_t remaining = bits_in_ - len;
  const std::uint64_t needed =
      std::max<std::uint64_t>(1, (remaining + bus_ - 1) / bus_);
  while (words_out_ < needed) {
    // The last output beat pairs the held word with zero padding.
    WideBits data = pending_ ? pipeline_adjust(*plan_, *pending_,
                                               WideBits(bus_), len)
                             : WideBits(bus_);
    pending_.reset();
    emit(std::move(data));
  }
  BusWord& last = out_q_.back();
  last.eop = true;
  last.tail_bits = remaining - (needed - 1) * bus_;
}

BusWord HeaderStage::header_analysis(const BusWord& in) {
  if (!in.valid) return pop_or_bubble();
  if (in.sop) {
    reset();
    active_ = in.status == ParseStatus::kOk && in.dest == index_;
  }
  if (!active_) return in;
  if (swallow_) return pop_or_bubble();

  const std::uint64_t i = words_in_++;
  bits_in_ += in.tail_bits;
  advance_rx_bits(rt_, *plan_, bus_);
  if (i * bus_ < spec_->max_size_bits()) header_words_.push_back(in.data);
  state_transition(rt_, *spec_, *plan_, in.data);

  const std::uint64_t seen = std::min<std::uint64_t>((i + 1) * bus_, bits_in_);
  for (const auto& f : spec_->fields) {
    if (f.end_bits() <= seen && rt_.phv_accum.count(f.name) == 0) {
      rt_.phv_accum.emplace(f.name, header_slice(f.offset_bits, f.width_bits));
    }
  }

  if (!length_) {
    if (const auto* var = std::get_if<VariableLength>(&spec_->length)) {
      const FieldSpec& lf = var->len_field;
      if (lf.end_bits() <= seen) {
        const std::uint64_t v =
            header_slice(lf.offset_bits, lf.width_bits).to_u64();
        try {
          length_ = header_size_bits(*spec_, v);
        } catch (const MalformedLength& e) {
          fail(ParseStatus::kMalformed, e.what());
          return pop_or_bubble();
        }
      }
    } else {
      length_ = spec_->min_size_bits();
    }
  }

  if (in.eop && (!length_ || bits_in_ < *length_)) {
    fail(ParseStatus::kTruncated, truncated_reason(spec_->id));
    return pop_or_bubble();
  }

  if (length_) {
    const std::uint64_t skip_words = *length_ / bus_;
    if (i == skip_words) {
      pending_ = in.data;
    } else if (i > skip_words) {
      emit(pipeline_adjust(*plan_, *pending_, in.data, *length_));
      pending_ = in.data;
    }
    if (!complete_ && seen >= *length_) complete_header();
    if (in.eop) finish_stream();
  }
  return pop_or_bubble();
}

std::vector<std::uint8_t> HeaderStage::header_bytes() const {
  if (!complete_) return {};
  std::vector<std::uint8_t> out;
  for (const auto& w : header_words_) {
    auto b = w.to_bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  out.resize(*length_ / 8);
  return out;
}

PipelineSimulator::PipelineSimulator(const ParserGraph& graph,
                                     const PipelinePlan& plan)
    : graph_(&graph), plan_(&plan) {
  if (graph.bus_width_bits != plan.bus_width_bits ||
      graph.headers.size() != plan.header_plans.size()) {
    throw std::invalid_argument("plan was not built from this graph");
  }
  for (const auto& level : plan.levels) {
    auto& row = stages_.emplace_back();
    row.reserve(level.size());
    for (const auto& id : level) {
      const auto idx = graph.index_of(id);
      const auto hp = plan.header_plans.find(id);
      if (!idx || hp == plan.header_plans.end()) {
        throw std::invalid_argument("plan header '" + id +
                                    "' missing from graph");
      }
      row.emplace_back(graph, *idx, hp->second);
    }
  }
}

BusWord PipelineSimulator::merge(std::size_t level, const BusWord& in) {
  auto& row = stages_[level];
  std::vector<BusWord> outs;
  outs.reserve(row.size());
  for (auto& stage : row) outs.push_back(stage.header_analysis(in));
  // Left fold of ternaries: sel0 ? out0 : (sel1 ? out1 : ... outN).
  for (std::size_t k = 0; k + 1 < row.size(); ++k) {
    if (row[k].selected()) return std::move(outs[k]);
  }
  return std::move(outs.back());
}

ParseResult PipelineSimulator::run(std::span<const std::uint8_t> packet) {
  for (auto& row : stages_) {
    for (auto& s : row) s.reset();
  }
  const auto start = graph_->index_of(graph_->start);
  const std::vector<BusWord> input =
      pack_packet(packet, graph_->bus_width_bits, *start);

  const std::size_t nlevels = stages_.size();
  std::vector<BusWord> regs(nlevels);
  std::vector<BusWord> out;
  const std::uint64_t max_cycles = input.size() + 4 * nlevels + 16;
  std::uint64_t cycle = 0;
  bool done = false;
  while (!done) {
    if (cycle >= max_cycles) {
      throw std::logic_error("pipeline did not drain within " +
                             std::to_string(max_cycles) + " cycles");
    }
    const BusWord feed = cycle < input.size() ? input[cycle] : BusWord{};
    std::vector<BusWord> next(nlevels);
    for (std::size_t l = 0; l < nlevels; ++l) {
      next[l] = merge(l, l == 0 ? feed : regs[l - 1]);
    }
    regs = std::move(next);
    ++cycle;
    if (regs.back().valid) {
      out.push_back(regs.back());
      done = regs.back().eop;
    }
  }
  last_cycles_ = cycle;

  ParseResult r;
  r.latency_cycles = plan_->latency_cycles(input.size());
  for (const auto& h : graph_->headers) r.phv[h.id] = HeaderVector{};
  for (const auto& row : stages_) {
    for (const auto& s : row) {
      r.phv[s.id()] = s.phv();
      if (s.phv().valid) {
        r.path.push_back(s.id());
        r.header_bytes.push_back(s.header_bytes());
        r.payload_offset_bits += *s.length_bits();
      }
      if (s.status() != ParseStatus::kOk) {
        r.status = s.status();
        r.reason = s.reason();
      }
    }
  }
  if (out.back().status != r.status) {
    throw std::logic_error("pipeline output status disagrees with stages");
  }
  if (r.ok()) {
    for (const auto& w : out) {
      auto bytes = w.data.to_bytes();
      r.payload.insert(r.payload.end(), bytes.begin(),
                       bytes.begin() + static_cast<std::ptrdiff_t>(w.tail_bits / 8));
    }
  }
  return r;
}

ParseResult run_packet(const PipelinePlan& plan, const ParserGraph& graph,
                       std::span<const std::uint8_t> packet) {
  PipelineSimulator sim(graph, plan);
  return sim.run(packet);
}

std::vector<ParseResult> run_batch(
    const PipelinePlan& plan, const ParserGraph& graph,
    const std::vector<std::vector<std::uint8_t>>& packets, unsigned jobs) {
  std::vector<ParseResult> results(packets.size());
  jobs = std::max(1U, std::min<unsigned>(
                          jobs, static_cast<unsigned>(packets.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    PipelineSimulator sim(graph, plan);
    for (std::size_t i = next++; i < packets.size(); i = next++) {
      results[i] = sim.run(packets[i]);
    }
  };
  if (jobs <= 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  pool.clear();
  return results;
}

std::string compare_results(const ParseResult& pipeline,
                            const ParseResult& oracle) {
  if (pipeline.status != oracle.status) {
    return "status " + std::string(to_string(pipeline.status)) + " vs " +
           std::string(to_string(oracle.status));
  }
  if (pipeline.reason != oracle.reason) {
    return "reason '" + pipeline.reason + "' vs '" + oracle.reason + "'";
  }
  if (pipeline.path != oracle.path) return "path differs";
  if (pipeline.payload_offset_bits != oracle.payload_offset_bits) {
    return "payload offset " + std::to_string(pipeline.payload_offset_bits) +
           " vs " + std::to_string(oracle.payload_offset_bits);
  }
  for (const auto& [id, hv] : oracle.phv) {
    auto it = pipeline.phv.find(id);
    if (it == pipeline.phv.end()) return "PHV missing header " + id;
    if (it->second.valid != hv.valid) return "valid flag differs for " + id;
    if (it->second.fields != hv.fields) return "PHV fields differ for " + id;
  }
  if (pipeline.phv.size() != oracle.phv.size()) return "PHV header sets differ";
  return {};
}

}  // namespace pktpipe
