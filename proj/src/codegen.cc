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

#include "pktpipe/codegen.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pktpipe {
namespace {

constexpr std::string_view kModuleText = R"MPO(// Generic parser-graph node shared by every header object of a design.
//
// Each object declared in pipeline.cpp specializes this one definition
// through template arguments and constant constructor arguments. Nothing in
// this file depends on the parser graph.
//
// No synthesis directives are emitted. Interface, pipeline and array
// partitioning pragmas belong in Parser() in pipeline.cpp.
#ifndef MPO_PARSER_MODULE_HPP_
#define MPO_PARSER_MODULE_HPP_

#include <array>
#include <cstddef>
#include <type_traits>
#include <utility>

#include "ap_int.h"

constexpr unsigned numbits(unsigned long long n) {
  return (n >> 1) == 0 ? 1 : 1 + numbits(n >> 1);
}

constexpr unsigned long long B2b(unsigned long long bytes) { return bytes * 8; }

constexpr unsigned long long createMask(unsigned width) {
  return width >= 64 ? ~0ULL : (1ULL << width) - 1;
}

// Right shift that brings a key ending at key_end (MSB-first, exclusive) to
// bit 0 of the bus word holding it.
constexpr unsigned shift_def(unsigned long long header_bits, unsigned bus_bits,
                             unsigned long long key_end) {
  return (key_end > header_bits || key_end % bus_bits == 0)
             ? 0
             : bus_bits - static_cast<unsigned>(key_end % bus_bits);
}

typedef ap_uint<8> HeaderIdType;
const unsigned ACCEPT_ID = 255;

template <unsigned N_BusSize>
struct PacketData {
  ap_uint<N_BusSize> Data;
  ap_uint<numbits(N_BusSize)> TailBits;
  HeaderIdType NextHeader;
  bool Valid;
  bool Start;
  bool Finish;
  bool Abort;
  PacketData()
      : Data(0), TailBits(0), NextHeader(ACCEPT_ID), Valid(false),
        Start(false), Finish(false), Abort(false) {}
};

// Leading N_Bits of a header plus its valid flag. Error marks a header that
// owned the packet but aborted it.
template <unsigned N_Bits>
struct PHVData {
  ap_uint<N_Bits> Data;
  bool Valid;
  bool Error;
  PHVData() : Data(0), Valid(false), Error(false) {}

  template <unsigned N_Offset, unsigned N_Width>
  ap_uint<N_Width> field() const {
    return ap_uint<N_Width>(Data >> (N_Bits - N_Offset - N_Width));
  }
};

template <typename T_Key>
struct KeyFormat {
  T_Key KeyVal;
  T_Key KeyMask;
  unsigned NextHeader;
};

template <typename T_Key, std::size_t N_Key, std::size_t N_Len>
struct HeaderLayout {
  std::array<KeyFormat<T_Key>, N_Key> Key;
  std::pair<unsigned, unsigned> KeyLocation;      // offset, key size in bits
  std::pair<unsigned, unsigned> HeaderLengthInd;  // length field offset, width
  unsigned MinLenValue;
  std::array<unsigned, N_Len> ArrLenLookup;       // valid lengths in bits
  std::array<unsigned, N_Len> ArrShiftLookup;     // alignment shift per length
  unsigned DefaultNext;                           // taken when no key matches
};

template <class T_DHeaderFormat>
struct HeaderFormat {
  unsigned getHeaderSize(unsigned expr_val) const {
    return static_cast<const T_DHeaderFormat*>(this)->getSpecHeaderSize(expr_val);
  }
};

template <unsigned N_Bits>
struct fixedHeaderFormat : public HeaderFormat<fixedHeaderFormat<N_Bits> > {
  unsigned getSpecHeaderSize(unsigned) const { return N_Bits; }
};

template <unsigned N_Mult, unsigned N_Add>
struct varHeaderFormat : public HeaderFormat<varHeaderFormat<N_Mult, N_Add> > {
  unsigned getSpecHeaderSize(unsigned expr_val) const {
    return N_Mult * expr_val + N_Add;
  }
};

template <unsigned N_BusSize, unsigned N_MinBits, unsigned N_MaxBits,
          std::size_t N_Len, class T_HeaderLayout, class T_Format,
          class T_DHeader>
class Header {
 protected:
  typedef ap_uint<numbits(N_MaxBits)> RXBitsType;
  typedef PacketData<N_BusSize> PktDataType;
  static const unsigned N_AccBits =
      ((N_MinBits + N_BusSize - 1) / N_BusSize) * N_BusSize;
  static const unsigned RXBitsMax = (1U << numbits(N_MaxBits)) - 1;

  const HeaderIdType InstanceId;
  const T_HeaderLayout HeaderLayout;
  const T_Format Format;
  const unsigned stateTransShiftVal;
  const std::array<bool, N_Len> HeaderBusCompVal;

  RXBitsType rxBits;
  ap_uint<N_AccBits> Acc;
  ap_uint<N_BusSize> Held;
  HeaderIdType NextHeader;
  bool NextHeaderValid;
  bool KeyDone;
  bool Active;
  bool Aborted;
  bool SizeKnown;
  bool HeldValid;
  bool FinalPending;
  unsigned HeaderSize;
  unsigned LenIndex;
  unsigned BeatsIn;
  unsigned BitsIn;
  unsigned BeatsOut;

 public:
  template <typename T, typename F>
  const T init_array(const F& func) const {
    typename std::remove_cv<T>::type arr{};
    for (std::size_t i = 0; i < arr.size(); ++i) arr[i] = func(i);
    return arr;
  }

  Header(const HeaderIdType instance_id, const T_HeaderLayout& HLayout)
      : InstanceId(instance_id),
        HeaderLayout(HLayout),
        Format(),
        stateTransShiftVal{shift_def(N_MinBits, N_BusSize,
                                     HLayout.KeyLocation.first +
                                         HLayout.KeyLocation.second)},
        HeaderBusCompVal(init_array<std::array<bool, N_Len> >(
            [HLayout](std::size_t i) {
              return HLayout.ArrLenLookup[i] > N_BusSize;
            })) {
    Reset();
  }

  void Reset() {
    rxBits = 0;
    Acc = 0;
    Held = 0;
    NextHeader = HeaderLayout.DefaultNext;
    NextHeaderValid = false;
    KeyDone = false;
    Active = false;
    Aborted = false;
    SizeKnown = false;
    HeldValid = false;
    FinalPending = false;
    HeaderSize = 0;
    LenIndex = 0;
    BeatsIn = 0;
    BitsIn = 0;
    BeatsOut = 0;
  }

  void StateTransition(const PktDataType& PktIn) {
    typedef decltype(HeaderLayout.Key.front().KeyVal) KeyType;
    const KeyType DataInMask = createMask(HeaderLayout.KeyLocation.second);
    KeyType packetKeyVal = KeyType(PktIn.Data >> stateTransShiftVal) & DataInMask;
    if (!NextHeaderValid && !KeyDone &&
        (rxBits > HeaderLayout.KeyLocation.first)) {
      KeyDone = true;
      for (auto key : HeaderLayout.Key)
        if (key.KeyVal == (packetKeyVal & key.KeyMask)) {
          NextHeader = key.NextHeader;
          NextHeaderValid = true;
        }
    }
  }

  template <class T_PHV>
  void HeaderAnalysis(const PktDataType& PktIn, T_PHV& PHV,
                      PktDataType& PktOut) {
    PktOut = PktDataType();
    if (PktIn.Valid && PktIn.Start) {
      Reset();
      Active = !PktIn.Abort && PktIn.NextHeader == InstanceId;
      PHV.Valid = Active;
      PHV.Error = false;
    }
    if (!Active) {
      PktOut = PktIn;
      return;
    }
    if (!PktIn.Valid) {
      Drain(PktOut);
      return;
    }
    if (Aborted) return;

    const unsigned rx = rxBits.to_uint() + N_BusSize;
    rxBits = rx > RXBitsMax ? RXBitsMax : rx;
    if (BeatsIn * N_BusSize < N_AccBits)
      Acc = (Acc << N_BusSize) | ap_uint<N_AccBits>(PktIn.Data);
    ++BeatsIn;
    BitsIn += PktIn.TailBits.to_uint();

    StateTransition(PktIn);
    if (!SizeKnown && !static_cast<T_DHeader*>(this)->ResolveSize()) {
      Abort(PHV, PktOut);
      return;
    }
    if (PktIn.Finish && (!SizeKnown || BitsIn < HeaderSize)) {
      Abort(PHV, PktOut);
      return;
    }
    if (BeatsIn * N_BusSize >= N_AccBits)
      PHV.Data = ap_uint<N_MinBits>(Acc >> (N_AccBits - N_MinBits));
    if (SizeKnown) static_cast<T_DHeader*>(this)->PipelineAdjust(PktIn, PktOut);
  }

 protected:
  template <class T_PHV>
  void Abort(T_PHV& PHV, PktDataType& PktOut) {
    Aborted = true;
    PHV.Error = true;
    PktOut.Valid = true;
    PktOut.Start = BeatsOut == 0;
    PktOut.Finish = true;
    PktOut.Abort = true;
  }

  ap_uint<N_BusSize> Merge(const ap_uint<N_BusSize>& first,
                           const ap_uint<N_BusSize>& second,
                           unsigned shift) const {
    if (shift == 0) return first;
    return (first << shift) | (second >> (N_BusSize - shift));
  }

  void Emit(PktDataType& PktOut, const ap_uint<N_BusSize>& data) {
    PktOut.Data = data;
    PktOut.Valid = true;
    PktOut.Start = BeatsOut == 0;
    PktOut.TailBits = N_BusSize;
    PktOut.NextHeader = NextHeader;
    ++BeatsOut;
  }

  unsigned BeatsNeeded() const {
    const unsigned remaining = BitsIn - HeaderSize;
    return remaining == 0 ? 1 : (remaining + N_BusSize - 1) / N_BusSize;
  }

  void Finish(PktDataType& PktOut) {
    const unsigned remaining = BitsIn - HeaderSize;
    PktOut.Finish = true;
    PktOut.TailBits = remaining - (BeatsOut - 1) * N_BusSize;
    FinalPending = false;
  }

  void Drain(PktDataType& PktOut) {
    if (!FinalPending) return;
    Emit(PktOut, HeldValid ? Merge(Held, 0, static_cast<T_DHeader*>(this)->ShiftVal())
                           : ap_uint<N_BusSize>(0));
    HeldValid = false;
    Finish(PktOut);
  }

  // Common alignment body; the shift operand comes from the derived class.
  void Align(const PktDataType& PktIn, PktDataType& PktOut, unsigned shift) {
    const unsigned skip = HeaderSize / N_BusSize;
    const unsigned beat = BeatsIn - 1;
    if (beat == skip) {
      Held = PktIn.Data;
      HeldValid = true;
    } else if (beat > skip) {
      Emit(PktOut, Merge(Held, PktIn.Data, shift));
      Held = PktIn.Data;
    }
    if (PktIn.Finish) {
      FinalPending = BeatsOut < BeatsNeeded();
      if (!FinalPending) {
        Finish(PktOut);
      } else if (!PktOut.Valid) {
        Drain(PktOut);
      }
    }
  }
};

template <unsigned N_BusSize, unsigned N_MinBits, unsigned N_MaxBits,
          std::size_t N_Len, class T_HeaderLayout, class T_Format>
class FixedHeader
    : public Header<N_BusSize, N_MinBits, N_MaxBits, N_Len, T_HeaderLayout,
                    T_Format,
                    FixedHeader<N_BusSize, N_MinBits, N_MaxBits, N_Len,
                                T_HeaderLayout, T_Format> > {
  typedef Header<N_BusSize, N_MinBits, N_MaxBits, N_Len, T_HeaderLayout,
                 T_Format, FixedHeader> Base;

 public:
  FixedHeader(const HeaderIdType instance_id, const T_HeaderLayout& HLayout)
      : Base(instance_id, HLayout) {}

  bool ResolveSize() {
    this->HeaderSize = N_MinBits;
    this->SizeKnown = true;
    return true;
  }
  unsigned ShiftVal() const { return N_MinBits % N_BusSize; }
  void PipelineAdjust(const typename Base::PktDataType& PktIn,
                      typename Base::PktDataType& PktOut) {
    this->Align(PktIn, PktOut, N_MinBits % N_BusSize);
  }
};

template <unsigned N_BusSize, unsigned N_MinBits, unsigned N_MaxBits,
          std::size_t N_Len, class T_HeaderLayout, class T_Format>
class VariableHeader
    : public Header<N_BusSize, N_MinBits, N_MaxBits, N_Len, T_HeaderLayout,
                    T_Format,
                    VariableHeader<N_BusSize, N_MinBits, N_MaxBits, N_Len,
                                   T_HeaderLayout, T_Format> > {
  typedef Header<N_BusSize, N_MinBits, N_MaxBits, N_Len, T_HeaderLayout,
                 T_Format, VariableHeader> Base;

 public:
  VariableHeader(const HeaderIdType instance_id, const T_HeaderLayout& HLayout)
      : Base(instance_id, HLayout) {}

  // False when the length field holds a value outside the valid range.
  bool ResolveSize() {
    const unsigned end = this->HeaderLayout.HeaderLengthInd.first +
                         this->HeaderLayout.HeaderLengthInd.second;
    const unsigned seen = this->BeatsIn * N_BusSize;
    if (seen < end) return true;
    const unsigned expr_val =
        ((this->Acc >> (seen - end)) &
         createMask(this->HeaderLayout.HeaderLengthInd.second)).to_uint();
    if (expr_val < this->HeaderLayout.MinLenValue ||
        expr_val - this->HeaderLayout.MinLenValue >= N_Len)
      return false;
    this->LenIndex = expr_val - this->HeaderLayout.MinLenValue;
    this->HeaderSize = this->Format.getHeaderSize(expr_val);
    this->SizeKnown = true;
    return true;
  }
  // Shift operand from the table of valid shifts instead of a barrel shifter.
  unsigned ShiftVal() const {
    return this->HeaderLayout.ArrShiftLookup[this->LenIndex];
  }
  void PipelineAdjust(const typename Base::PktDataType& PktIn,
                      typename Base::PktDataType& PktOut) {
    this->Align(PktIn, PktOut, ShiftVal());
  }
};

#endif  // MPO_PARSER_MODULE_HPP_
)MPO";

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string hex_literal(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%llxULL", static_cast<unsigned long long>(v));
  return buf;
}

std::string with_manifest(SourceBundle& bundle, const std::string& dir) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& e : bundle.manifest) {
    files.push_back({{"path", e.path}, {"purpose", e.purpose}, {"bytes", e.bytes}});
  }
  const std::string text = nlohmann::json{{"files", files}}.dump(2) + "\n";
  const std::string path = dir + "/MANIFEST.json";
  bundle.files[path] = text;
  return path;
}

void add_file(SourceBundle& bundle, std::string path, std::string purpose,
              std::string text) {
  if (text.empty() || text.back() != '\n') text.push_back('\n');
  bundle.manifest.push_back({path, std::move(purpose), text.size()});
  bundle.files[std::move(path)] = std::move(text);
}

struct NodeInfo {
  const HeaderSpec* spec;
  const HeaderPlan* plan;
  std::string ident;
  std::size_t number;
};

class MpoCxxEmitter {
 public:
  MpoCxxEmitter(const PipelinePlan& plan, const ParserGraph& graph)
      : plan_(plan), graph_(graph), idents_(identifier_map(graph)) {
    design_ = sanitize_identifier(plan.design.empty() ? "design" : plan.design);
    for (std::size_t i = 0; i < graph.headers.size(); ++i) {
      const auto& h = graph.headers[i];
      nodes_.push_back({&h, &plan.header_plans.at(h.id), idents_.at(h.id), i});
    }
  }

  SourceBundle bundle() {
    SourceBundle b;
    const std::string dir = "gen/" + design_;
    add_file(b, dir + "/module.hpp", "generic header module (shared by all nodes)",
             std::string(kModuleText));
    add_file(b, dir + "/types.hpp", "PHV records and per-node constant tables",
             types());
    add_file(b, dir + "/pipeline.cpp",
             "top-level pipeline: one static object per parser-graph node",
             pipeline());
    with_manifest(b, dir);
    return b;
  }

 private:
  const NodeInfo& node(const std::string& id) const {
    for (const auto& n : nodes_) {
      if (n.spec->id == id) return n;
    }
    throw CodegenError("header '" + id + "' missing");
  }

  std::string id_const(const std::string& id) const {
    if (id == kAccept) return "ACCEPT_ID";
    return "HDR_" + upper(idents_.at(id));
  }

  static std::string key_type(const HeaderSpec& h) {
    const BitWidth w = h.key ? h.key->width_bits : 1;
    return "ap_uint<" + std::to_string(w) + ">";
  }

  std::string layout_type(const NodeInfo& n) const {
    return n.ident + "_layout_t";
  }

  std::string header_class(const NodeInfo& n) const {
    std::ostringstream os;
    os << (n.spec->is_variable() ? "VariableHeader" : "FixedHeader") << "<BUS_BITS, "
       << n.spec->min_size_bits() << ", " << n.spec->max_size_bits() << ", "
       << n.plan->bus_span.size() << ", " << layout_type(n) << ", " << n.ident
       << "_format_t>";
    return os.str();
  }

  std::string types() const {
    const std::string guard = "MPO_" + upper(design_) + "_TYPES_HPP_";
    std::ostringstream os;
    os << "// PHV records and constant tables for design \"" << plan_.design
       << "\": " << graph_.headers.size() << " headers, "
       << plan_.bus_width_bits << "-bit bus.\n";
    os << "#ifndef " << guard << "\n#define " << guard << "\n\n";
    os << "#include \"module.hpp\"\n\n";
    os << "const unsigned BUS_BITS = " << plan_.bus_width_bits << ";\n";
    os << "typedef PacketData<BUS_BITS> PktDataType;\n\n";
    os << "enum HeaderId {\n";
    for (const auto& n : nodes_) {
      os << "  " << id_const(n.spec->id) << " = " << n.number << ",\n";
    }
    os << "};\n";

    for (const auto& n : nodes_) {
      const HeaderSpec& h = *n.spec;
      const HeaderPlan& hp = *n.plan;
      os << "\n// " << h.id << ": ";
      if (const auto* v = std::get_if<VariableLength>(&h.length)) {
        os << "variable, " << v->multiplier_bits << " * x + " << v->addend_bits
           << " bits for x in " << v->min_value << ".." << v->max_value;
      } else {
        os << "fixed, " << h.min_size_bits() << " bits";
      }
      os << "\n";
      os << "struct " << n.ident << "_phv_t : public PHVData<"
         << h.min_size_bits() << "> {\n";
      for (const auto& f : h.fields) {
        os << "  ap_uint<" << f.width_bits << "> " << sanitize_identifier(f.name)
           << "() const { return field<" << f.offset_bits << ", " << f.width_bits
           << ">(); }\n";
      }
      os << "};\n";

      const std::size_t nkeys = h.key ? h.transitions.size() : 0;
      os << "typedef HeaderLayout<" << key_type(h) << ", " << nkeys << ", "
         << hp.bus_span.size() << "> " << layout_type(n) << ";\n";
      os << "const " << layout_type(n) << " " << n.ident << "_layout = {\n";
      os << "    {{";
      for (std::size_t k = 0; k < nkeys; ++k) {
        const auto& t = h.transitions[k];
        os << (k == 0 ? "" : ", ") << "{" << hex_literal(t.value) << ", "
           << hex_literal(t.mask) << ", " << id_const(t.next) << "}";
      }
      os << "}},\n";
      os << "    {" << (h.key ? h.key->offset_bits : 0) << ", "
         << (h.key ? h.key->width_bits : 0) << "},\n";
      const auto* var = std::get_if<VariableLength>(&h.length);
      os << "    {" << (var ? var->len_field.offset_bits : 0) << ", "
         << (var ? var->len_field.width_bits : 0) << "},\n";
      os << "    " << (var ? var->min_value : 0) << ",\n";
      os << "    {{";
      for (std::size_t i = 0; i < hp.bus_span.size(); ++i) {
        os << (i == 0 ? "" : ", ") << hp.bus_span[i].first;
      }
      os << "}},\n";
      os << "    {{";
      for (std::size_t i = 0; i < hp.bus_span.size(); ++i) {
        os << (i == 0 ? "" : ", ") << hp.shift_for(hp.bus_span[i].first);
      }
      os << "}},\n";
      const std::string fallback =
          !h.key && !h.transitions.empty() ? id_const(h.transitions.front().next)
                                           : "ACCEPT_ID";
      os << "    " << fallback << ",\n";
      os << "};\n";
      if (var) {
        os << "typedef varHeaderFormat<" << var->multiplier_bits << ", "
           << var->addend_bits << "> " << n.ident << "_format_t;\n";
      } else {
        os << "typedef fixedHeaderFormat<" << h.min_size_bits() << "> " << n.ident
           << "_format_t;\n";
      }
    }
    os << "\n#endif  // " << guard << "\n";
    return os.str();
  }

  std::string mux_expr(const MuxSpec& m) const {
    // Left fold: (a.Valid) ? a_out : ((b.Valid) ? b_out : c_out)
    std::string expr = node(m.inputs.back()).ident + "_out";
    for (std::size_t k = m.inputs.size() - 1; k-- > 0;) {
      const auto& in = node(m.inputs[k]);
      const bool outer = k == 0;
      std::string inner = "(tmp_" + in.ident + "_PHV.Valid) ? " + in.ident +
                          "_out : " + expr;
      expr = outer ? inner : "(" + inner + ")";
    }
    return expr;
  }

  const MuxSpec* mux_from_level(std::size_t level) const {
    for (const auto& m : plan_.muxes) {
      const std::size_t src =
          m.feeds_level ? *m.feeds_level - 1 : plan_.levels.size() - 1;
      if (src == level) return &m;
    }
    return nullptr;
  }

  std::string pipeline() const {
    const std::size_t nlevels = plan_.levels.size();
    std::ostringstream os;
    os << "// Parser pipeline for design \"" << plan_.design << "\".\n";
    os << "//\n";
    for (std::size_t l = 0; l < nlevels; ++l) {
      os << "// level " << l << ":";
      for (const auto& id : plan_.levels[l]) os << " " << id;
      os << "\n";
    }
    os << "#include \"module.hpp\"\n#include \"types.hpp\"\n\n";

    os << "void Parser(const PktDataType& PktIn";
    for (const auto& n : nodes_) os << ", " << n.ident << "_phv_t& " << n.ident << "_PHV";
    os << ", PktDataType& PktOut) {\n";
    os << "  // Synthesis directives (interface, pipeline II) go here.\n";
    for (const auto& n : nodes_) {
      os << "  static " << header_class(n) << " " << n.ident << "("
         << id_const(n.spec->id) << ", " << n.ident << "_layout);\n";
      os << "  static " << n.ident << "_phv_t tmp_" << n.ident << "_PHV;\n";
    }
    for (std::size_t l = 0; l < nlevels; ++l) {
      os << "  static PktDataType pipe_reg_" << l << ";\n";
    }
    os << "  PktDataType";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      os << (i == 0 ? " " : ", ") << nodes_[i].ident << "_out";
    }
    os << ";\n\n";

    os << "  // Stages run from the output backwards so every pipe register is\n";
    os << "  // read before it is written in the same call.\n";
    os << "  PktOut = pipe_reg_" << nlevels - 1 << ";\n";
    for (std::size_t l = nlevels; l-- > 0;) {
      const std::string in = l == 0 ? "PktIn" : "pipe_reg_" + std::to_string(l - 1);
      os << "\n  // level " << l << "\n";
      for (const auto& id : plan_.levels[l]) {
        const auto& n = node(id);
        os << "  " << n.ident << ".HeaderAnalysis(" << in << ", tmp_" << n.ident
           << "_PHV, " << n.ident << "_out);\n";
      }
      if (const MuxSpec* m = mux_from_level(l)) {
        os << "  pipe_reg_" << l << " = " << mux_expr(*m) << ";\n";
      } else {
        os << "  pipe_reg_" << l << " = " << node(plan_.levels[l].front()).ident
           << "_out;\n";
      }
    }
    os << "\n";
    for (const auto& n : nodes_) {
      os << "  " << n.ident << "_PHV = tmp_" << n.ident << "_PHV;\n";
    }
    os << "}\n";
    return os.str();
  }

  const PipelinePlan& plan_;
  const ParserGraph& graph_;
  std::map<std::string, std::string> idents_;
  std::string design_;
  std::vector<NodeInfo> nodes_;
};

void check_matches(const PipelinePlan& plan, const ParserGraph& graph) {
  if (plan.bus_width_bits != graph.bus_width_bits ||
      plan.header_plans.size() != graph.headers.size()) {
    throw CodegenError("plan does not match graph '" + graph.name + "'");
  }
  std::size_t scheduled = 0;
  for (const auto& level : plan.levels) scheduled += level.size();
  if (scheduled != graph.headers.size()) {
    throw CodegenError("plan does not match graph '" + graph.name + "'");
  }
  for (const auto& h : graph.headers) {
    if (plan.header_plans.count(h.id) == 0) {
      throw CodegenError("plan has no entry for header '" + h.id + "'");
    }
  }
  if (graph.headers.size() >= 255) {
    throw CodegenError("mpo-cxx supports at most 254 headers");
  }
}

}  // namespace

std::vector<std::string> available_backends() {
  return {std::string(kBackendMpoCxx), std::string(kBackendPlanReport)};
}

std::string_view generic_module_text() { return kModuleText; }

std::string sanitize_identifier(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) {
    out.insert(out.begin(), '_');
  }
  return out;
}

std::map<std::string, std::string> identifier_map(const ParserGraph& graph) {
  std::map<std::string, std::string> out;
  std::set<std::string> used;
  for (const auto& h : graph.headers) {
    const std::string base = sanitize_identifier(h.id);
    std::string ident = base;
    for (int n = 2; used.count(ident) != 0; ++n) {
      ident = base + "_" + std::to_string(n);
    }
    used.insert(ident);
    out.emplace(h.id, ident);
  }
  return out;
}

SourceBundle emit(const PipelinePlan& plan, const ParserGraph& graph,
                  std::string_view backend) {
  if (backend == kBackendMpoCxx) {
    check_matches(plan, graph);
    return MpoCxxEmitter(plan, graph).bundle();
  }
  if (backend == kBackendPlanReport) {
    check_matches(plan, graph);
    return render_plan_report(plan);
  }
  std::string known;
  for (const auto& b : available_backends()) known += (known.empty() ? "" : ", ") + b;
  throw CodegenError("unknown backend '" + std::string(backend) +
                     "'; available: " + known);
}

SourceBundle render_plan_report(const PipelinePlan& plan) {
  std::ostringstream os;
  os << "design: " << plan.design << "\n";
  os << "bus width: " << plan.bus_width_bits << " bits\n";
  os << "levels: " << plan.levels.size() << ", muxes: " << plan.muxes.size()
     << ", register banks: " << plan.register_banks << "\n";
  os << "latency model: " << plan.register_banks
     << " register banks + (bus words - 1) cycles\n\n";
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    os << "level " << l << ":";
    for (const auto& id : plan.levels[l]) os << " " << id;
    os << "\n";
  }
  os << "\nmux table:\n";
  if (plan.muxes.empty()) os << "  (none)\n";
  for (const auto& m : plan.muxes) {
    os << "  " << (m.feeds_level ? "feeds level " + std::to_string(*m.feeds_level)
                                 : std::string("OUTPUT"))
       << ": inputs";
    for (const auto& in : m.inputs) os << " " << in;
    os << "; select " << m.select << ".Valid\n";
  }
  for (const auto& level : plan.levels) {
    for (const auto& id : level) {
      const HeaderPlan& hp = plan.header_plans.at(id);
      os << "\nheader " << id << "\n";
      os << "  state shift: "
         << (hp.state_shift ? std::to_string(*hp.state_shift) : std::string("none"))
         << "\n";
      os << "  rx counter width: " << hp.rx_counter_width << " bits\n";
      if (const auto* f = std::get_if<FixedShift>(&hp.shift_plan)) {
        os << "  shift plan: fixed " << f->shift << "\n";
      } else {
        const auto& lut = std::get<ShiftLut>(hp.shift_plan);
        os << "  shift plan: lut, " << lut.entries.size() << " entries\n";
        for (const auto& [len, shift] : lut.entries) {
          os << "    length " << len << " -> shift " << shift << "\n";
        }
      }
      os << "  lengths spanning the bus:";
      bool any = false;
      for (const auto& [len, spans] : hp.bus_span) {
        if (spans) {
          os << " " << len;
          any = true;
        }
      }
      os << (any ? "\n" : " none\n");
    }
  }

  SourceBundle b;
  const std::string dir =
      "gen/" + sanitize_identifier(plan.design.empty() ? "design" : plan.design);
  add_file(b, dir + "/report.txt", "human-readable plan report", os.str());
  add_file(b, dir + "/plan.dot", "pipeline organization graph", plan_to_dot(plan));
  with_manifest(b, dir);
  return b;
}

std::string bundle_digest(const SourceBundle& bundle) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xFF;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [path, text] : bundle.files) {
    mix(path);
    mix(text);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pktpipe
