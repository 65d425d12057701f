// Copyright 2026 The dnnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dnnsim/sysdesc.hpp"

#include <set>

#include "dnnsim/common.hpp"
#include "json.hpp"

namespace dnnsim {

using json = nlohmann::json;

namespace {

uint64_t require_uint(const json& sec, const std::string& section,
                      const std::string& key) {
  if (!sec.contains(key)) {
    throw ValidationError("system description: missing field '" + section + "." + key + "'");
  }
  if (!sec[key].is_number_unsigned()) {
    throw ParseError("system description: '" + section + "." + key +
                     "' must be a nonnegative integer");
  }
  return sec[key].get<uint64_t>();
}

void require_positive(uint64_t v, const std::string& field) {
  if (v < 1) {
    throw ValidationError("system description: '" + field + "' must be >= 1");
  }
}

const json& require_section(const json& doc, const std::string& name) {
  if (!doc.contains(name)) {
    throw ValidationError("system description: missing section '" + name + "'");
  }
  if (!doc[name].is_object()) {
    throw ParseError("system description: section '" + name + "' must be an object");
  }
  return doc[name];
}

}  // namespace

SystemDescription load_system(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("system description: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("system description: expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::set<std::string> known = {"label", "nce", "bus", "dma", "hkp"};
    if (!known.count(it.key())) {
      throw ParseError("system description: unknown key '" + it.key() + "'");
    }
  }

  SystemDescription sys;
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw ParseError("system description: label must be a string");
    sys.label = doc["label"].get<std::string>();
  }

  const json& nce = require_section(doc, "nce");
  for (auto it = nce.begin(); it != nce.end(); ++it) {
    static const std::set<std::string> known = {
        "rows", "cols", "freq_hz", "ifmap_buffer_bytes", "weight_buffer_bytes",
        "ofmap_buffer_bytes"};
    if (!known.count(it.key())) {
      throw ParseError("system description: unknown key 'nce." + it.key() + "'");
    }
  }
  sys.nce.rows = require_uint(nce, "nce", "rows");
  sys.nce.cols = require_uint(nce, "nce", "cols");
  sys.nce.freq_hz = require_uint(nce, "nce", "freq_hz");
  sys.nce.ifmap_buffer_bytes = require_uint(nce, "nce", "ifmap_buffer_bytes");
  sys.nce.weight_buffer_bytes = require_uint(nce, "nce", "weight_buffer_bytes");
  sys.nce.ofmap_buffer_bytes = require_uint(nce, "nce", "ofmap_buffer_bytes");
  require_positive(sys.nce.rows, "nce.rows");
  require_positive(sys.nce.cols, "nce.cols");
  require_positive(sys.nce.freq_hz, "nce.freq_hz");
  require_positive(sys.nce.ifmap_buffer_bytes, "nce.ifmap_buffer_bytes");
  require_positive(sys.nce.weight_buffer_bytes, "nce.weight_buffer_bytes");
  require_positive(sys.nce.ofmap_buffer_bytes, "nce.ofmap_buffer_bytes");

  const json& bus = require_section(doc, "bus");
  for (auto it = bus.begin(); it != bus.end(); ++it) {
    static const std::set<std::string> known = {"bytes_per_cycle", "freq_hz"};
    if (!known.count(it.key())) {
      throw ParseError("system description: unknown key 'bus." + it.key() + "'");
    }
  }
  sys.bus.bytes_per_cycle = require_uint(bus, "bus", "bytes_per_cycle");
  sys.bus.freq_hz = require_uint(bus, "bus", "freq_hz");
  require_positive(sys.bus.bytes_per_cycle, "bus.bytes_per_cycle");
  require_positive(sys.bus.freq_hz, "bus.freq_hz");

  const json& dma = require_section(doc, "dma");
  for (auto it = dma.begin(); it != dma.end(); ++it) {
    static const std::set<std::string> known = {"setup_cycles", "max_outstanding"};
    if (!known.count(it.key())) {
      throw ParseError("system description: unknown key 'dma." + it.key() + "'");
    }
  }
  sys.dma.setup_cycles = require_uint(dma, "dma", "setup_cycles");
  if (dma.contains("max_outstanding")) {
    if (require_uint(dma, "dma", "max_outstanding") != DmaConfig::kMaxOutstanding) {
      throw ValidationError("system description: 'dma.max_outstanding' must be 1");
    }
  }

  const json& hkp = require_section(doc, "hkp");
  for (auto it = hkp.begin(); it != hkp.end(); ++it) {
    if (it.key() != "dispatch_overhead_cycles") {
      throw ParseError("system description: unknown key 'hkp." + it.key() + "'");
    }
  }
  sys.hkp.dispatch_overhead_cycles = require_uint(hkp, "hkp", "dispatch_overhead_cycles");

  // Peak figures must be representable.
  peak_ops_per_sec(sys);
  peak_bandwidth_bytes_per_sec(sys);
  return sys;
}

std::string render_system(const SystemDescription& sys) {
  json doc;
  doc["label"] = sys.label;
  doc["nce"] = {{"rows", sys.nce.rows},
                {"cols", sys.nce.cols},
                {"freq_hz", sys.nce.freq_hz},
                {"ifmap_buffer_bytes", sys.nce.ifmap_buffer_bytes},
                {"weight_buffer_bytes", sys.nce.weight_buffer_bytes},
                {"ofmap_buffer_bytes", sys.nce.ofmap_buffer_bytes}};
  doc["bus"] = {{"bytes_per_cycle", sys.bus.bytes_per_cycle},
                {"freq_hz", sys.bus.freq_hz}};
  doc["dma"] = {{"setup_cycles", sys.dma.setup_cycles}};
  doc["hkp"] = {{"dispatch_overhead_cycles", sys.hkp.dispatch_overhead_cycles}};
  return doc.dump(2) + "\n";
}

uint64_t peak_ops_per_sec(const SystemDescription& sys) {
  uint64_t macs = checked_mul(sys.nce.rows, sys.nce.cols, "peak ops");
  uint64_t per_cycle = checked_mul(2, macs, "peak ops");
  return checked_mul(per_cycle, sys.nce.freq_hz, "peak ops");
}

uint64_t peak_bandwidth_bytes_per_sec(const SystemDescription& sys) {
  return checked_mul(sys.bus.bytes_per_cycle, sys.bus.freq_hz, "peak bandwidth");
}

}  // namespace dnnsim
