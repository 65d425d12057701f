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

#pragma once

#include <cstdint>
#include <string>

namespace dnnsim {

// Neural compute engine: a rows x cols MAC array with private on-chip
// buffers for input feature maps, weights and output feature maps.
struct NceConfig {
  uint64_t rows = 0;  // input-channel lanes
  uint64_t cols = 0;  // output-channel lanes
  uint64_t freq_hz = 0;
  uint64_t ifmap_buffer_bytes = 0;
  uint64_t weight_buffer_bytes = 0;
  uint64_t ofmap_buffer_bytes = 0;

  bool operator==(const NceConfig&) const = default;
};

struct BusConfig {
  uint64_t bytes_per_cycle = 0;
  uint64_t freq_hz = 0;

  bool operator==(const BusConfig&) const = default;
};

struct DmaConfig {
  uint64_t setup_cycles = 0;  // per transfer, at bus frequency
  // One transaction in flight, FIFO order.
  static constexpr uint64_t kMaxOutstanding = 1;

  bool operator==(const DmaConfig&) const = default;
};

struct HkpConfig {
  uint64_t dispatch_overhead_cycles = 0;  // bus clock, before each task start

  bool operator==(const HkpConfig&) const = default;
};

struct SystemDescription {
  std::string label;
  NceConfig nce;
  BusConfig bus;
  DmaConfig dma;
  HkpConfig hkp;

  bool operator==(const SystemDescription&) const = default;
};

// Parses and validates a system description document.
SystemDescription load_system(const std::string& text);

// Canonical serialization; load_system(render_system(sys)) == sys.
std::string render_system(const SystemDescription& sys);

// 2 ops per MAC (multiply + add) times array size times clock.
uint64_t peak_ops_per_sec(const SystemDescription& sys);

uint64_t peak_bandwidth_bytes_per_sec(const SystemDescription& sys);

}  // namespace dnnsim
