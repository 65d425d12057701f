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
#include <vector>

#include "dnnsim/compiler.hpp"
#include "dnnsim/graph.hpp"
#include "dnnsim/simengine.hpp"
#include "dnnsim/sysdesc.hpp"

namespace dnnsim {

enum class Boundedness { ComputeBound, CommunicationBound, Neither };

const char* to_string(Boundedness b);

// Per-layer slice of a simulation. The layer window spans from the first
// start to the last end over the layer's own tasks; busy time counts every
// interval on a resource inside that window, whichever layer it belongs to.
struct LayerReport {
  std::string layer;
  SimTime start;
  SimTime end;
  SimTime latency;          // end - start
  uint64_t macs = 0;
  uint64_t ops = 0;         // 2 * macs
  uint64_t dram_bytes = 0;  // actual task-graph traffic, reloads included
  uint64_t min_dram_bytes = 0;
  SimTime nce_busy;         // NCE interval time within the window
  SimTime bus_busy;
  double achieved_ops_per_sec = 0.0;
  double operational_intensity = 0.0;  // ops per byte; +inf when dram_bytes=0
  double nce_busy_fraction = 0.0;
  double bus_busy_fraction = 0.0;
};

struct RooflinePoint {
  std::string layer;
  double intensity = 0.0;  // x: ops per byte
  double achieved = 0.0;   // y: ops per second
  double weight = 0.0;     // latency share of the total inference
};

struct Roofline {
  uint64_t peak_ops_per_sec = 0;
  uint64_t peak_bandwidth_bytes_per_sec = 0;
  double ridge_ops_per_byte = 0.0;
  std::vector<RooflinePoint> points;
};

std::vector<LayerReport> layer_reports(const SimTrace& trace, const TaskGraph& tg,
                                       const DnnGraph& graph,
                                       const SystemDescription& sys);

// theta in (0,1]: ComputeBound if nce >= theta and nce >= bus;
// CommunicationBound if bus >= theta and bus > nce; otherwise Neither.
Boundedness classify(const LayerReport& report, double theta = 0.9);

Roofline roofline(const std::vector<LayerReport>& reports,
                  const SystemDescription& sys);

double roofline_attainable(const Roofline& roof, double intensity);

// Trace-event document (the common array-of-events JSON schema, "X" phase
// events with microsecond timestamps, one lane per resource).
std::string export_gantt(const SimTrace& trace, const TaskGraph& tg);

// Per-layer table with a trailing totals row.
std::string export_reports_csv(const std::vector<LayerReport>& reports,
                               const SimTrace& trace, double theta);
std::string export_reports_json(const std::vector<LayerReport>& reports,
                                const SimTrace& trace, double theta);
std::string export_roofline_json(const Roofline& roof);

// Raw interval dump (deterministic order).
std::string export_trace_json(const SimTrace& trace);

}  // namespace dnnsim
