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
#include <map>
#include <vector>

#include "dnnsim/compiler.hpp"
#include "dnnsim/sysdesc.hpp"

namespace dnnsim {

// Integer simulation time. All cycle-to-time conversions round up, so
// estimates never undercount.
struct SimTime {
  int64_t ps = 0;

  auto operator<=>(const SimTime&) const = default;
  SimTime operator+(SimTime o) const { return {ps + o.ps}; }
  SimTime operator-(SimTime o) const { return {ps - o.ps}; }
};

// ceil(cycles * 1e12 / freq_hz), checked against int64 range.
SimTime cycles_to_time(uint64_t cycles, uint64_t freq_hz);

// A task's exclusive occupancy of its resource, dispatch overhead included.
struct Interval {
  uint64_t task_id = 0;
  Resource resource = Resource::Bus;
  SimTime start;
  SimTime end;
};

struct SimTrace {
  std::vector<Interval> intervals;  // indexed by task id
  SimTime makespan;
  SimTime nce_busy;
  SimTime bus_busy;

  SimTime busy(Resource r) const { return r == Resource::Nce ? nce_busy : bus_busy; }
};

// Uncontended wall-clock duration of one task: HKP dispatch overhead (bus
// clock) plus occupancy — bus cycles `setup + ceil(bytes/width)` for DMA
// tasks, the cycle cost at the NCE clock for compute tasks.
SimTime task_duration(const Task& task, const SystemDescription& sys);

// Deterministic discrete-event execution of the task graph.
//
// Model:
//  - a task becomes ready when all predecessors have completed;
//  - each resource (BUS, NCE) serves one task at a time;
//  - when a resource is free, it dispatches the ready task with the smallest
//    (ready time, task id); if none is ready it idles until one becomes so;
//  - simultaneous events settle completions before dispatches, then by id.
SimTrace simulate(const TaskGraph& tg, const SystemDescription& sys);

// Longest path through the DAG using uncontended task durations; a lower
// bound on the makespan, and exactly the makespan when no resource is shared.
SimTime critical_path_time(const TaskGraph& tg, const SystemDescription& sys);

}  // namespace dnnsim
