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
#include <utility>
#include <vector>

#include "dnnsim/graph.hpp"
#include "dnnsim/sysdesc.hpp"

namespace dnnsim {

// Output-tile dimensions for one layer. The output is partitioned along
// out_c / out_h / out_w; tile_in_c < in_c additionally splits the reduction
// into chunks that accumulate into the resident output tile.
struct Tiling {
  std::string layer;
  uint64_t tile_out_c = 1;
  uint64_t tile_out_h = 1;
  uint64_t tile_out_w = 1;
  uint64_t tile_in_c = 1;
  uint64_t count_c = 1;
  uint64_t count_h = 1;
  uint64_t count_w = 1;
  uint64_t count_ic = 1;  // reduction chunks per tile

  uint64_t tile_count() const { return count_c * count_h * count_w; }
};

enum class TaskKind { DmaLoad, Compute, DmaStore };
enum class Resource { Bus, Nce };

const char* to_string(TaskKind kind);
const char* to_string(Resource res);

// One task-graph node: a memory access (cost in bytes, on the bus) or a block
// of processing cycles (on the NCE).
struct Task {
  uint64_t id = 0;
  TaskKind kind = TaskKind::Compute;
  Resource resource = Resource::Nce;
  uint64_t cost = 0;  // bytes for DMA kinds, cycles for Compute
  std::string layer;
  uint64_t tile = 0;

  bool operator==(const Task&) const = default;
};

struct TaskGraph {
  std::vector<Task> tasks;                             // ordered by id, ids dense
  std::vector<std::pair<uint64_t, uint64_t>> edges;    // (pred, succ)

  bool operator==(const TaskGraph&) const = default;
};

// DAG validation: dense ids, edge endpoints exist, kind/resource coherence,
// acyclicity. With `compute_invariant` every Compute task must additionally
// have a DmaLoad predecessor and a DmaStore successor within its own tile.
void validate_taskgraph(const TaskGraph& tg, bool compute_invariant = true);

// Chooses tile dimensions so one tile's ifmap chunk, weight chunk and output
// tile fit the on-chip buffers. Greedy halving in priority order
// out_c -> out_h -> out_w -> in_c; deterministic.
Tiling tile_layer(const LayerNode& layer, const DnnGraph& graph,
                  const SystemDescription& sys);

// NCE occupancy of one tile (nominal dimensions):
// Conv2d/Dense: ceil(in_c/rows) * ceil(out_c/cols) * oh * ow * kh * kw;
// Pooling/Upscaling/Elementwise: ceil(output elements / cols).
uint64_t compute_cycles(const LayerNode& layer, const Tiling& tiling,
                        const SystemDescription& sys);

// Lowers one tiled layer to DmaLoad/Compute/DmaStore tasks; cross-layer
// dependencies are appended by compile().
TaskGraph lower_layer(const LayerNode& layer, const Tiling& tiling,
                      const DnnGraph& graph, const SystemDescription& sys);

// Full network lowering: per-layer tiling, task generation and cross-layer
// edges from producing tiles' stores to consuming tiles' loads.
TaskGraph compile(const DnnGraph& graph, const SystemDescription& sys);

std::string save_taskgraph(const TaskGraph& tg);
TaskGraph load_taskgraph(const std::string& text);

}  // namespace dnnsim
