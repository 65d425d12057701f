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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "dnnsim/compiler.hpp"
#include "dnnsim/graph.hpp"
#include "dnnsim/simengine.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace dnnsim;
using json = nlohmann::json;

namespace {

// Cycle oracle: emulate the MAC array walking channel blocks and kernel taps,
// one position per cycle.
uint64_t conv_cycles_oracle(uint64_t ic, uint64_t oc, uint64_t oh, uint64_t ow,
                            uint64_t kh, uint64_t kw, uint64_t rows, uint64_t cols) {
  uint64_t cycles = 0;
  for (uint64_t i = 0; i < ic; i += rows)
    for (uint64_t o = 0; o < oc; o += cols)
      for (uint64_t y = 0; y < oh; ++y)
        for (uint64_t x = 0; x < ow; ++x)
          for (uint64_t u = 0; u < kh; ++u)
            for (uint64_t v = 0; v < kw; ++v) ++cycles;
  return cycles;
}

DnnGraph conv_net(uint64_t ic, uint64_t oc, uint64_t in_h, uint64_t in_w,
                  uint64_t k = 3, uint64_t pad = 1, uint64_t dil = 1,
                  uint64_t stride = 1, uint64_t eb = 2) {
  json doc;
  doc["tensors"] = {
      {{"name", "in"}, {"shape", {ic, in_h, in_w}}, {"element_bytes", eb}},
      {{"name", "w"}, {"shape", {oc, ic, k, k}}, {"element_bytes", eb}},
      {{"name", "out"}}};
  doc["layers"] = {{{"name", "conv"},
                    {"kind", "conv2d"},
                    {"inputs", {"in", "w"}},
                    {"output", "out"},
                    {"attrs",
                     {{"kernel_h", k}, {"kernel_w", k}, {"stride", stride},
                      {"dilation", dil}, {"padding", pad}}}}};
  return load_network(doc.dump());
}

uint64_t sum_store_bytes(const TaskGraph& tg, const std::string& layer) {
  uint64_t total = 0;
  for (const Task& t : tg.tasks) {
    if (t.kind == TaskKind::DmaStore && t.layer == layer) total += t.cost;
  }
  return total;
}

}  // namespace

TEST_CASE("compute_cycles matches the array-emulation oracle") {
  SystemDescription sys = testutil::make_system();  // 32x64
  DnnGraph g = conv_net(32, 64, 14, 14);
  Tiling t;
  t.layer = "conv";
  t.tile_in_c = 32;
  t.tile_out_c = 64;
  t.tile_out_h = 14;
  t.tile_out_w = 14;

  CHECK(compute_cycles(g.layers[0], t, sys) == 1764);
  CHECK(conv_cycles_oracle(32, 64, 14, 14, 3, 3, 32, 64) == 1764);

  t.tile_in_c = 33;
  CHECK(compute_cycles(g.layers[0], t, sys) == 3528);
  CHECK(conv_cycles_oracle(33, 64, 14, 14, 3, 3, 32, 64) == 3528);

  SUBCASE("1x1x1x1 tile with k=1 takes one cycle") {
    DnnGraph g1 = conv_net(1, 1, 1, 1, 1, 0);
    Tiling t1;
    t1.tile_in_c = t1.tile_out_c = t1.tile_out_h = t1.tile_out_w = 1;
    CHECK(compute_cycles(g1.layers[0], t1, sys) == 1);
  }

  SUBCASE("random tiles") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<uint64_t> d(1, 80);
    for (int i = 0; i < 100; ++i) {
      uint64_t ic = d(rng), oc = d(rng), oh = 1 + d(rng) % 8, ow = 1 + d(rng) % 8;
      Tiling tr;
      tr.tile_in_c = ic;
      tr.tile_out_c = oc;
      tr.tile_out_h = oh;
      tr.tile_out_w = ow;
      DnnGraph gr = conv_net(ic, oc, 16, 16);
      CHECK(compute_cycles(gr.layers[0], tr, sys) ==
            conv_cycles_oracle(ic, oc, oh, ow, 3, 3, 32, 64));
    }
  }
}

TEST_CASE("tile_layer keeps a fitting layer as a single tile") {
  SystemDescription sys = testutil::make_system();  // 1 MiB buffers
  DnnGraph g = conv_net(8, 8, 16, 16);
  Tiling t = tile_layer(g.layers[0], g, sys);
  CHECK(t.tile_count() == 1);
  CHECK(t.count_ic == 1);
  CHECK(t.tile_out_c == 8);
  CHECK(t.tile_out_h == 16);
  CHECK(t.tile_out_w == 16);
}

TEST_CASE("ofmap twice the buffer splits along out-channels first") {
  // Output 64 x 16 x 16 x 2B = 32 KiB; ofmap buffer 16 KiB. Input and weights
  // fit comfortably.
  SystemDescription sys =
      testutil::make_system(32, 64, 250'000'000, 8, 250'000'000,
                            1 << 20, 1 << 20, 16 * 1024);
  DnnGraph g = conv_net(8, 64, 16, 16);
  Tiling t = tile_layer(g.layers[0], g, sys);
  CHECK(t.count_c == 2);
  CHECK(t.tile_out_c == 32);
  CHECK(t.count_h == 1);
  CHECK(t.count_w == 1);
  CHECK(t.tile_count() == 2);
}

TEST_CASE("infeasible tiling names the blocking buffer") {
  // Weight tile with in_c=1 and out_c=1 still exceeds a 4-byte weight buffer.
  SystemDescription sys =
      testutil::make_system(32, 64, 250'000'000, 8, 250'000'000,
                            1 << 20, 4, 1 << 20);
  DnnGraph g = conv_net(1, 8, 8, 8);
  CHECK_THROWS_WITH_AS(tile_layer(g.layers[0], g, sys),
                       doctest::Contains("weight buffer"), ValidationError);
}

TEST_CASE("single-tile layer lowers to 4 tasks and 3 edges") {
  SystemDescription sys = testutil::make_system();
  DnnGraph g = conv_net(8, 8, 16, 16);
  Tiling t = tile_layer(g.layers[0], g, sys);
  TaskGraph tg = lower_layer(g.layers[0], t, g, sys);
  REQUIRE(tg.tasks.size() == 4);
  CHECK(tg.edges.size() == 3);
  CHECK(tg.tasks[0].kind == TaskKind::DmaLoad);   // ifmap
  CHECK(tg.tasks[1].kind == TaskKind::DmaLoad);   // weights
  CHECK(tg.tasks[2].kind == TaskKind::Compute);
  CHECK(tg.tasks[3].kind == TaskKind::DmaStore);
  CHECK(tg.tasks[0].resource == Resource::Bus);
  CHECK(tg.tasks[2].resource == Resource::Nce);
  // ifmap load covers the whole input, weights the whole filter bank.
  CHECK(tg.tasks[0].cost == g.tensor("in").byte_size());
  CHECK(tg.tasks[1].cost == g.tensor("w").byte_size());
  CHECK(tg.tasks[3].cost == g.tensor("out").byte_size());
  validate_taskgraph(tg);
}

TEST_CASE("two-tile layer lowers to 8 tasks covering the ofmap exactly") {
  SystemDescription sys =
      testutil::make_system(32, 64, 250'000'000, 8, 250'000'000,
                            1 << 20, 1 << 20, 16 * 1024);
  DnnGraph g = conv_net(8, 64, 16, 16);
  Tiling t = tile_layer(g.layers[0], g, sys);
  REQUIRE(t.tile_count() == 2);
  TaskGraph tg = lower_layer(g.layers[0], t, g, sys);
  CHECK(tg.tasks.size() == 8);
  CHECK(sum_store_bytes(tg, "conv") == g.tensor("out").byte_size());
}

TEST_CASE("chained layers get store-to-load edges") {
  SystemDescription sys = testutil::make_system();
  json doc;
  doc["tensors"] = {
      {{"name", "in"}, {"shape", {8, 16, 16}}, {"element_bytes", 2}},
      {{"name", "w1"}, {"shape", {8, 8, 3, 3}}, {"element_bytes", 2}},
      {{"name", "mid"}},
      {{"name", "w2"}, {"shape", {8, 8, 3, 3}}, {"element_bytes", 2}},
      {{"name", "out"}}};
  doc["layers"] = {
      {{"name", "c1"}, {"kind", "conv2d"}, {"inputs", {"in", "w1"}}, {"output", "mid"},
       {"attrs", {{"kernel_h", 3}, {"kernel_w", 3}, {"padding", 1}}}},
      {{"name", "c2"}, {"kind", "conv2d"}, {"inputs", {"mid", "w2"}}, {"output", "out"},
       {"attrs", {{"kernel_h", 3}, {"kernel_w", 3}, {"padding", 1}}}}};
  DnnGraph g = load_network(doc.dump());
  TaskGraph tg = compile(g, sys);
  REQUIRE(tg.tasks.size() == 8);
  // Task 3 is c1's store; tasks 4 and 5 are c2's loads.
  CHECK(tg.tasks[3].kind == TaskKind::DmaStore);
  CHECK(tg.tasks[3].layer == "c1");
  CHECK(tg.tasks[4].kind == TaskKind::DmaLoad);
  CHECK(tg.tasks[4].layer == "c2");
  auto has_edge = [&](uint64_t p, uint64_t s) {
    return std::find(tg.edges.begin(), tg.edges.end(), std::make_pair(p, s)) !=
           tg.edges.end();
  };
  CHECK(has_edge(3, 4));  // store -> next ifmap load
  CHECK(has_edge(3, 5));  // store also gates the weight transfer of the tile
  validate_taskgraph(tg);
}

TEST_CASE("empty network compiles to an empty task graph") {
  SystemDescription sys = testutil::make_system();
  DnnGraph g = load_network(R"({"tensors": [], "layers": []})");
  TaskGraph tg = compile(g, sys);
  CHECK(tg.tasks.empty());
  CHECK(tg.edges.empty());
}

TEST_CASE("compile of dilated_vgg is structurally sound and deterministic") {
  DnnGraph g =
      load_network(testutil::read_file(testutil::data_path("dilated_vgg.net")));
  SystemDescription sys =
      load_system(testutil::read_file(testutil::data_path("nce_32x64_250mhz.sys")));
  TaskGraph tg = compile(g, sys);
  validate_taskgraph(tg);

  std::map<std::string, uint64_t> tasks_per_layer;
  for (const Task& t : tg.tasks) tasks_per_layer[t.layer]++;
  for (const LayerNode& l : g.layers) {
    uint64_t n = tasks_per_layer[l.name];
    // Weighted layers carry at least load+load+compute+store; weightless ones
    // at least load+compute+store.
    CHECK(n >= (l.has_weights() ? 4u : 3u));
  }

  // Coverage: per layer, stored bytes equal the ofmap size exactly.
  for (const LayerNode& l : g.layers) {
    CHECK(sum_store_bytes(tg, l.name) == g.tensor(l.output).byte_size());
  }

  // Utilization bound: ops implied by compute cycles never undercount MACs.
  std::map<std::string, uint64_t> cycles_per_layer;
  for (const Task& t : tg.tasks) {
    if (t.kind == TaskKind::Compute) cycles_per_layer[t.layer] += t.cost;
  }
  for (const LayerNode& l : g.layers) {
    if (!l.has_weights()) continue;
    uint64_t implied_macs = cycles_per_layer[l.name] * sys.nce.rows * sys.nce.cols /
                            (l.attrs.kernel_h * l.attrs.kernel_w) *
                            (l.attrs.kernel_h * l.attrs.kernel_w);
    CHECK(implied_macs >= mac_count(l, g));
  }

  TaskGraph tg2 = compile(g, sys);
  CHECK(save_taskgraph(tg) == save_taskgraph(tg2));
}

TEST_CASE("task graph documents round-trip") {
  DnnGraph g = conv_net(8, 64, 16, 16);
  SystemDescription sys = testutil::make_system();
  TaskGraph tg = compile(g, sys);
  TaskGraph back = load_taskgraph(save_taskgraph(tg));
  CHECK(back == tg);
}

TEST_CASE("hand-written 3-task chain loads and simulates") {
  std::string doc = R"({
    "tasks": [
      {"id": 0, "kind": "dma_load", "resource": "BUS", "cost": 128, "layer": "l", "tile": 0},
      {"id": 1, "kind": "compute", "resource": "NCE", "cost": 250, "layer": "l", "tile": 0},
      {"id": 2, "kind": "dma_store", "resource": "BUS", "cost": 64, "layer": "l", "tile": 0}
    ],
    "edges": [[0, 1], [1, 2]]
  })";
  TaskGraph tg = load_taskgraph(doc);
  CHECK(tg.tasks.size() == 3);
  SimTrace trace = simulate(tg, testutil::make_system());
  CHECK(trace.makespan.ps == 1'096'000);
}

TEST_CASE("cyclic task graph documents are rejected") {
  std::string doc = R"({
    "tasks": [
      {"id": 0, "kind": "dma_load", "resource": "BUS", "cost": 1, "layer": "l", "tile": 0},
      {"id": 1, "kind": "compute", "resource": "NCE", "cost": 1, "layer": "l", "tile": 0},
      {"id": 2, "kind": "dma_store", "resource": "BUS", "cost": 1, "layer": "l", "tile": 0}
    ],
    "edges": [[0, 1], [1, 2], [2, 0]]
  })";
  CHECK_THROWS_WITH_AS(load_taskgraph(doc), doctest::Contains("cycle"),
                       ValidationError);
}

TEST_CASE("mismatched kind/resource pairs are rejected") {
  std::string doc = R"({
    "tasks": [
      {"id": 0, "kind": "dma_load", "resource": "NCE", "cost": 1, "layer": "l", "tile": 0}
    ],
    "edges": []
  })";
  CHECK_THROWS_AS(load_taskgraph(doc), ValidationError);
}

TEST_CASE("random layers: coverage and load accounting hold under any tiling") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<uint64_t> ch(1, 40);
  std::uniform_int_distribution<uint64_t> sp(4, 24);
  std::uniform_int_distribution<uint64_t> buf(256, 1 << 14);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    uint64_t ic = ch(rng), oc = ch(rng), h = sp(rng), w = sp(rng);
    SystemDescription sys =
        testutil::make_system(8, 8, 1'000'000, 4, 1'000'000, buf(rng), buf(rng), buf(rng));
    DnnGraph g = conv_net(ic, oc, h, w);
    Tiling t;
    try {
      t = tile_layer(g.layers[0], g, sys);
    } catch (const ValidationError&) {
      continue;  // infeasible under these buffers
    }
    ++checked;
    TaskGraph tg = lower_layer(g.layers[0], t, g, sys);
    validate_taskgraph(tg);
    CHECK(sum_store_bytes(tg, "conv") == g.tensor("out").byte_size());

    // Each compute's load predecessors carry exactly its chunk footprint,
    // and every load feeds exactly one compute.
    std::map<uint64_t, std::vector<uint64_t>> loads_per_compute;
    std::map<uint64_t, int> fanout;
    for (const auto& [p, s] : tg.edges) {
      if (tg.tasks[p].kind == TaskKind::DmaLoad) {
        CHECK(tg.tasks[s].kind == TaskKind::Compute);
        loads_per_compute[s].push_back(p);
        fanout[p]++;
      }
    }
    for (const auto& [lid, n] : fanout) CHECK(n == 1);
    uint64_t total_loads = 0, total_assigned = 0;
    for (const Task& task : tg.tasks) {
      if (task.kind == TaskKind::DmaLoad) total_loads += task.cost;
      if (task.kind == TaskKind::DmaStore) {
        CHECK(task.cost <= sys.nce.ofmap_buffer_bytes);
      }
    }
    for (const auto& [cid, lids] : loads_per_compute) {
      // Lowering emits the data chunk first, then the weight chunk.
      REQUIRE(lids.size() == 2);
      CHECK(tg.tasks[lids[0]].cost <= sys.nce.ifmap_buffer_bytes);
      CHECK(tg.tasks[lids[1]].cost <= sys.nce.weight_buffer_bytes);
      for (uint64_t lid : lids) total_assigned += tg.tasks[lid].cost;
    }
    CHECK(total_loads == total_assigned);
  }
  CHECK(checked > 50);
}

TEST_CASE("dense reduction splits into accumulation chunks") {
  // Input vector of 4096 halves until one chunk fits the 2 KiB ifmap buffer;
  // weights fit whole.
  SystemDescription sys =
      testutil::make_system(32, 64, 250'000'000, 8, 250'000'000,
                            2048, 1 << 20, 1 << 20);
  json doc;
  doc["tensors"] = {
      {{"name", "in"}, {"shape", {4096}}, {"element_bytes", 2}},
      {{"name", "w"}, {"shape", {16, 4096}}, {"element_bytes", 2}},
      {{"name", "out"}}};
  doc["layers"] = {{{"name", "fc"},
                    {"kind", "dense"},
                    {"inputs", {"in", "w"}},
                    {"output", "out"}}};
  DnnGraph g = load_network(doc.dump());
  Tiling t = tile_layer(g.layers[0], g, sys);
  CHECK(t.tile_count() == 1);
  CHECK(t.tile_in_c == 1024);  // 2 KiB of 2-byte elements
  CHECK(t.count_ic == 4);

  TaskGraph tg = lower_layer(g.layers[0], t, g, sys);
  // Per chunk: data load + weight load + compute; one trailing store.
  REQUIRE(tg.tasks.size() == 4 * 3 + 1);
  uint64_t store_id = tg.tasks.size() - 1;
  CHECK(tg.tasks[store_id].kind == TaskKind::DmaStore);
  int computes_into_store = 0;
  for (const auto& [p, s] : tg.edges) {
    if (s == store_id) {
      CHECK(tg.tasks[p].kind == TaskKind::Compute);
      ++computes_into_store;
    }
  }
  CHECK(computes_into_store == 4);
  // Chunked loads still sum to the whole input plus the whole weight matrix.
  uint64_t loads = 0;
  for (const Task& task : tg.tasks) {
    if (task.kind == TaskKind::DmaLoad) loads += task.cost;
  }
  CHECK(loads == g.tensor("in").byte_size() + g.tensor("w").byte_size());
  validate_taskgraph(tg);
}

TEST_CASE("elementwise with two produced inputs depends on both stores") {
  SystemDescription sys = testutil::make_system();
  json doc;
  doc["tensors"] = {
      {{"name", "in"}, {"shape", {4, 8, 8}}, {"element_bytes", 2}},
      {{"name", "a"}},
      {{"name", "b"}},
      {{"name", "sum"}}};
  doc["layers"] = {
      {{"name", "p1"}, {"kind", "pooling"}, {"inputs", {"in"}}, {"output", "a"},
       {"attrs", {{"kernel_h", 1}, {"kernel_w", 1}, {"stride", 1}}}},
      {{"name", "p2"}, {"kind", "pooling"}, {"inputs", {"in"}}, {"output", "b"},
       {"attrs", {{"kernel_h", 1}, {"kernel_w", 1}, {"stride", 1}}}},
      {{"name", "add"}, {"kind", "elementwise"}, {"inputs", {"a", "b"}}, {"output", "sum"}}};
  DnnGraph g = load_network(doc.dump());
  TaskGraph tg = compile(g, sys);
  validate_taskgraph(tg);
  // Locate the stores of p1/p2 and the loads of add.
  std::map<std::string, uint64_t> store_of;
  std::vector<uint64_t> add_loads;
  for (const Task& t : tg.tasks) {
    if (t.kind == TaskKind::DmaStore) store_of[t.layer] = t.id;
    if (t.kind == TaskKind::DmaLoad && t.layer == "add") add_loads.push_back(t.id);
  }
  REQUIRE(add_loads.size() == 2);
  auto has_edge = [&](uint64_t p, uint64_t s) {
    return std::find(tg.edges.begin(), tg.edges.end(), std::make_pair(p, s)) !=
           tg.edges.end();
  };
  CHECK(has_edge(store_of["p1"], add_loads[0]));
  CHECK(has_edge(store_of["p2"], add_loads[1]));
  // Each elementwise load carries one operand tile.
  CHECK(tg.tasks[add_loads[0]].cost == g.tensor("a").byte_size());
  CHECK(tg.tasks[add_loads[1]].cost == g.tensor("b").byte_size());
}

TEST_CASE("upscaling split along rows reads the matching source rows") {
  // One channel, 64x8 input upscaled 2x -> 128x16 output of 4 KiB; a 1 KiB
  // ofmap buffer forces row splits once the single channel cannot halve.
  SystemDescription sys =
      testutil::make_system(32, 64, 250'000'000, 8, 250'000'000,
                            1 << 20, 1 << 20, 1024);
  json doc;
  doc["tensors"] = {
      {{"name", "in"}, {"shape", {1, 64, 8}}, {"element_bytes", 2}},
      {{"name", "out"}}};
  doc["layers"] = {{{"name", "up"},
                    {"kind", "upscaling"},
                    {"inputs", {"in"}},
                    {"output", "out"},
                    {"attrs", {{"factor", 2}}}}};
  DnnGraph g = load_network(doc.dump());
  Tiling t = tile_layer(g.layers[0], g, sys);
  CHECK(t.count_h == 4);
  CHECK(t.tile_out_h == 32);
  TaskGraph tg = lower_layer(g.layers[0], t, g, sys);
  // Each tile reads exactly its 16 source rows: 16 * 8 * 2 = 256 bytes.
  for (const Task& task : tg.tasks) {
    if (task.kind == TaskKind::DmaLoad) CHECK(task.cost == 256);
  }
  CHECK(sum_store_bytes(tg, "up") == g.tensor("out").byte_size());
}

TEST_CASE("produced weight tensors gate the weight load") {
  // The dense weight matrix is itself the output of an upstream layer.
  SystemDescription sys = testutil::make_system();
  json doc;
  doc["tensors"] = {
      {{"name", "wsrc"}, {"shape", {4, 8}}, {"element_bytes", 2}},
      {{"name", "w"}},
      {{"name", "in"}, {"shape", {8}}, {"element_bytes", 2}},
      {{"name", "out"}}};
  doc["layers"] = {
      {{"name", "gen"}, {"kind", "elementwise"}, {"inputs", {"wsrc"}}, {"output", "w"}},
      {{"name", "fc"}, {"kind", "dense"}, {"inputs", {"in", "w"}}, {"output", "out"}}};
  DnnGraph g = load_network(doc.dump());
  TaskGraph tg = compile(g, sys);
  validate_taskgraph(tg);

  uint64_t gen_store = 0, fc_wload = 0;
  for (const Task& t : tg.tasks) {
    if (t.layer == "gen" && t.kind == TaskKind::DmaStore) gen_store = t.id;
    // The weight load is the second load of fc's single tile.
    if (t.layer == "fc" && t.kind == TaskKind::DmaLoad) fc_wload = t.id;
  }
  CHECK(std::find(tg.edges.begin(), tg.edges.end(),
                  std::make_pair(gen_store, fc_wload)) != tg.edges.end());
  SimTrace trace = simulate(tg, sys);
  CHECK(trace.intervals[fc_wload].start >= trace.intervals[gen_store].end);
}
