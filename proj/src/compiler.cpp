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

#include "dnnsim/compiler.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace dnnsim {

using json = nlohmann::json;

const char* to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::DmaLoad: return "dma_load";
    case TaskKind::Compute: return "compute";
    case TaskKind::DmaStore: return "dma_store";
  }
  return "?";
}

const char* to_string(Resource res) {
  return res == Resource::Bus ? "BUS" : "NCE";
}

namespace {

// Half-open box in normalized (channel, row, col) tensor coordinates.
// Rank-1 tensors map to (n, 1, 1); rank-3 feature maps map directly.
struct Region {
  uint64_t c0 = 0, c1 = 0, h0 = 0, h1 = 0, w0 = 0, w1 = 0;

  bool intersects(const Region& o) const {
    return c0 < o.c1 && o.c0 < c1 && h0 < o.h1 && o.h0 < h1 && w0 < o.w1 &&
           o.w0 < w1;
  }
};

struct Dims3 {
  uint64_t c = 1, h = 1, w = 1;
};

Dims3 normalize_shape(const std::vector<uint64_t>& shape) {
  Dims3 d;
  if (shape.size() >= 1) d.c = shape[0];
  if (shape.size() >= 2) d.h = shape[1];
  if (shape.size() >= 3) d.w = shape[2];
  for (size_t i = 3; i < shape.size(); ++i) d.w *= shape[i];
  return d;
}

// Input rows/cols read for an output range [o0, o0+len) of a strided window
// op, clipped to [0, in_extent).
std::pair<uint64_t, uint64_t> window_span(uint64_t o0, uint64_t len,
                                          uint64_t stride, uint64_t dilation,
                                          uint64_t kernel, uint64_t padding,
                                          uint64_t in_extent) {
  int64_t lo = static_cast<int64_t>(o0 * stride) - static_cast<int64_t>(padding);
  int64_t hi = static_cast<int64_t>((o0 + len - 1) * stride) -
               static_cast<int64_t>(padding) +
               static_cast<int64_t>(dilation * (kernel - 1)) + 1;
  lo = std::max<int64_t>(lo, 0);
  hi = std::min<int64_t>(hi, static_cast<int64_t>(in_extent));
  if (hi < lo) hi = lo;
  return {static_cast<uint64_t>(lo), static_cast<uint64_t>(hi)};
}

struct LayerShapes {
  Dims3 in;       // data input (first input)
  Dims3 out;
  uint64_t in_eb = 0;
  uint64_t out_eb = 0;
  uint64_t weight_eb = 0;
  uint64_t ic_total = 0;  // reduction extent (conv: in channels; dense: flat)
};

LayerShapes layer_shapes(const LayerNode& layer, const DnnGraph& graph) {
  LayerShapes s;
  const Tensor& in = graph.tensor(layer.data_input());
  const Tensor& out = graph.tensor(layer.output);
  s.in = normalize_shape(in.shape);
  s.out = normalize_shape(out.shape);
  s.in_eb = in.element_bytes;
  s.out_eb = out.element_bytes;
  if (layer.has_weights()) {
    s.weight_eb = graph.tensor(layer.weight_input()).element_bytes;
  }
  if (layer.kind == LayerKind::Dense) {
    s.ic_total = in.element_count();
  } else {
    s.ic_total = s.in.c;
  }
  return s;
}

bool separate_reduction(LayerKind kind) {
  return kind == LayerKind::Conv2d || kind == LayerKind::Dense;
}

// Nominal (worst-case) per-tile buffer footprints used by the feasibility
// check. Edge tiles are never larger than the nominal tile.
struct Footprints {
  uint64_t ifmap = 0;
  uint64_t weights = 0;
  uint64_t ofmap = 0;
};

Footprints nominal_footprints(const LayerNode& layer, const LayerShapes& s,
                              const Tiling& t, const DnnGraph& graph) {
  Footprints f;
  const LayerAttrs& a = layer.attrs;
  switch (layer.kind) {
    case LayerKind::Conv2d: {
      uint64_t rows = std::min(s.in.h, (t.tile_out_h - 1) * a.stride +
                                           a.dilation * (a.kernel_h - 1) + 1);
      uint64_t cols = std::min(s.in.w, (t.tile_out_w - 1) * a.stride +
                                           a.dilation * (a.kernel_w - 1) + 1);
      f.ifmap = checked_mul(checked_mul(t.tile_in_c, rows, "ifmap tile"),
                            checked_mul(cols, s.in_eb, "ifmap tile"), "ifmap tile");
      f.weights = checked_mul(
          checked_mul(t.tile_out_c, t.tile_in_c, "weight tile"),
          checked_mul(a.kernel_h * a.kernel_w, s.weight_eb, "weight tile"),
          "weight tile");
      break;
    }
    case LayerKind::Dense: {
      f.ifmap = checked_mul(t.tile_in_c, s.in_eb, "ifmap tile");
      f.weights = checked_mul(checked_mul(t.tile_out_c, t.tile_in_c, "weight tile"),
                              s.weight_eb, "weight tile");
      break;
    }
    case LayerKind::Pooling: {
      uint64_t rows = std::min(s.in.h, (t.tile_out_h - 1) * a.stride + a.kernel_h);
      uint64_t cols = std::min(s.in.w, (t.tile_out_w - 1) * a.stride + a.kernel_w);
      f.ifmap = checked_mul(checked_mul(t.tile_out_c, rows, "ifmap tile"),
                            checked_mul(cols, s.in_eb, "ifmap tile"), "ifmap tile");
      break;
    }
    case LayerKind::Upscaling: {
      uint64_t rows = std::min(s.in.h, ceil_div(t.tile_out_h, a.factor) + 1);
      uint64_t cols = std::min(s.in.w, ceil_div(t.tile_out_w, a.factor) + 1);
      f.ifmap = checked_mul(checked_mul(t.tile_out_c, rows, "ifmap tile"),
                            checked_mul(cols, s.in_eb, "ifmap tile"), "ifmap tile");
      break;
    }
    case LayerKind::Elementwise: {
      uint64_t per_input =
          checked_mul(t.tile_out_c, t.tile_out_h * t.tile_out_w, "ifmap tile");
      for (const std::string& iname : layer.inputs) {
        f.ifmap = checked_add(
            f.ifmap,
            checked_mul(per_input, graph.tensor(iname).element_bytes, "ifmap tile"),
            "ifmap tile");
      }
      break;
    }
  }
  uint64_t out_elems = checked_mul(t.tile_out_c, t.tile_out_h * t.tile_out_w, "ofmap tile");
  f.ofmap = checked_mul(out_elems, s.out_eb, "ofmap tile");
  return f;
}

uint64_t compute_cycles_dims(const LayerNode& layer,
                             const SystemDescription& sys, uint64_t oc,
                             uint64_t ic, uint64_t oh, uint64_t ow) {
  if (separate_reduction(layer.kind)) {
    uint64_t c = ceil_div(ic, sys.nce.rows) * ceil_div(oc, sys.nce.cols);
    c = checked_mul(c, oh * ow, "compute cycles");
    return checked_mul(c, layer.attrs.kernel_h * layer.attrs.kernel_w,
                       "compute cycles");
  }
  return ceil_div(checked_mul(oc, oh * ow, "compute cycles"), sys.nce.cols);
}

struct LoadRecord {
  uint64_t task_id = 0;
  std::string tensor;  // tensor whose availability gates this load
  Region region;
};

struct StoreRecord {
  uint64_t task_id = 0;
  Region region;  // produced portion of the layer's output tensor
};

struct LoweredLayer {
  std::vector<Task> tasks;
  std::vector<std::pair<uint64_t, uint64_t>> edges;
  std::vector<LoadRecord> loads;
  std::vector<StoreRecord> stores;
};

LoweredLayer lower_layer_impl(const LayerNode& layer, const Tiling& t,
                              const DnnGraph& graph,
                              const SystemDescription& sys, uint64_t id_base) {
  LoweredLayer out;
  LayerShapes s = layer_shapes(layer, graph);
  const LayerAttrs& a = layer.attrs;
  uint64_t next_id = id_base;

  auto add_task = [&](TaskKind kind, uint64_t cost, uint64_t tile) -> uint64_t {
    Task task;
    task.id = next_id++;
    task.kind = kind;
    task.resource = kind == TaskKind::Compute ? Resource::Nce : Resource::Bus;
    task.cost = cost;
    task.layer = layer.name;
    task.tile = tile;
    out.tasks.push_back(std::move(task));
    return next_id - 1;
  };

  uint64_t tile_ordinal = 0;
  for (uint64_t ci = 0; ci < t.count_c; ++ci) {
    uint64_t c0 = ci * t.tile_out_c;
    uint64_t oc_t = std::min(t.tile_out_c, s.out.c - c0);
    for (uint64_t hi = 0; hi < t.count_h; ++hi) {
      uint64_t h0 = hi * t.tile_out_h;
      uint64_t oh_t = std::min(t.tile_out_h, s.out.h - h0);
      for (uint64_t wi = 0; wi < t.count_w; ++wi, ++tile_ordinal) {
        uint64_t w0 = wi * t.tile_out_w;
        uint64_t ow_t = std::min(t.tile_out_w, s.out.w - w0);

        std::vector<uint64_t> compute_ids;
        for (uint64_t ki = 0; ki < t.count_ic; ++ki) {
          uint64_t ic0 = ki * t.tile_in_c;
          uint64_t ic_t = std::min(t.tile_in_c, s.ic_total - ic0);

          // Data input load(s) for this reduction chunk.
          std::vector<uint64_t> load_ids;
          Region dep_region;  // gates the weight load as well
          switch (layer.kind) {
            case LayerKind::Conv2d: {
              auto [r0, r1] = window_span(h0, oh_t, a.stride, a.dilation,
                                          a.kernel_h, a.padding, s.in.h);
              auto [q0, q1] = window_span(w0, ow_t, a.stride, a.dilation,
                                          a.kernel_w, a.padding, s.in.w);
              dep_region = {ic0, ic0 + ic_t, r0, r1, q0, q1};
              uint64_t bytes = ic_t * (r1 - r0) * (q1 - q0) * s.in_eb;
              load_ids.push_back(add_task(TaskKind::DmaLoad, bytes, tile_ordinal));
              out.loads.push_back({load_ids.back(), layer.data_input(), dep_region});
              break;
            }
            case LayerKind::Dense: {
              uint64_t hw = s.in.h * s.in.w;
              dep_region = {ic0 / hw, std::min(s.in.c, ceil_div(ic0 + ic_t, hw)),
                            0, s.in.h, 0, s.in.w};
              uint64_t bytes = ic_t * s.in_eb;
              load_ids.push_back(add_task(TaskKind::DmaLoad, bytes, tile_ordinal));
              out.loads.push_back({load_ids.back(), layer.data_input(), dep_region});
              break;
            }
            case LayerKind::Pooling: {
              auto [r0, r1] = window_span(h0, oh_t, a.stride, 1, a.kernel_h,
                                          a.padding, s.in.h);
              auto [q0, q1] = window_span(w0, ow_t, a.stride, 1, a.kernel_w,
                                          a.padding, s.in.w);
              dep_region = {c0, c0 + oc_t, r0, r1, q0, q1};
              uint64_t bytes = oc_t * (r1 - r0) * (q1 - q0) * s.in_eb;
              load_ids.push_back(add_task(TaskKind::DmaLoad, bytes, tile_ordinal));
              out.loads.push_back({load_ids.back(), layer.data_input(), dep_region});
              break;
            }
            case LayerKind::Upscaling: {
              uint64_t r0 = h0 / a.factor;
              uint64_t r1 = std::min(s.in.h, ceil_div(h0 + oh_t, a.factor));
              uint64_t q0 = w0 / a.factor;
              uint64_t q1 = std::min(s.in.w, ceil_div(w0 + ow_t, a.factor));
              dep_region = {c0, c0 + oc_t, r0, r1, q0, q1};
              uint64_t bytes = oc_t * (r1 - r0) * (q1 - q0) * s.in_eb;
              load_ids.push_back(add_task(TaskKind::DmaLoad, bytes, tile_ordinal));
              out.loads.push_back({load_ids.back(), layer.data_input(), dep_region});
              break;
            }
            case LayerKind::Elementwise: {
              dep_region = {c0, c0 + oc_t, h0, h0 + oh_t, w0, w0 + ow_t};
              for (const std::string& iname : layer.inputs) {
                uint64_t bytes =
                    oc_t * oh_t * ow_t * graph.tensor(iname).element_bytes;
                load_ids.push_back(add_task(TaskKind::DmaLoad, bytes, tile_ordinal));
                out.loads.push_back({load_ids.back(), iname, dep_region});
              }
              break;
            }
          }

          if (layer.has_weights()) {
            uint64_t kh = layer.kind == LayerKind::Conv2d ? a.kernel_h : 1;
            uint64_t kw = layer.kind == LayerKind::Conv2d ? a.kernel_w : 1;
            uint64_t bytes = oc_t * ic_t * kh * kw * s.weight_eb;
            uint64_t wid = add_task(TaskKind::DmaLoad, bytes, tile_ordinal);
            // Weight transfers are issued with the tile they feed, so they are
            // gated by the same upstream stores as the tile's data chunk.
            out.loads.push_back({wid, layer.data_input(), dep_region});
            // Read region on the weight tensor itself, normalized
            // (oc, ic, kh*kw); only relevant when another layer produces it.
            out.loads.push_back(
                {wid, layer.weight_input(),
                 Region{c0, c0 + oc_t, ic0, ic0 + ic_t, 0, kh * kw}});
            load_ids.push_back(wid);
          }

          uint64_t cycles =
              compute_cycles_dims(layer, sys, oc_t, ic_t, oh_t, ow_t);
          uint64_t cid = add_task(TaskKind::Compute, cycles, tile_ordinal);
          for (uint64_t lid : load_ids) out.edges.emplace_back(lid, cid);
          compute_ids.push_back(cid);
        }

        uint64_t store_bytes = oc_t * oh_t * ow_t * s.out_eb;
        uint64_t sid = add_task(TaskKind::DmaStore, store_bytes, tile_ordinal);
        for (uint64_t cid : compute_ids) out.edges.emplace_back(cid, sid);
        out.stores.push_back(
            {sid, Region{c0, c0 + oc_t, h0, h0 + oh_t, w0, w0 + ow_t}});
      }
    }
  }
  return out;
}

}  // namespace

Tiling tile_layer(const LayerNode& layer, const DnnGraph& graph,
                  const SystemDescription& sys) {
  LayerShapes s = layer_shapes(layer, graph);
  Tiling t;
  t.layer = layer.name;
  t.tile_out_c = s.out.c;
  t.tile_out_h = s.out.h;
  t.tile_out_w = s.out.w;
  t.tile_in_c = s.ic_total;

  const bool conv_like = separate_reduction(layer.kind);
  enum Dim { kOutC, kOutH, kOutW, kInC };

  auto dim_value = [&](Dim d) -> uint64_t& {
    switch (d) {
      case kOutC: return t.tile_out_c;
      case kOutH: return t.tile_out_h;
      case kOutW: return t.tile_out_w;
      default: return t.tile_in_c;
    }
  };
  auto available = [&](Dim d) {
    if (d == kInC) return conv_like;
    if ((d == kOutH || d == kOutW) && layer.kind == LayerKind::Dense) return false;
    return true;
  };
  // Which buffer footprints a dimension can shrink.
  auto affects = [&](Dim d, int buffer /*0=ifmap 1=weights 2=ofmap*/) {
    switch (buffer) {
      case 0:  // ifmap
        if (conv_like) return d == kOutH || d == kOutW || d == kInC;
        return d == kOutC || d == kOutH || d == kOutW;
      case 1:  // weights
        return conv_like && (d == kOutC || d == kInC);
      default:  // ofmap
        return d == kOutC || d == kOutH || d == kOutW;
    }
  };

  for (;;) {
    // Non-reduction kinds tile channels jointly.
    if (!conv_like) t.tile_in_c = t.tile_out_c;
    Footprints f = nominal_footprints(layer, s, t, graph);
    bool violated[3] = {f.ifmap > sys.nce.ifmap_buffer_bytes,
                        f.weights > sys.nce.weight_buffer_bytes,
                        f.ofmap > sys.nce.ofmap_buffer_bytes};
    if (!violated[0] && !violated[1] && !violated[2]) break;

    bool halved = false;
    for (Dim d : {kOutC, kOutH, kOutW, kInC}) {
      if (!available(d) || dim_value(d) <= 1) continue;
      bool relevant = false;
      for (int b = 0; b < 3; ++b) relevant |= violated[b] && affects(d, b);
      if (!relevant) continue;
      dim_value(d) = ceil_div(dim_value(d), 2);
      halved = true;
      break;
    }
    if (!halved) {
      const char* which = violated[0] ? "ifmap" : violated[1] ? "weight" : "ofmap";
      uint64_t need = violated[0] ? f.ifmap : violated[1] ? f.weights : f.ofmap;
      uint64_t have = violated[0]   ? sys.nce.ifmap_buffer_bytes
                      : violated[1] ? sys.nce.weight_buffer_bytes
                                    : sys.nce.ofmap_buffer_bytes;
      throw ValidationError("layer '" + layer.name +
                            "': tiling infeasible: minimal tile exceeds " + which +
                            " buffer (" + std::to_string(need) + " > " +
                            std::to_string(have) + " bytes)");
    }
  }

  t.count_c = ceil_div(s.out.c, t.tile_out_c);
  t.count_h = ceil_div(s.out.h, t.tile_out_h);
  t.count_w = ceil_div(s.out.w, t.tile_out_w);
  // Channel-tied kinds slice channels through the out_c loop already.
  t.count_ic = conv_like ? ceil_div(s.ic_total, t.tile_in_c) : 1;
  return t;
}

uint64_t compute_cycles(const LayerNode& layer, const Tiling& tiling,
                        const SystemDescription& sys) {
  return compute_cycles_dims(layer, sys, tiling.tile_out_c, tiling.tile_in_c,
                             tiling.tile_out_h, tiling.tile_out_w);
}

TaskGraph lower_layer(const LayerNode& layer, const Tiling& tiling,
                      const DnnGraph& graph, const SystemDescription& sys) {
  LoweredLayer lowered = lower_layer_impl(layer, tiling, graph, sys, 0);
  TaskGraph tg;
  tg.tasks = std::move(lowered.tasks);
  tg.edges = std::move(lowered.edges);
  std::sort(tg.edges.begin(), tg.edges.end());
  return tg;
}

TaskGraph compile(const DnnGraph& graph, const SystemDescription& sys) {
  TaskGraph tg;
  // Producer tiles per tensor, for store -> load dependencies.
  std::unordered_map<std::string, std::vector<StoreRecord>> produced;
  std::vector<LoadRecord> all_loads;

  for (const LayerNode& layer : graph.layers) {
    Tiling tiling = tile_layer(layer, graph, sys);
    LoweredLayer lowered =
        lower_layer_impl(layer, tiling, graph, sys, tg.tasks.size());
    tg.tasks.insert(tg.tasks.end(), lowered.tasks.begin(), lowered.tasks.end());
    tg.edges.insert(tg.edges.end(), lowered.edges.begin(), lowered.edges.end());
    all_loads.insert(all_loads.end(), lowered.loads.begin(), lowered.loads.end());
    auto& recs = produced[layer.output];
    recs.insert(recs.end(), lowered.stores.begin(), lowered.stores.end());
  }

  for (const LoadRecord& load : all_loads) {
    auto it = produced.find(load.tensor);
    if (it == produced.end()) continue;  // external tensor
    for (const StoreRecord& store : it->second) {
      if (store.region.intersects(load.region)) {
        tg.edges.emplace_back(store.task_id, load.task_id);
      }
    }
  }

  std::sort(tg.edges.begin(), tg.edges.end());
  tg.edges.erase(std::unique(tg.edges.begin(), tg.edges.end()), tg.edges.end());
  return tg;
}

void validate_taskgraph(const TaskGraph& tg, bool compute_invariant) {
  const uint64_t n = tg.tasks.size();
  for (uint64_t i = 0; i < n; ++i) {
    const Task& t = tg.tasks[i];
    if (t.id != i) {
      throw ValidationError("task graph: ids must be dense and ordered (task " +
                            std::to_string(i) + " has id " + std::to_string(t.id) + ")");
    }
    bool dma = t.kind != TaskKind::Compute;
    if (dma && t.resource != Resource::Bus) {
      throw ValidationError("task " + std::to_string(t.id) + ": DMA tasks run on BUS");
    }
    if (!dma && t.resource != Resource::Nce) {
      throw ValidationError("task " + std::to_string(t.id) + ": compute tasks run on NCE");
    }
  }
  for (const auto& [p, s] : tg.edges) {
    if (p >= n || s >= n) {
      throw ValidationError("task graph: edge (" + std::to_string(p) + "," +
                            std::to_string(s) + ") references a missing task");
    }
    if (p == s) {
      throw ValidationError("task graph: self edge on task " + std::to_string(p));
    }
  }

  // Kahn's algorithm for cycle detection.
  std::vector<uint64_t> indeg(n, 0);
  std::vector<std::vector<uint64_t>> succs(n);
  for (const auto& [p, s] : tg.edges) {
    indeg[s]++;
    succs[p].push_back(s);
  }
  std::vector<uint64_t> stack;
  for (uint64_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) stack.push_back(i);
  }
  uint64_t seen = 0;
  while (!stack.empty()) {
    uint64_t u = stack.back();
    stack.pop_back();
    ++seen;
    for (uint64_t v : succs[u]) {
      if (--indeg[v] == 0) stack.push_back(v);
    }
  }
  if (seen != n) throw ValidationError("task graph: dependency cycle detected");

  if (compute_invariant) {
    std::vector<std::vector<uint64_t>> preds(n);
    for (const auto& [p, s] : tg.edges) preds[s].push_back(p);
    for (const Task& t : tg.tasks) {
      if (t.kind != TaskKind::Compute) continue;
      auto same_tile = [&](uint64_t other, TaskKind kind) {
        const Task& o = tg.tasks[other];
        return o.kind == kind && o.layer == t.layer && o.tile == t.tile;
      };
      bool has_load = std::any_of(preds[t.id].begin(), preds[t.id].end(),
                                  [&](uint64_t p) { return same_tile(p, TaskKind::DmaLoad); });
      bool has_store = std::any_of(succs[t.id].begin(), succs[t.id].end(),
                                   [&](uint64_t s) { return same_tile(s, TaskKind::DmaStore); });
      if (!has_load || !has_store) {
        throw ValidationError("task " + std::to_string(t.id) +
                              ": compute task lacks a same-tile load predecessor "
                              "or store successor");
      }
    }
  }
}

std::string save_taskgraph(const TaskGraph& tg) {
  json doc;
  doc["tasks"] = json::array();
  for (const Task& t : tg.tasks) {
    doc["tasks"].push_back({{"id", t.id},
                            {"kind", to_string(t.kind)},
                            {"resource", to_string(t.resource)},
                            {"cost", t.cost},
                            {"layer", t.layer},
                            {"tile", t.tile}});
  }
  doc["edges"] = json::array();
  for (const auto& [p, s] : tg.edges) doc["edges"].push_back({p, s});
  return doc.dump(2) + "\n";
}

TaskGraph load_taskgraph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("task graph document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("tasks") || !doc.contains("edges")) {
    throw ParseError("task graph document: expected object with 'tasks' and 'edges'");
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "tasks" && it.key() != "edges") {
      throw ParseError("task graph document: unknown key '" + it.key() + "'");
    }
  }
  TaskGraph tg;
  for (const json& jt : doc["tasks"]) {
    static const std::set<std::string> known = {"id",   "kind",  "resource",
                                                "cost", "layer", "tile"};
    for (auto it = jt.begin(); it != jt.end(); ++it) {
      if (!known.count(it.key())) {
        throw ParseError("task entry: unknown key '" + it.key() + "'");
      }
    }
    Task t;
    if (!jt.contains("id") || !jt["id"].is_number_unsigned()) {
      throw ParseError("task entry: missing integer 'id'");
    }
    t.id = jt["id"].get<uint64_t>();
    std::string kind = jt.value("kind", "");
    if (kind == "dma_load") t.kind = TaskKind::DmaLoad;
    else if (kind == "compute") t.kind = TaskKind::Compute;
    else if (kind == "dma_store") t.kind = TaskKind::DmaStore;
    else throw ParseError("task " + std::to_string(t.id) + ": unknown kind '" + kind + "'");
    std::string res = jt.value("resource", "");
    if (res == "BUS") t.resource = Resource::Bus;
    else if (res == "NCE") t.resource = Resource::Nce;
    else throw ParseError("task " + std::to_string(t.id) + ": unknown resource '" + res + "'");
    if (!jt.contains("cost") || !jt["cost"].is_number_unsigned()) {
      throw ParseError("task " + std::to_string(t.id) + ": missing integer 'cost'");
    }
    t.cost = jt["cost"].get<uint64_t>();
    t.layer = jt.value("layer", "");
    t.tile = jt.contains("tile") ? jt["tile"].get<uint64_t>() : 0;
    tg.tasks.push_back(std::move(t));
  }
  for (const json& je : doc["edges"]) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_unsigned() ||
        !je[1].is_number_unsigned()) {
      throw ParseError("task graph document: edges must be [pred, succ] id pairs");
    }
    tg.edges.emplace_back(je[0].get<uint64_t>(), je[1].get<uint64_t>());
  }
  validate_taskgraph(tg);
  return tg;
}

}  // namespace dnnsim
