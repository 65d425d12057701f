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

#include "dnnsim/graph.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace dnnsim {

using json = nlohmann::json;

uint64_t Tensor::element_count() const {
  uint64_t n = 1;
  for (uint64_t e : shape) n = checked_mul(n, e, name.c_str());
  return n;
}

uint64_t Tensor::byte_size() const {
  return checked_mul(element_count(), element_bytes, name.c_str());
}

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::Dense: return "dense";
    case LayerKind::Upscaling: return "upscaling";
    case LayerKind::Pooling: return "pooling";
    case LayerKind::Elementwise: return "elementwise";
  }
  return "?";
}

const Tensor& DnnGraph::tensor(const std::string& tname) const {
  for (const Tensor& t : tensors) {
    if (t.name == tname) return t;
  }
  throw ValidationError("unknown tensor '" + tname + "'");
}

Tensor& DnnGraph::tensor(const std::string& tname) {
  for (Tensor& t : tensors) {
    if (t.name == tname) return t;
  }
  throw ValidationError("unknown tensor '" + tname + "'");
}

bool DnnGraph::has_tensor(const std::string& tname) const {
  for (const Tensor& t : tensors) {
    if (t.name == tname) return true;
  }
  return false;
}

const LayerNode& DnnGraph::layer(const std::string& lname) const {
  for (const LayerNode& l : layers) {
    if (l.name == lname) return l;
  }
  throw ValidationError("unknown layer '" + lname + "'");
}

int DnnGraph::producer_of(const std::string& tname) const {
  for (size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].output == tname) return static_cast<int>(i);
  }
  return -1;
}

uint64_t conv_out_extent(uint64_t in, uint64_t kernel, uint64_t stride,
                         uint64_t dilation, uint64_t padding) {
  uint64_t padded = in + 2 * padding;
  uint64_t span = dilation * (kernel - 1) + 1;
  if (padded < span) {
    throw ValidationError("kernel window (" + std::to_string(span) +
                          ") exceeds padded input extent (" +
                          std::to_string(padded) + ")");
  }
  return (padded - span) / stride + 1;
}

namespace {

LayerKind parse_kind(const std::string& s, const std::string& layer_name) {
  if (s == "conv2d") return LayerKind::Conv2d;
  if (s == "dense") return LayerKind::Dense;
  if (s == "upscaling") return LayerKind::Upscaling;
  if (s == "pooling") return LayerKind::Pooling;
  if (s == "elementwise") return LayerKind::Elementwise;
  throw ParseError("layer '" + layer_name + "': unknown kind '" + s + "'");
}

uint64_t get_uint(const json& v, const std::string& ctx) {
  if (!v.is_number_unsigned()) {
    throw ParseError(ctx + ": expected a nonnegative integer");
  }
  return v.get<uint64_t>();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& ctx) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw ParseError(ctx + ": unknown key '" + it.key() + "'");
    }
  }
}

DnnGraph parse_network(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("network document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network document: expected an object");
  reject_unknown_keys(doc, {"name", "tensors", "layers"}, "network document");
  if (!doc.contains("tensors") || !doc.contains("layers")) {
    throw ParseError("network document: missing 'tensors' or 'layers'");
  }

  DnnGraph g;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError("network name: expected a string");
    g.name = doc["name"].get<std::string>();
  }

  for (const json& jt : doc["tensors"]) {
    if (!jt.is_object()) throw ParseError("tensor entry: expected an object");
    reject_unknown_keys(jt, {"name", "shape", "element_bytes"}, "tensor entry");
    Tensor t;
    if (!jt.contains("name") || !jt["name"].is_string()) {
      throw ParseError("tensor entry: missing string 'name'");
    }
    t.name = jt["name"].get<std::string>();
    if (jt.contains("shape")) {
      if (!jt["shape"].is_array() || jt["shape"].empty()) {
        throw ParseError("tensor '" + t.name + "': shape must be a non-empty array");
      }
      for (const json& e : jt["shape"]) {
        t.shape.push_back(get_uint(e, "tensor '" + t.name + "' shape"));
      }
    }
    if (jt.contains("element_bytes")) {
      t.element_bytes = get_uint(jt["element_bytes"], "tensor '" + t.name + "' element_bytes");
    }
    g.tensors.push_back(std::move(t));
  }

  for (const json& jl : doc["layers"]) {
    if (!jl.is_object()) throw ParseError("layer entry: expected an object");
    reject_unknown_keys(jl, {"name", "kind", "attrs", "inputs", "output"}, "layer entry");
    LayerNode l;
    if (!jl.contains("name") || !jl["name"].is_string()) {
      throw ParseError("layer entry: missing string 'name'");
    }
    l.name = jl["name"].get<std::string>();
    const std::string ctx = "layer '" + l.name + "'";
    if (!jl.contains("kind") || !jl["kind"].is_string()) {
      throw ParseError(ctx + ": missing string 'kind'");
    }
    l.kind = parse_kind(jl["kind"].get<std::string>(), l.name);
    if (!jl.contains("inputs") || !jl["inputs"].is_array() || jl["inputs"].empty()) {
      throw ParseError(ctx + ": 'inputs' must be a non-empty array");
    }
    for (const json& e : jl["inputs"]) {
      if (!e.is_string()) throw ParseError(ctx + ": inputs must be tensor names");
      l.inputs.push_back(e.get<std::string>());
    }
    if (!jl.contains("output") || !jl["output"].is_string()) {
      throw ParseError(ctx + ": missing string 'output'");
    }
    l.output = jl["output"].get<std::string>();

    std::set<std::string> allowed;
    switch (l.kind) {
      case LayerKind::Conv2d:
        allowed = {"kernel_h", "kernel_w", "stride", "dilation", "padding"};
        break;
      case LayerKind::Pooling:
        allowed = {"kernel_h", "kernel_w", "stride", "padding"};
        break;
      case LayerKind::Upscaling:
        allowed = {"factor"};
        break;
      case LayerKind::Dense:
      case LayerKind::Elementwise:
        break;
    }
    if (jl.contains("attrs")) {
      const json& ja = jl["attrs"];
      if (!ja.is_object()) throw ParseError(ctx + ": attrs must be an object");
      reject_unknown_keys(ja, allowed, ctx + " attrs");
      if (ja.contains("kernel_h")) l.attrs.kernel_h = get_uint(ja["kernel_h"], ctx + " kernel_h");
      if (ja.contains("kernel_w")) l.attrs.kernel_w = get_uint(ja["kernel_w"], ctx + " kernel_w");
      if (ja.contains("stride")) l.attrs.stride = get_uint(ja["stride"], ctx + " stride");
      if (ja.contains("dilation")) l.attrs.dilation = get_uint(ja["dilation"], ctx + " dilation");
      if (ja.contains("padding")) l.attrs.padding = get_uint(ja["padding"], ctx + " padding");
      if (ja.contains("factor")) l.attrs.factor = get_uint(ja["factor"], ctx + " factor");
    }
    if ((l.kind == LayerKind::Conv2d || l.kind == LayerKind::Pooling) &&
        (!jl.contains("attrs") || !jl["attrs"].contains("kernel_h") ||
         !jl["attrs"].contains("kernel_w"))) {
      throw ParseError(ctx + ": kernel_h and kernel_w are required");
    }
    if (l.kind == LayerKind::Upscaling &&
        (!jl.contains("attrs") || !jl["attrs"].contains("factor"))) {
      throw ParseError(ctx + ": factor is required");
    }
    g.layers.push_back(std::move(l));
  }
  return g;
}

void check_attrs(const LayerNode& l) {
  const std::string ctx = "layer '" + l.name + "'";
  switch (l.kind) {
    case LayerKind::Conv2d:
      if (l.attrs.kernel_h < 1 || l.attrs.kernel_w < 1 || l.attrs.stride < 1 ||
          l.attrs.dilation < 1) {
        throw ValidationError(ctx + ": kernel, stride and dilation must be >= 1");
      }
      break;
    case LayerKind::Pooling:
      if (l.attrs.kernel_h < 1 || l.attrs.kernel_w < 1 || l.attrs.stride < 1) {
        throw ValidationError(ctx + ": kernel and stride must be >= 1");
      }
      break;
    case LayerKind::Upscaling:
      if (l.attrs.factor < 1) throw ValidationError(ctx + ": factor must be >= 1");
      break;
    default:
      break;
  }
  size_t expected_min = l.has_weights() ? 2 : 1;
  if (l.inputs.size() < expected_min) {
    throw ValidationError(ctx + ": expects at least " + std::to_string(expected_min) +
                          " input tensor(s)");
  }
  if (l.has_weights() && l.inputs.size() != 2) {
    throw ValidationError(ctx + ": expects exactly one data input and one weight tensor");
  }
  if ((l.kind == LayerKind::Pooling || l.kind == LayerKind::Upscaling) &&
      l.inputs.size() != 1) {
    throw ValidationError(ctx + ": expects exactly one input tensor");
  }
}

// Infers the output shape of one layer; data input shapes must be known.
std::vector<uint64_t> infer_output_shape(const LayerNode& l, const DnnGraph& g) {
  const std::string ctx = "layer '" + l.name + "'";
  const Tensor& in = g.tensor(l.data_input());
  switch (l.kind) {
    case LayerKind::Conv2d: {
      if (in.shape.size() != 3) {
        throw ValidationError(ctx + ": conv2d input must have shape (c, h, w)");
      }
      const Tensor& w = g.tensor(l.weight_input());
      if (w.shape.size() != 4) {
        throw ValidationError(ctx + ": weights must have shape (oc, ic, kh, kw)");
      }
      if (w.shape[1] != in.shape[0]) {
        throw ValidationError(ctx + ": weight in_channels " + std::to_string(w.shape[1]) +
                              " does not match input channels " + std::to_string(in.shape[0]));
      }
      if (w.shape[2] != l.attrs.kernel_h || w.shape[3] != l.attrs.kernel_w) {
        throw ValidationError(ctx + ": weight kernel dims do not match attrs");
      }
      uint64_t oh, ow;
      try {
        oh = conv_out_extent(in.shape[1], l.attrs.kernel_h, l.attrs.stride,
                             l.attrs.dilation, l.attrs.padding);
        ow = conv_out_extent(in.shape[2], l.attrs.kernel_w, l.attrs.stride,
                             l.attrs.dilation, l.attrs.padding);
      } catch (const ValidationError& e) {
        throw ValidationError(ctx + ": " + e.what());
      }
      return {w.shape[0], oh, ow};
    }
    case LayerKind::Dense: {
      const Tensor& w = g.tensor(l.weight_input());
      if (w.shape.size() != 2) {
        throw ValidationError(ctx + ": weights must have shape (out, in)");
      }
      if (w.shape[1] != in.element_count()) {
        throw ValidationError(ctx + ": weight in_features " + std::to_string(w.shape[1]) +
                              " does not match flattened input size " +
                              std::to_string(in.element_count()));
      }
      return {w.shape[0]};
    }
    case LayerKind::Pooling: {
      if (in.shape.size() != 3) {
        throw ValidationError(ctx + ": pooling input must have shape (c, h, w)");
      }
      uint64_t oh, ow;
      try {
        oh = conv_out_extent(in.shape[1], l.attrs.kernel_h, l.attrs.stride, 1,
                             l.attrs.padding);
        ow = conv_out_extent(in.shape[2], l.attrs.kernel_w, l.attrs.stride, 1,
                             l.attrs.padding);
      } catch (const ValidationError& e) {
        throw ValidationError(ctx + ": " + e.what());
      }
      return {in.shape[0], oh, ow};
    }
    case LayerKind::Upscaling: {
      if (in.shape.size() != 3) {
        throw ValidationError(ctx + ": upscaling input must have shape (c, h, w)");
      }
      return {in.shape[0], checked_mul(in.shape[1], l.attrs.factor, "upscaled height"),
              checked_mul(in.shape[2], l.attrs.factor, "upscaled width")};
    }
    case LayerKind::Elementwise: {
      for (const std::string& iname : l.inputs) {
        const Tensor& other = g.tensor(iname);
        if (other.shape != in.shape) {
          throw ValidationError(ctx + ": elementwise inputs must share one shape ('" +
                                iname + "' differs)");
        }
      }
      return in.shape;
    }
  }
  throw ValidationError(ctx + ": unhandled kind");
}

}  // namespace

DnnGraph validate_graph(const DnnGraph& graph) {
  DnnGraph g = graph;

  std::unordered_set<std::string> tensor_names;
  for (const Tensor& t : g.tensors) {
    if (t.name.empty()) throw ValidationError("tensor with empty name");
    if (!tensor_names.insert(t.name).second) {
      throw ValidationError("duplicate tensor '" + t.name + "'");
    }
    for (uint64_t e : t.shape) {
      if (e < 1) throw ValidationError("tensor '" + t.name + "': extents must be >= 1");
    }
    if (t.has_shape() && t.element_bytes < 1) {
      throw ValidationError("tensor '" + t.name + "': element_bytes must be >= 1");
    }
    if (t.has_shape()) t.byte_size();  // overflow check
  }

  std::unordered_set<std::string> layer_names;
  std::unordered_map<std::string, std::string> producer;  // tensor -> layer
  for (const LayerNode& l : g.layers) {
    if (l.name.empty()) throw ValidationError("layer with empty name");
    if (!layer_names.insert(l.name).second) {
      throw ValidationError("duplicate layer '" + l.name + "'");
    }
    check_attrs(l);
    for (const std::string& in : l.inputs) {
      if (!tensor_names.count(in)) {
        throw ValidationError("layer '" + l.name + "' consumes undeclared tensor '" + in + "'");
      }
    }
    if (!tensor_names.count(l.output)) {
      throw ValidationError("layer '" + l.name + "' produces undeclared tensor '" + l.output + "'");
    }
    auto [it, inserted] = producer.emplace(l.output, l.name);
    if (!inserted) {
      throw ValidationError("tensor '" + l.output + "' has two producers ('" +
                            it->second + "' and '" + l.name + "')");
    }
  }

  // External tensors (no producer) must carry a declared shape; anything
  // consumed without a shape and without a producer is dangling.
  for (const LayerNode& l : g.layers) {
    for (const std::string& in : l.inputs) {
      const Tensor& t = g.tensor(in);
      if (!producer.count(in) && !t.has_shape()) {
        throw ValidationError("tensor '" + in + "' is consumed but never produced");
      }
    }
  }

  // Stable topological order: Kahn's algorithm, choosing the ready layer with
  // the smallest declaration index. Detects cycles.
  std::vector<LayerNode> ordered;
  std::vector<bool> emitted(g.layers.size(), false);
  std::unordered_set<std::string> available;  // tensors with known contents
  for (const Tensor& t : g.tensors) {
    if (!producer.count(t.name)) available.insert(t.name);
  }
  for (size_t step = 0; step < g.layers.size(); ++step) {
    bool progress = false;
    for (size_t i = 0; i < g.layers.size(); ++i) {
      if (emitted[i]) continue;
      const LayerNode& l = g.layers[i];
      bool ready = std::all_of(l.inputs.begin(), l.inputs.end(),
                               [&](const std::string& in) { return available.count(in) > 0; });
      if (ready) {
        emitted[i] = true;
        available.insert(l.output);
        ordered.push_back(l);
        progress = true;
        break;
      }
    }
    if (!progress) break;
  }
  if (ordered.size() != g.layers.size()) {
    for (size_t i = 0; i < g.layers.size(); ++i) {
      if (!emitted[i]) {
        throw ValidationError("layer '" + g.layers[i].name +
                              "' is part of a dependency cycle");
      }
    }
  }
  g.layers = std::move(ordered);
  return g;
}

DnnGraph infer_shapes(const DnnGraph& graph) {
  DnnGraph g = graph;
  for (const LayerNode& l : g.layers) {
    for (const std::string& in : l.inputs) {
      if (!g.tensor(in).has_shape()) {
        throw ValidationError("layer '" + l.name + "': input tensor '" + in +
                              "' has no shape");
      }
    }
    std::vector<uint64_t> out_shape = infer_output_shape(l, g);
    Tensor& out = g.tensor(l.output);
    if (out.has_shape() && out.shape != out_shape) {
      auto fmt = [](const std::vector<uint64_t>& s) {
        std::string r = "(";
        for (size_t i = 0; i < s.size(); ++i) {
          r += (i ? "," : "") + std::to_string(s[i]);
        }
        return r + ")";
      };
      throw ValidationError("shape-inference conflict on layer '" + l.name +
                            "': expected " + fmt(out_shape) + ", found " + fmt(out.shape));
    }
    out.shape = std::move(out_shape);
    if (out.element_bytes == 0) {
      out.element_bytes = g.tensor(l.data_input()).element_bytes;
    }
    out.byte_size();  // overflow check
  }
  for (const Tensor& t : g.tensors) {
    if (!t.has_shape()) {
      throw ValidationError("tensor '" + t.name +
                            "' is never produced and declares no shape");
    }
  }
  return g;
}

DnnGraph load_network(const std::string& text) {
  return infer_shapes(validate_graph(parse_network(text)));
}

uint64_t mac_count(const LayerNode& layer, const DnnGraph& graph) {
  const Tensor& out = graph.tensor(layer.output);
  switch (layer.kind) {
    case LayerKind::Conv2d: {
      const Tensor& in = graph.tensor(layer.data_input());
      uint64_t m = checked_mul(out.element_count(), in.shape[0], "mac count");
      m = checked_mul(m, layer.attrs.kernel_h, "mac count");
      return checked_mul(m, layer.attrs.kernel_w, "mac count");
    }
    case LayerKind::Dense: {
      const Tensor& in = graph.tensor(layer.data_input());
      return checked_mul(in.element_count(), out.element_count(), "mac count");
    }
    case LayerKind::Pooling:
    case LayerKind::Upscaling:
    case LayerKind::Elementwise:
      return out.element_count();
  }
  return 0;
}

uint64_t min_dram_traffic_bytes(const LayerNode& layer, const DnnGraph& graph) {
  uint64_t total = 0;
  for (const std::string& in : layer.inputs) {
    total = checked_add(total, graph.tensor(in).byte_size(), "dram traffic");
  }
  return checked_add(total, graph.tensor(layer.output).byte_size(), "dram traffic");
}

}  // namespace dnnsim
