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
#include <string>
#include <vector>

#include "dnnsim/common.hpp"

namespace dnnsim {

// A named tensor. Feature maps use (channels, height, width); convolution
// weights use (out_channels, in_channels, kernel_h, kernel_w); dense weights
// use (out_features, in_features). An empty shape means "not yet inferred".
struct Tensor {
  std::string name;
  std::vector<uint64_t> shape;
  uint64_t element_bytes = 0;

  bool has_shape() const { return !shape.empty(); }
  uint64_t element_count() const;  // product of extents, overflow-checked
  uint64_t byte_size() const;      // element_count * element_bytes
};

enum class LayerKind { Conv2d, Dense, Upscaling, Pooling, Elementwise };

const char* to_string(LayerKind kind);

// Per-layer attributes; which fields are meaningful depends on the kind.
struct LayerAttrs {
  uint64_t kernel_h = 1;
  uint64_t kernel_w = 1;
  uint64_t stride = 1;
  uint64_t dilation = 1;
  uint64_t padding = 0;
  uint64_t factor = 1;  // Upscaling only

  bool operator==(const LayerAttrs&) const = default;
};

struct LayerNode {
  std::string name;
  LayerKind kind = LayerKind::Elementwise;
  LayerAttrs attrs;
  std::vector<std::string> inputs;  // data input(s) first, weights last
  std::string output;

  bool has_weights() const {
    return kind == LayerKind::Conv2d || kind == LayerKind::Dense;
  }
  // Data inputs exclude the weight tensor.
  size_t data_input_count() const {
    return has_weights() ? inputs.size() - 1 : inputs.size();
  }
  const std::string& data_input(size_t i = 0) const { return inputs.at(i); }
  const std::string& weight_input() const { return inputs.back(); }
};

// Validated DNN graph. Layers are stored in a stable topological order
// (declaration order preserved where possible); every non-external tensor has
// exactly one producer.
struct DnnGraph {
  std::string name;
  std::vector<Tensor> tensors;
  std::vector<LayerNode> layers;

  const Tensor& tensor(const std::string& tname) const;
  Tensor& tensor(const std::string& tname);
  bool has_tensor(const std::string& tname) const;
  const LayerNode& layer(const std::string& lname) const;
  // Index into `layers` of the producer of `tname`, or -1 for external
  // tensors (network inputs and weights).
  int producer_of(const std::string& tname) const;
};

// Parses and fully validates a network document: syntax, reference and
// producer checks, topological ordering, shape inference.
DnnGraph load_network(const std::string& text);

// Shape inference alone; idempotent. Throws ValidationError on conflicts
// between declared and inferred shapes.
DnnGraph infer_shapes(const DnnGraph& graph);

// Structural validation (references, DAG, producer uniqueness). Returns the
// graph with layers in stable topological order.
DnnGraph validate_graph(const DnnGraph& graph);

// Conv2d/Pooling output extent: floor((in + 2*pad - dil*(k-1) - 1)/stride)+1.
uint64_t conv_out_extent(uint64_t in, uint64_t kernel, uint64_t stride,
                         uint64_t dilation, uint64_t padding);

// Multiply-accumulate count used as the layer's arithmetic cost proxy.
// Conv2d: oh*ow*oc*ic*kh*kw; Dense: in*out; Pooling/Upscaling/Elementwise:
// one op per output element.
uint64_t mac_count(const LayerNode& layer, const DnnGraph& graph);

// Lower bound on external-memory traffic: every tensor touched by the layer
// (inputs, weights, output) moved exactly once.
uint64_t min_dram_traffic_bytes(const LayerNode& layer, const DnnGraph& graph);

}  // namespace dnnsim
