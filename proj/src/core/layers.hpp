// Copyright 2026 The elvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "matrix.hpp"

namespace elvc {

enum class LayerKind { kConv1D, kGru, kLinear, kRelu };

const char* layer_kind_name(LayerKind kind) noexcept;
LayerKind parse_layer_kind(const std::string& name);

struct LayerSpec {
  LayerKind kind = LayerKind::kLinear;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t kernel = 0;  // Conv1D only, odd

  void validate() const;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// A layer's trainable tensors, in a fixed order:
//   Conv1D: weight [out x kernel*in] (tap-major columns), bias [1 x out]
//   GRU:    w_ih [3H x in], w_hh [3H x H], b_ih [1 x 3H], b_hh [1 x 3H]; gates r, z, n
//   Linear: weight [out x in], bias [1 x out]
//   ReLU:   none
struct Layer {
  LayerSpec spec;
  std::vector<Matrix> params;

  static Layer zeros(const LayerSpec& spec);
  std::vector<std::string> param_names() const;
};

// Intermediates saved by forward for backward.
struct LayerCache {
  std::vector<Matrix> saved;
};

// x: T x in  ->  T x out. Pass nullptr to skip caching.
Matrix layer_forward(const Layer& layer, const Matrix& x, LayerCache* cache);

// Accumulates parameter gradients into `grads` (same shapes as params) and
// returns dLoss/dx.
Matrix layer_backward(const Layer& layer, const LayerCache& cache, const Matrix& grad_out,
                      std::vector<Matrix>& grads);

}  // namespace elvc
