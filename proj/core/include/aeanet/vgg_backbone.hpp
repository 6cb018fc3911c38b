/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The AEANet Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <torch/types.h>

#include "aeanet/image.hpp"
#include "aeanet/tensor_io.hpp"

namespace aeanet {

/// Activation taps of the frozen encoder, in depth order.
enum class Tap : int { relu1_1 = 0, relu2_1, relu3_1, relu4_1, relu5_1 };

inline constexpr int kNumTaps = 5;
inline constexpr std::array<Tap, kNumTaps> kAllTaps = {Tap::relu1_1, Tap::relu2_1, Tap::relu3_1,
                                                       Tap::relu4_1, Tap::relu5_1};

std::string_view tap_name(Tap tap);
/// Throws ArgumentError for anything other than relu1_1 ... relu5_1.
Tap parse_tap(std::string_view name);

/// Channel widths of the five VGG blocks. The stock VGG-19 widths are the
/// default; narrower specs exist for fast tests and must never be used with
/// a real weight file.
struct BackboneSpec {
  std::array<int64_t, kNumTaps> widths{64, 128, 256, 512, 512};

  static BackboneSpec vgg19() { return {}; }
  int64_t width(Tap tap) const { return widths[static_cast<int>(tap)]; }
  bool operator==(const BackboneSpec&) const = default;
};

/// One 3x3 convolution of the encoder.
struct ConvLayerSpec {
  std::string name;  // e.g. "conv3_2"
  int64_t in_channels;
  int64_t out_channels;
  bool pool_before;  // 2x2/2 max pooling precedes this conv
  int tap = -1;      // index into kAllTaps when this conv's ReLU is a tap
};

/// conv1_1 ... conv5_1 of VGG-19 (13 convolutions) for the given widths.
std::vector<ConvLayerSpec> vgg_layers(const BackboneSpec& spec = {});

/// Frozen encoder weights. Tensors are detached, never require grad, and are
/// only handed out by const reference.
class PretrainedWeights {
 public:
  struct Conv {
    torch::Tensor kernel;  // out x in x 3 x 3
    torch::Tensor bias;    // out
  };

  PretrainedWeights() = default;

  /// Validates names and shapes against `spec`; throws SchemaError naming the
  /// first missing or mis-shaped layer.
  PretrainedWeights(const TensorMap& tensors, const BackboneSpec& spec);

  const BackboneSpec& spec() const { return spec_; }
  const Conv& conv(const std::string& name) const;
  const std::vector<ConvLayerSpec>& layers() const { return layers_; }

  /// Same schema as the file format: "conv1_1.weight", "conv1_1.bias", ...
  TensorMap to_tensor_map() const;

  bool empty() const { return convs_.empty(); }

 private:
  BackboneSpec spec_;
  std::vector<ConvLayerSpec> layers_;
  std::map<std::string, Conv> convs_;
};

/// Loads encoder weights from a safetensors file with entries
/// "conv{b}_{i}.weight" (out x in x 3 x 3) and "conv{b}_{i}.bias" (out).
PretrainedWeights load_vgg_weights(const std::filesystem::path& path,
                                   const BackboneSpec& spec = BackboneSpec::vgg19());

void save_vgg_weights(const PretrainedWeights& weights, const std::filesystem::path& path);

/// Deterministic stand-in weights with VGG-19 shapes (He-uniform kernels,
/// small positive biases). For tests and offline demos only.
PretrainedWeights synthesize_vgg_weights(const BackboneSpec& spec, uint64_t seed);

/// The five tapped activations of a batch, each N x C_k x H_k x W_k.
class FeaturePyramid {
 public:
  FeaturePyramid() = default;
  explicit FeaturePyramid(std::array<torch::Tensor, kNumTaps> taps) : taps_(std::move(taps)) {}

  const torch::Tensor& operator[](Tap tap) const { return taps_[static_cast<int>(tap)]; }
  torch::Tensor& operator[](Tap tap) { return taps_[static_cast<int>(tap)]; }
  const std::array<torch::Tensor, kNumTaps>& taps() const { return taps_; }

  /// Rows of every tap re-ordered by `index` (batch permutation).
  FeaturePyramid index_batch(const torch::Tensor& index) const;

 private:
  std::array<torch::Tensor, kNumTaps> taps_;
};

/// Smallest side accepted by the encoder (relu5_1 is 1x1 at this size).
inline constexpr int64_t kMinEncodeSide = 16;

/// Encodes an N x 3 x H x W batch in [0, 1] through relu5_1. ImageNet
/// mean/std normalization is applied internally. Differentiable with respect
/// to `images`; the weights never receive gradients.
FeaturePyramid encode(const torch::Tensor& images, const PretrainedWeights& weights);
FeaturePyramid encode(const Image& image, const PretrainedWeights& weights);

/// Runs only the layers needed for `tap`. Bit-identical to encode()[tap].
torch::Tensor encode_to(const torch::Tensor& images, Tap tap, const PretrainedWeights& weights);
torch::Tensor encode_to(const Image& image, Tap tap, const PretrainedWeights& weights);
torch::Tensor encode_to(const Image& image, std::string_view tap, const PretrainedWeights& weights);

} // namespace aeanet
