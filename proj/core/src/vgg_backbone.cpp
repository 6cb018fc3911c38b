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

#include "aeanet/vgg_backbone.hpp"

#include <cmath>

#include <torch/torch.h>

#include "aeanet/errors.hpp"
#include "padding.hpp"

namespace aeanet {

namespace F = torch::nn::functional;

namespace {

constexpr std::array<std::string_view, kNumTaps> kTapNames = {"relu1_1", "relu2_1", "relu3_1",
                                                             "relu4_1", "relu5_1"};

// Convolutions per block up to conv5_1.
constexpr std::array<int, kNumTaps> kConvsPerBlock = {2, 2, 4, 4, 1};

std::string shape_str(at::IntArrayRef s) { return c10::str(s); }

torch::Tensor normalize_input(const torch::Tensor& images) {
  auto opts = images.options();
  auto mean = torch::tensor({0.485, 0.456, 0.406}, opts).view({1, 3, 1, 1});
  auto std = torch::tensor({0.229, 0.224, 0.225}, opts).view({1, 3, 1, 1});
  return (images - mean) / std;
}

void check_input(const torch::Tensor& images) {
  if (images.dim() != 4 || images.size(1) != 3) {
    throw DimensionError("encoder input must be N x 3 x H x W, got " + shape_str(images.sizes()));
  }
  if (images.size(2) < kMinEncodeSide || images.size(3) < kMinEncodeSide) {
    throw DimensionError("image " + std::to_string(images.size(2)) + "x" +
                         std::to_string(images.size(3)) + " is too small to encode (minimum " +
                         std::to_string(kMinEncodeSide) + " per side)");
  }
}

// Runs the encoder up to and including `last_tap`, storing every tap passed.
std::array<torch::Tensor, kNumTaps> run_encoder(const torch::Tensor& images, int last_tap,
                                                const PretrainedWeights& weights) {
  check_input(images);
  std::array<torch::Tensor, kNumTaps> taps;
  auto x = normalize_input(images);
  for (const auto& layer : weights.layers()) {
    if (layer.pool_before) x = F::max_pool2d(x, F::MaxPool2dFuncOptions(2).stride(2));
    const auto& conv = weights.conv(layer.name);
    x = torch::relu(torch::conv2d(detail::pad_for_conv3x3(x), conv.kernel.to(x.scalar_type()),
                                  conv.bias.to(x.scalar_type())));
    if (layer.tap >= 0) {
      taps[static_cast<size_t>(layer.tap)] = x;
      if (layer.tap == last_tap) break;
    }
  }
  return taps;
}

} // namespace

std::string_view tap_name(Tap tap) { return kTapNames[static_cast<size_t>(tap)]; }

Tap parse_tap(std::string_view name) {
  for (int i = 0; i < kNumTaps; ++i) {
    if (kTapNames[static_cast<size_t>(i)] == name) return static_cast<Tap>(i);
  }
  throw ArgumentError("unknown tap '" + std::string(name) + "' (expected relu1_1 ... relu5_1)");
}

std::vector<ConvLayerSpec> vgg_layers(const BackboneSpec& spec) {
  std::vector<ConvLayerSpec> layers;
  int64_t in = 3;
  for (int block = 0; block < kNumTaps; ++block) {
    int64_t out = spec.widths[static_cast<size_t>(block)];
    for (int i = 0; i < kConvsPerBlock[static_cast<size_t>(block)]; ++i) {
      layers.push_back({"conv" + std::to_string(block + 1) + "_" + std::to_string(i + 1), in, out,
                        block > 0 && i == 0, i == 0 ? block : -1});
      in = out;
    }
  }
  return layers;
}

PretrainedWeights::PretrainedWeights(const TensorMap& tensors, const BackboneSpec& spec)
    : spec_(spec), layers_(vgg_layers(spec)) {
  for (const auto& layer : layers_) {
    auto wit = tensors.find(layer.name + ".weight");
    auto bit = tensors.find(layer.name + ".bias");
    if (wit == tensors.end() || bit == tensors.end()) {
      throw SchemaError(layer.name + " absent");
    }
    std::vector<int64_t> kshape{layer.out_channels, layer.in_channels, 3, 3};
    if (wit->second.sizes() != at::IntArrayRef(kshape)) {
      throw SchemaError(layer.name + " kernel shape mismatch: expected " + shape_str(kshape) +
                        ", got " + shape_str(wit->second.sizes()));
    }
    if (bit->second.dim() != 1 || bit->second.size(0) != layer.out_channels) {
      throw SchemaError(layer.name + " bias shape mismatch: expected [" +
                        std::to_string(layer.out_channels) + "], got " +
                        shape_str(bit->second.sizes()));
    }
    convs_[layer.name] = Conv{wit->second.detach().to(torch::kFloat32).contiguous().clone(),
                              bit->second.detach().to(torch::kFloat32).contiguous().clone()};
  }
}

const PretrainedWeights::Conv& PretrainedWeights::conv(const std::string& name) const {
  auto it = convs_.find(name);
  if (it == convs_.end()) throw ArgumentError("no encoder layer named " + name);
  return it->second;
}

TensorMap PretrainedWeights::to_tensor_map() const {
  TensorMap out;
  for (const auto& [name, conv] : convs_) {
    out[name + ".weight"] = conv.kernel;
    out[name + ".bias"] = conv.bias;
  }
  return out;
}

PretrainedWeights load_vgg_weights(const std::filesystem::path& path, const BackboneSpec& spec) {
  if (!std::filesystem::exists(path)) throw LoadError("VGG weight file not found: " + path.string());
  auto file = read_safetensors(path);
  return PretrainedWeights(file.tensors, spec);
}

void save_vgg_weights(const PretrainedWeights& weights, const std::filesystem::path& path) {
  Metadata meta{{"format", "aeanet-vgg19"}};
  for (int i = 0; i < kNumTaps; ++i) {
    meta["width" + std::to_string(i + 1)] = std::to_string(weights.spec().widths[static_cast<size_t>(i)]);
  }
  write_safetensors(path, weights.to_tensor_map(), meta);
}

PretrainedWeights synthesize_vgg_weights(const BackboneSpec& spec, uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  TensorMap tensors;
  for (const auto& layer : vgg_layers(spec)) {
    double fan_in = static_cast<double>(layer.in_channels * 9);
    double bound = std::sqrt(6.0 / fan_in);
    auto w = torch::rand({layer.out_channels, layer.in_channels, 3, 3}, gen) * (2 * bound) - bound;
    auto b = torch::rand({layer.out_channels}, gen) * 0.05;
    tensors[layer.name + ".weight"] = w;
    tensors[layer.name + ".bias"] = b;
  }
  return PretrainedWeights(tensors, spec);
}

FeaturePyramid FeaturePyramid::index_batch(const torch::Tensor& index) const {
  std::array<torch::Tensor, kNumTaps> out;
  for (size_t i = 0; i < out.size(); ++i) out[i] = taps_[i].index_select(0, index);
  return FeaturePyramid(std::move(out));
}

FeaturePyramid encode(const torch::Tensor& images, const PretrainedWeights& weights) {
  return FeaturePyramid(run_encoder(images, kNumTaps - 1, weights));
}

FeaturePyramid encode(const Image& image, const PretrainedWeights& weights) {
  return encode(image.batch(), weights);
}

torch::Tensor encode_to(const torch::Tensor& images, Tap tap, const PretrainedWeights& weights) {
  int idx = static_cast<int>(tap);
  if (idx < 0 || idx >= kNumTaps) throw ArgumentError("tap index out of range");
  return run_encoder(images, idx, weights)[static_cast<size_t>(idx)];
}

torch::Tensor encode_to(const Image& image, Tap tap, const PretrainedWeights& weights) {
  return encode_to(image.batch(), tap, weights);
}

torch::Tensor encode_to(const Image& image, std::string_view tap, const PretrainedWeights& weights) {
  return encode_to(image.batch(), parse_tap(tap), weights);
}

} // namespace aeanet
