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

#include "aeanet/decoder.hpp"

#include <cmath>

#include <torch/torch.h>

#include "aeanet/errors.hpp"
#include "padding.hpp"

namespace aeanet {

namespace F = torch::nn::functional;

namespace {

// Upsampling follows these conv indices (0-based).
bool upsample_after(size_t i) { return i == 0 || i == 4 || i == 6; }

} // namespace

Conv3x3 Conv3x3::init(int64_t in, int64_t out, at::Generator& gen) {
  double bound = 1.0 / std::sqrt(static_cast<double>(in * 9));
  return {torch::rand({out, in, 3, 3}, gen) * (2 * bound) - bound,
          torch::rand({out}, gen) * (2 * bound) - bound};
}

std::vector<std::pair<int64_t, int64_t>> DecoderParams::layout(const BackboneSpec& spec) {
  const int64_t w1 = spec.width(Tap::relu1_1);
  const int64_t w2 = spec.width(Tap::relu2_1);
  const int64_t w3 = spec.width(Tap::relu3_1);
  const int64_t w4 = spec.width(Tap::relu4_1);
  return {{w4, w3}, {w3, w3}, {w3, w3}, {w3, w3}, {w3, w2},
          {w2, w2}, {w2, w1}, {w1, w1}, {w1, 3}};
}

DecoderParams DecoderParams::init(const BackboneSpec& spec, at::Generator& gen) {
  DecoderParams p;
  for (auto [in, out] : layout(spec)) p.convs.push_back(Conv3x3::init(in, out, gen));
  return p;
}

torch::Tensor decode_raw(const torch::Tensor& feature, const DecoderParams& params) {
  if (feature.dim() != 4) {
    throw DimensionError("decode: expected N x C x H x W, got " + c10::str(feature.sizes()));
  }
  if (feature.size(1) != params.in_channels()) {
    throw DimensionError("decode: feature has " + std::to_string(feature.size(1)) +
                         " channels, decoder expects " + std::to_string(params.in_channels()));
  }
  auto x = feature;
  for (size_t i = 0; i < params.convs.size(); ++i) {
    const auto& c = params.convs[i];
    x = torch::conv2d(detail::pad_for_conv3x3(x), c.weight, c.bias);
    if (i + 1 < params.convs.size()) x = torch::relu(x);
    if (upsample_after(i)) {
      x = F::interpolate(x, F::InterpolateFuncOptions()
                                .scale_factor(std::vector<double>{2.0, 2.0})
                                .mode(torch::kNearest));
    }
  }
  return x;
}

torch::Tensor decode(const torch::Tensor& feature, const DecoderParams& params) {
  return decode_raw(feature, params).clamp(0.0, 1.0);
}

Image decode_image(const torch::Tensor& feature, const DecoderParams& params) {
  if (feature.dim() != 4 || feature.size(0) != 1) {
    throw DimensionError("decode_image: expected a single 1 x C x H x W feature");
  }
  return Image::from_tensor(decode(feature, params)[0]);
}

} // namespace aeanet
