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

#include <vector>

#include <ATen/core/Generator.h>
#include <torch/types.h>

#include "aeanet/image.hpp"
#include "aeanet/vgg_backbone.hpp"

namespace aeanet {

/// 3x3 convolution of the decoder (out x in x 3 x 3 kernel).
struct Conv3x3 {
  torch::Tensor weight;
  torch::Tensor bias;
  static Conv3x3 init(int64_t in, int64_t out, at::Generator& gen);
};

/// Mirror of the encoder from relu4_1 back to RGB: nine convolutions with
/// nearest-neighbour 2x upsampling after conv_1, conv_5 and conv_7, ReLU
/// after every conv except the last.
struct DecoderParams {
  std::vector<Conv3x3> convs;

  static DecoderParams init(const BackboneSpec& spec, at::Generator& gen);
  /// Channel layout (in, out) of each conv for `spec`.
  static std::vector<std::pair<int64_t, int64_t>> layout(const BackboneSpec& spec);
  int64_t in_channels() const { return convs.front().weight.size(1); }
};

/// Decoder output before clamping; N x 3 x 8H x 8W. Used by training.
torch::Tensor decode_raw(const torch::Tensor& feature, const DecoderParams& params);

/// decode_raw clamped to [0, 1].
torch::Tensor decode(const torch::Tensor& feature, const DecoderParams& params);

/// Decodes a single 1 x C x H x W feature into an Image.
Image decode_image(const torch::Tensor& feature, const DecoderParams& params);

} // namespace aeanet
