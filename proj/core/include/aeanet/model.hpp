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

#include <string>
#include <utility>
#include <vector>

#include <torch/types.h>

#include "aeanet/attention.hpp"
#include "aeanet/decoder.hpp"
#include "aeanet/image.hpp"
#include "aeanet/tensor_io.hpp"
#include "aeanet/vgg_backbone.hpp"

namespace aeanet {

struct ModelConfig {
  /// Encoder widths the model is built against; attention runs at relu4_1.
  BackboneSpec backbone;
  HybridOptions hybrid;

  int64_t channels() const { return backbone.width(Tap::relu4_1); }
};

/// Every trainable parameter: CAEA, SAEA, HA and decoder. The encoder is not
/// part of the model.
///
/// Parameter names (the checkpoint schema):
///   caea.{q,k,v}.{weight,bias}      C x C x 1 x 1 / C
///   saea.{q,k,v}.{weight,bias}
///   ha.{cc1,ss1,ss2}.{weight,bias}
///   decoder.conv_{1..9}.{weight,bias}  out x in x 3 x 3 / out
struct ModelParams {
  ModelConfig config;
  AEAParams caea;
  AEAParams saea;
  HAParams ha;
  DecoderParams decoder;

  static ModelParams initialize(const ModelConfig& config, uint64_t seed);

  /// Tensors in schema order. Returned handles alias the parameters.
  std::vector<std::pair<std::string, torch::Tensor>> named_parameters() const;
  std::vector<torch::Tensor> parameters() const;
  TensorMap state_dict() const;

  /// Expected shape of every entry for this config.
  static std::vector<std::pair<std::string, std::vector<int64_t>>> schema(const ModelConfig& config);

  /// Builds parameters from a tensor map, validating names and shapes against
  /// `config`. Throws SchemaError naming the first bad entry.
  static ModelParams from_state_dict(const TensorMap& tensors, const ModelConfig& config);

  /// Deep copy with fresh storage (gradients not copied).
  ModelParams clone() const;
  /// Copy converted to another floating dtype.
  ModelParams to(torch::ScalarType dtype) const;
  void set_requires_grad(bool on);
};

/// Reflection-pads height and width up to the next multiple of `multiple`.
torch::Tensor pad_to_multiple(const torch::Tensor& images, int64_t multiple);

/// HA(CAEA(F_c), SAEA(F_s)) on relu4_1 features.
torch::Tensor stylized_feature(const torch::Tensor& content_feature,
                               const torch::Tensor& style_feature, const ModelParams& model);

/// alpha * F_cs + (1 - alpha) * F_c.
torch::Tensor blend_features(const torch::Tensor& content_feature,
                             const torch::Tensor& stylized, double alpha);

/// Throws ArgumentError unless 0 <= alpha <= 1.
void check_alpha(double alpha);

/// The feature handed to the decoder for a content/style batch pair.
/// `contents` must already be a multiple of 8 in height and width.
torch::Tensor pre_decoder_feature(const torch::Tensor& contents, const torch::Tensor& styles,
                                  const ModelParams& model, const PretrainedWeights& weights,
                                  double alpha);

/// Full pipeline on batches: pads the contents to a multiple of 8, encodes,
/// attends, blends with `alpha`, decodes, and crops back to the content size.
/// Output is clamped to [0, 1].
torch::Tensor stylize_batch(const torch::Tensor& contents, const torch::Tensor& styles,
                            const ModelParams& model, const PretrainedWeights& weights,
                            double alpha = 1.0);

/// stylize_batch without the final clamp; the training objective uses this so
/// out-of-range pixels still receive gradients.
torch::Tensor stylize_batch_raw(const torch::Tensor& contents, const torch::Tensor& styles,
                                const ModelParams& model, const PretrainedWeights& weights,
                                double alpha = 1.0);

/// Single-pair stylization; output has the content image's resolution.
/// Runs without autograd.
Image stylize(const Image& content, const Image& style, const ModelParams& model,
              const PretrainedWeights& weights, double alpha = 1.0);

} // namespace aeanet
