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

#include <span>
#include <string>
#include <vector>

#include <torch/types.h>

#include "aeanet/model.hpp"
#include "aeanet/vgg_backbone.hpp"

namespace aeanet {

/// Default layer sets.
inline constexpr std::array<Tap, 2> kContentLayers = {Tap::relu4_1, Tap::relu5_1};
inline constexpr std::array<Tap, 5> kStyleLayers = kAllTaps;

/// Weights of the training objective. The identity weights are applied inside
/// identity_loss; the combined objective adds the identity term unscaled.
struct LossWeights {
  double content = 1.0;
  double style = 5.0;
  double identity_pixel = 1.0;     // lambda_id1
  double identity_feature = 50.0;  // lambda_id2
  double ld_content = 1.0;
  double ld_style = 1.0;

  /// Throws ArgumentError naming the first negative or non-finite weight.
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

/// Per-channel mean and standard deviation over spatial positions.
struct FeatureStats {
  torch::Tensor mean;  // N x C
  torch::Tensor std;   // N x C, sqrt(population variance + kNormEps)
};

FeatureStats feature_stats(const torch::Tensor& map);

/// Per-sample Euclidean distance between two equally shaped batches,
/// flattened over everything but the batch axis. Returns N values.
torch::Tensor per_sample_distance(const torch::Tensor& a, const torch::Tensor& b);

/// Sum over `layers` of ||phi_i(a) - phi_i(b)||, averaged over the batch.
torch::Tensor content_loss(const FeaturePyramid& reference, const FeaturePyramid& stylized,
                           std::span<const Tap> layers = kContentLayers);

/// Sum over `layers` of ||mu_i(cs) - mu_i(s)|| + ||sigma_i(cs) - sigma_i(s)||,
/// averaged over the batch. Spatial sizes of the two pyramids may differ.
torch::Tensor style_loss(const FeaturePyramid& style, const FeaturePyramid& stylized,
                         std::span<const Tap> layers = kStyleLayers);

/// Identity term from already-computed reconstructions and pyramids:
///   id1 * (||I_cc - I_c|| + ||I_ss - I_s||)
/// + id2 * sum_i (||phi_i(I_cc) - phi_i(I_c)|| + ||phi_i(I_ss) - phi_i(I_s)||)
struct IdentityInputs {
  torch::Tensor content, style;            // I_c, I_s
  torch::Tensor content_recon, style_recon;  // I_cc, I_ss
  FeaturePyramid content_pyr, style_pyr, content_recon_pyr, style_recon_pyr;
};
torch::Tensor identity_loss(const IdentityInputs& in, double lambda_pixel, double lambda_feature);

/// Identity term computed end to end: I_cc = stylize(I_c, I_c), I_ss =
/// stylize(I_s, I_s) at alpha 1 with the unclamped decoder output.
torch::Tensor identity_loss(const ModelParams& model, const PretrainedWeights& weights,
                            const torch::Tensor& contents, const torch::Tensor& styles,
                            double lambda_pixel, double lambda_feature);

/// Consistency of two stylizations that share a content image.
torch::Tensor ld_content_loss(const FeaturePyramid& first, const FeaturePyramid& second,
                              std::span<const Tap> layers = kContentLayers);
torch::Tensor ld_content_loss(const torch::Tensor& first, const torch::Tensor& second,
                              const PretrainedWeights& weights);

/// Consistency of the feature statistics of two stylizations sharing a style.
torch::Tensor ld_style_loss(const FeaturePyramid& first, const FeaturePyramid& second,
                            std::span<const Tap> layers = kStyleLayers);
torch::Tensor ld_style_loss(const torch::Tensor& first, const torch::Tensor& second,
                            const PretrainedWeights& weights);

/// The five raw terms of the objective.
struct LossTerms {
  torch::Tensor content, style, identity, ld_content, ld_style;
};

struct LossBreakdown {
  double content = 0, style = 0, identity = 0, ld_content = 0, ld_style = 0, total = 0;
};

struct CombinedLoss {
  torch::Tensor total;  // differentiable
  LossBreakdown breakdown;
};

/// Weighted sum of the terms. Throws NumericError naming the first
/// non-finite term ("content", "style", "identity", "ld_content",
/// "ld_style") or "total".
CombinedLoss total_loss(const LossTerms& terms, const LossWeights& weights);

/// Scalar form of total_loss.
LossBreakdown total_loss(double content, double style, double identity, double ld_content,
                         double ld_style, const LossWeights& weights);

} // namespace aeanet
