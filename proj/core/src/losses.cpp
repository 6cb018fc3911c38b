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

#include "aeanet/losses.hpp"

#include <cmath>

#include <torch/torch.h>

#include "aeanet/errors.hpp"

namespace aeanet {

namespace {

void check_pair(const torch::Tensor& a, const torch::Tensor& b, Tap tap, const char* who) {
  if (!a.defined() || !b.defined()) {
    throw DimensionError(std::string(who) + ": tap " + std::string(tap_name(tap)) + " missing");
  }
  if (a.sizes() != b.sizes()) {
    throw DimensionError(std::string(who) + ": tap " + std::string(tap_name(tap)) +
                         " shapes differ " + c10::str(a.sizes()) + " vs " + c10::str(b.sizes()));
  }
}

void check_stats_pair(const torch::Tensor& a, const torch::Tensor& b, Tap tap, const char* who) {
  if (!a.defined() || !b.defined()) {
    throw DimensionError(std::string(who) + ": tap " + std::string(tap_name(tap)) + " missing");
  }
  if (a.dim() != 4 || b.dim() != 4 || a.size(0) != b.size(0) || a.size(1) != b.size(1)) {
    throw DimensionError(std::string(who) + ": tap " + std::string(tap_name(tap)) +
                         " batch/channel mismatch " + c10::str(a.sizes()) + " vs " +
                         c10::str(b.sizes()));
  }
}

torch::Tensor stats_distance(const torch::Tensor& a, const torch::Tensor& b) {
  auto sa = feature_stats(a);
  auto sb = feature_stats(b);
  return per_sample_distance(sa.mean, sb.mean) + per_sample_distance(sa.std, sb.std);
}

void check_finite(double v, const char* term) {
  if (!std::isfinite(v)) {
    throw NumericError(term, std::string("non-finite loss term '") + term + "'");
  }
}

} // namespace

void LossWeights::validate() const {
  const std::pair<const char*, double> all[] = {
      {"lambda_c", content},           {"lambda_s", style},
      {"lambda_id1", identity_pixel},  {"lambda_id2", identity_feature},
      {"lambda_cld", ld_content},      {"lambda_sld", ld_style}};
  for (auto [name, v] : all) {
    if (!std::isfinite(v) || v < 0) {
      throw ArgumentError(std::string(name) + " must be finite and >= 0");
    }
  }
}

FeatureStats feature_stats(const torch::Tensor& map) {
  if (map.dim() != 4 || map.size(2) * map.size(3) == 0) {
    throw DimensionError("feature_stats: expected a non-empty N x C x H x W map");
  }
  auto flat = map.flatten(2);
  auto var = flat.var(2, /*unbiased=*/false);
  return {flat.mean(2), torch::sqrt(var + kNormEps)};
}

torch::Tensor per_sample_distance(const torch::Tensor& a, const torch::Tensor& b) {
  auto diff = (a - b).flatten(1);
  return torch::linalg_vector_norm(diff, 2, std::vector<int64_t>{1}, false, std::nullopt);
}

torch::Tensor content_loss(const FeaturePyramid& reference, const FeaturePyramid& stylized,
                           std::span<const Tap> layers) {
  torch::Tensor total;
  for (Tap tap : layers) {
    check_pair(reference[tap], stylized[tap], tap, "content_loss");
    auto d = per_sample_distance(stylized[tap], reference[tap]);
    total = total.defined() ? total + d : d;
  }
  if (!total.defined()) throw ArgumentError("content_loss: empty layer set");
  return total.mean();
}

torch::Tensor style_loss(const FeaturePyramid& style, const FeaturePyramid& stylized,
                         std::span<const Tap> layers) {
  torch::Tensor total;
  for (Tap tap : layers) {
    check_stats_pair(style[tap], stylized[tap], tap, "style_loss");
    auto d = stats_distance(stylized[tap], style[tap]);
    total = total.defined() ? total + d : d;
  }
  if (!total.defined()) throw ArgumentError("style_loss: empty layer set");
  return total.mean();
}

torch::Tensor identity_loss(const IdentityInputs& in, double lambda_pixel, double lambda_feature) {
  if (in.content.sizes() != in.content_recon.sizes() || in.style.sizes() != in.style_recon.sizes()) {
    throw DimensionError("identity_loss: reconstructions must match their inputs");
  }
  auto pixel = per_sample_distance(in.content_recon, in.content) +
               per_sample_distance(in.style_recon, in.style);
  torch::Tensor feature = torch::zeros_like(pixel);
  for (Tap tap : kAllTaps) {
    check_pair(in.content_pyr[tap], in.content_recon_pyr[tap], tap, "identity_loss");
    check_pair(in.style_pyr[tap], in.style_recon_pyr[tap], tap, "identity_loss");
    feature = feature + per_sample_distance(in.content_recon_pyr[tap], in.content_pyr[tap]) +
              per_sample_distance(in.style_recon_pyr[tap], in.style_pyr[tap]);
  }
  return (lambda_pixel * pixel + lambda_feature * feature).mean();
}

torch::Tensor identity_loss(const ModelParams& model, const PretrainedWeights& weights,
                            const torch::Tensor& contents, const torch::Tensor& styles,
                            double lambda_pixel, double lambda_feature) {
  if (lambda_pixel == 0.0 && lambda_feature == 0.0) {
    return torch::zeros({}, contents.options());
  }
  IdentityInputs in;
  in.content = contents;
  in.style = styles;
  in.content_recon = stylize_batch_raw(contents, contents, model, weights);
  in.style_recon = stylize_batch_raw(styles, styles, model, weights);
  in.content_pyr = encode(contents, weights);
  in.style_pyr = encode(styles, weights);
  in.content_recon_pyr = encode(in.content_recon, weights);
  in.style_recon_pyr = encode(in.style_recon, weights);
  return identity_loss(in, lambda_pixel, lambda_feature);
}

torch::Tensor ld_content_loss(const FeaturePyramid& first, const FeaturePyramid& second,
                              std::span<const Tap> layers) {
  return content_loss(first, second, layers);
}

torch::Tensor ld_content_loss(const torch::Tensor& first, const torch::Tensor& second,
                              const PretrainedWeights& weights) {
  if (first.dim() != 4 || first.sizes() != second.sizes()) {
    throw DimensionError("ld_content_loss: batches must share size and resolution");
  }
  return ld_content_loss(encode(first, weights), encode(second, weights));
}

torch::Tensor ld_style_loss(const FeaturePyramid& first, const FeaturePyramid& second,
                            std::span<const Tap> layers) {
  return style_loss(first, second, layers);
}

torch::Tensor ld_style_loss(const torch::Tensor& first, const torch::Tensor& second,
                            const PretrainedWeights& weights) {
  if (first.dim() != 4 || second.dim() != 4 || first.size(0) != second.size(0)) {
    throw DimensionError("ld_style_loss: batch sizes differ");
  }
  return ld_style_loss(encode(first, weights), encode(second, weights));
}

CombinedLoss total_loss(const LossTerms& terms, const LossWeights& weights) {
  weights.validate();
  const std::pair<const char*, const torch::Tensor*> named[] = {
      {"content", &terms.content},       {"style", &terms.style},
      {"identity", &terms.identity},     {"ld_content", &terms.ld_content},
      {"ld_style", &terms.ld_style}};
  for (auto [name, t] : named) {
    if (!t->defined() || t->numel() != 1) {
      throw ArgumentError(std::string("loss term '") + name + "' must be a scalar tensor");
    }
  }
  CombinedLoss out;
  out.breakdown.content = terms.content.item<double>();
  out.breakdown.style = terms.style.item<double>();
  out.breakdown.identity = terms.identity.item<double>();
  out.breakdown.ld_content = terms.ld_content.item<double>();
  out.breakdown.ld_style = terms.ld_style.item<double>();
  check_finite(out.breakdown.content, "content");
  check_finite(out.breakdown.style, "style");
  check_finite(out.breakdown.identity, "identity");
  check_finite(out.breakdown.ld_content, "ld_content");
  check_finite(out.breakdown.ld_style, "ld_style");

  out.total = weights.content * terms.content + weights.style * terms.style + terms.identity +
              weights.ld_content * terms.ld_content + weights.ld_style * terms.ld_style;
  out.breakdown.total = out.total.item<double>();
  check_finite(out.breakdown.total, "total");
  return out;
}

LossBreakdown total_loss(double content, double style, double identity, double ld_content,
                         double ld_style, const LossWeights& weights) {
  weights.validate();
  check_finite(content, "content");
  check_finite(style, "style");
  check_finite(identity, "identity");
  check_finite(ld_content, "ld_content");
  check_finite(ld_style, "ld_style");
  LossBreakdown b{content, style, identity, ld_content, ld_style, 0.0};
  b.total = weights.content * content + weights.style * style + identity +
            weights.ld_content * ld_content + weights.ld_style * ld_style;
  check_finite(b.total, "total");
  return b;
}

} // namespace aeanet
