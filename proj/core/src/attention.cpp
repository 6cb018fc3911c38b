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

#include "aeanet/attention.hpp"

#include <cmath>

#include <torch/torch.h>

#include "aeanet/errors.hpp"

namespace aeanet {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

void check_map(const torch::Tensor& map, int64_t channels, const char* who) {
  require(map.dim() == 4, std::string(who) + ": expected N x C x H x W, got " +
                              c10::str(map.sizes()));
  require(map.size(1) == channels, std::string(who) + ": feature has " +
                                       std::to_string(map.size(1)) + " channels, parameters expect " +
                                       std::to_string(channels));
}

void check_flat(const torch::Tensor& t, const char* who) {
  require(t.dim() == 3, std::string(who) + ": expected N x P x C, got " + c10::str(t.sizes()));
}

} // namespace

Conv1x1 Conv1x1::init(int64_t in, int64_t out, at::Generator& gen) {
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  return {torch::rand({out, in, 1, 1}, gen) * (2 * bound) - bound,
          torch::rand({out}, gen) * (2 * bound) - bound};
}

torch::Tensor Conv1x1::apply(const torch::Tensor& flat) const {
  check_flat(flat, "conv1x1");
  require(flat.size(2) == in_channels(), "conv1x1: input has " + std::to_string(flat.size(2)) +
                                             " channels, expected " + std::to_string(in_channels()));
  auto w = weight.view({out_channels(), in_channels()});
  return torch::matmul(flat, w.t()) + bias;
}

AEAParams AEAParams::init(int64_t channels, at::Generator& gen) {
  auto q = Conv1x1::init(channels, channels, gen);
  auto k = Conv1x1::init(channels, channels, gen);
  auto v = Conv1x1::init(channels, channels, gen);
  return {std::move(q), std::move(k), std::move(v)};
}

HAParams HAParams::init(int64_t channels, at::Generator& gen) {
  auto cc1 = Conv1x1::init(channels, channels, gen);
  auto ss1 = Conv1x1::init(channels, channels, gen);
  auto ss2 = Conv1x1::init(channels, channels, gen);
  return {std::move(cc1), std::move(ss1), std::move(ss2)};
}

torch::Tensor flatten_positions(const torch::Tensor& map) {
  require(map.dim() == 4, "flatten_positions: expected N x C x H x W, got " + c10::str(map.sizes()));
  return map.flatten(2).transpose(1, 2);
}

torch::Tensor unflatten_positions(const torch::Tensor& flat, int64_t height, int64_t width) {
  check_flat(flat, "unflatten_positions");
  require(flat.size(1) == height * width, "unflatten_positions: " + std::to_string(flat.size(1)) +
                                              " positions cannot form " + std::to_string(height) +
                                              "x" + std::to_string(width));
  return flat.transpose(1, 2).reshape({flat.size(0), flat.size(2), height, width});
}

torch::Tensor attention_scores(const torch::Tensor& q, const torch::Tensor& k) {
  check_flat(q, "attention");
  check_flat(k, "attention");
  require(q.size(0) == k.size(0), "attention: batch sizes differ");
  require(q.size(2) == k.size(2), "attention: query has " + std::to_string(q.size(2)) +
                                      " channels, key has " + std::to_string(k.size(2)));
  return torch::softmax(torch::matmul(q, k.transpose(1, 2)), -1);
}

torch::Tensor softmax_attention(const torch::Tensor& q, const torch::Tensor& k,
                                const torch::Tensor& v) {
  check_flat(v, "attention");
  require(k.size(1) == v.size(1), "attention: key has " + std::to_string(k.size(1)) +
                                      " positions, value has " + std::to_string(v.size(1)));
  require(q.dim() == 3 && q.size(2) == v.size(2),
          "attention: query and value channel counts differ");
  return torch::matmul(attention_scores(q, k), v);
}

torch::Tensor mean_variance_norm(const torch::Tensor& flat) {
  check_flat(flat, "mean_variance_norm");
  auto mean = flat.mean(1, /*keepdim=*/true);
  auto var = flat.var(1, /*unbiased=*/false, /*keepdim=*/true);
  return (flat - mean) / torch::sqrt(var + kNormEps);
}

AffinityMap affinity_map(const torch::Tensor& map, const AEAParams& params) {
  check_map(map, params.channels(), "affinity_map");
  auto flat = flatten_positions(map);
  auto q = params.q.apply(flat);
  auto k = params.k.apply(flat);
  auto v = params.v.apply(flat);

  AffinityMap out;
  out.cross_scores = attention_scores(q, k);
  auto attended = torch::matmul(out.cross_scores, v);
  out.self_scores = attention_scores(q, q);
  out.affinity = torch::matmul(out.self_scores, attended);
  out.value = v;
  out.height = map.size(2);
  out.width = map.size(3);
  return out;
}

torch::Tensor detail_weight(const torch::Tensor& affinity) {
  static const double shift = std::sqrt(kDetailSqrtEps);
  return torch::sqrt(torch::relu(affinity - affinity * affinity) + kDetailSqrtEps) - shift;
}

torch::Tensor detail_enhance(const torch::Tensor& affinity, const torch::Tensor& value,
                             int64_t height, int64_t width) {
  check_flat(affinity, "detail_enhance");
  require(affinity.sizes() == value.sizes(), "detail_enhance: affinity " +
                                                 c10::str(affinity.sizes()) + " vs value " +
                                                 c10::str(value.sizes()));
  auto enhanced = detail_weight(affinity) * mean_variance_norm(value) + affinity;
  return unflatten_positions(enhanced, height, width);
}

torch::Tensor aea_forward(const torch::Tensor& map, const AEAParams& params) {
  auto a = affinity_map(map, params);
  return detail_enhance(a.affinity, a.value, a.height, a.width);
}

torch::Tensor hybrid_scores(const torch::Tensor& content, const torch::Tensor& style,
                            const HAParams& params) {
  check_map(content, params.channels(), "hybrid_attention(content)");
  check_map(style, params.channels(), "hybrid_attention(style)");
  require(content.size(0) == style.size(0), "hybrid_attention: batch sizes differ");
  auto cc1 = params.cc1.apply(mean_variance_norm(flatten_positions(content)));
  auto ss1 = params.ss1.apply(mean_variance_norm(flatten_positions(style)));
  return attention_scores(cc1, ss1);
}

torch::Tensor hybrid_attention(const torch::Tensor& content, const torch::Tensor& style,
                               const HAParams& params, const HybridOptions& options) {
  auto scores = hybrid_scores(content, style, params);
  auto style_flat = flatten_positions(style);
  auto ss2 = params.ss2.apply(options.normalize_value ? mean_variance_norm(style_flat) : style_flat);
  auto mixed = torch::matmul(scores, ss2) + flatten_positions(content);
  return unflatten_positions(mixed, content.size(2), content.size(3));
}

} // namespace aeanet
