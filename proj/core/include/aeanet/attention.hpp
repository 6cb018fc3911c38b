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

#include <cstdint>

#include <ATen/core/Generator.h>
#include <torch/types.h>

namespace aeanet {

/// Added inside the square root of the detail weight so its derivative stays
/// finite where ReLU(x - x^2) is zero. The shift sqrt(eps) is subtracted again,
/// so M is exactly 0 wherever ReLU(x - x^2) is.
inline constexpr double kDetailSqrtEps = 1e-12;
/// Variance guard of mean-variance normalization.
inline constexpr double kNormEps = 1e-5;

/// A learnable 1x1 convolution, stored in conv layout (out x in x 1 x 1).
struct Conv1x1 {
  torch::Tensor weight;
  torch::Tensor bias;

  /// Fan-in scaled uniform init, bound 1/sqrt(in).
  static Conv1x1 init(int64_t in, int64_t out, at::Generator& gen);

  int64_t in_channels() const { return weight.size(1); }
  int64_t out_channels() const { return weight.size(0); }

  /// Applies the convolution to an N x P x C_in flattened feature.
  torch::Tensor apply(const torch::Tensor& flat) const;
};

/// Query/key/value generators of one affinity-enhanced attention block.
/// The content (CAEA) and style (SAEA) blocks share this layout but not
/// their values.
struct AEAParams {
  Conv1x1 q, k, v;
  static AEAParams init(int64_t channels, at::Generator& gen);
  int64_t channels() const { return q.in_channels(); }
};

/// 1x1 convolutions of the hybrid (content-to-style) attention.
struct HAParams {
  Conv1x1 cc1, ss1, ss2;
  static HAParams init(int64_t channels, at::Generator& gen);
  int64_t channels() const { return cc1.in_channels(); }
};

/// N x C x H x W  ->  N x P x C with P = H*W (row-major positions).
torch::Tensor flatten_positions(const torch::Tensor& map);
/// Inverse of flatten_positions.
torch::Tensor unflatten_positions(const torch::Tensor& flat, int64_t height, int64_t width);

/// Row-wise softmax of Q K^T over key positions (no 1/sqrt(d) scaling).
/// Q: N x Pq x C, K: N x Pk x C. Returns N x Pq x Pk.
torch::Tensor attention_scores(const torch::Tensor& q, const torch::Tensor& k);

/// Softmax(Q K^T) V for N x P x C operands.
torch::Tensor softmax_attention(const torch::Tensor& q, const torch::Tensor& k,
                                const torch::Tensor& v);

/// Per-channel standardization over positions of an N x P x C feature.
torch::Tensor mean_variance_norm(const torch::Tensor& flat);

struct AffinityMap {
  torch::Tensor affinity;      // F_aff, N x P x C
  torch::Tensor value;         // flattened F_cv, N x P x C
  torch::Tensor cross_scores;  // Softmax(F_cq^T F_ck), N x P x P
  torch::Tensor self_scores;   // Softmax(F_cq^T F_cq), N x P x P
  int64_t height = 0;
  int64_t width = 0;
};

/// Affinity attention of one feature map:
///   A     = Softmax(q k^T) v
///   F_aff = Softmax(q q^T) A
/// with q, k, v the three 1x1 projections of `map` (N x C x H x W).
AffinityMap affinity_map(const torch::Tensor& map, const AEAParams& params);

/// M = sqrt(ReLU(F_aff - F_aff^2) + eps) - sqrt(eps). Entries lie in [0, 0.5].
torch::Tensor detail_weight(const torch::Tensor& affinity);

/// M * Norm(F_v) + F_aff, reshaped to N x C x height x width.
torch::Tensor detail_enhance(const torch::Tensor& affinity, const torch::Tensor& value,
                             int64_t height, int64_t width);

/// detail_enhance(affinity_map(map)). Output shape equals input shape.
torch::Tensor aea_forward(const torch::Tensor& map, const AEAParams& params);

struct HybridOptions {
  /// Standardize F_ss before the value projection ss2. Off by default.
  bool normalize_value = false;
};

/// Softmax over style positions of conv_cc1(Norm(F_cc)) conv_ss1(Norm(F_ss))^T,
/// shape N x P_c x P_s.
torch::Tensor hybrid_scores(const torch::Tensor& content, const torch::Tensor& style,
                            const HAParams& params);

/// Redistributes the projected style values over content positions and adds
/// the content feature back. Output has the content feature's shape.
torch::Tensor hybrid_attention(const torch::Tensor& content, const torch::Tensor& style,
                               const HAParams& params, const HybridOptions& options = {});

} // namespace aeanet
