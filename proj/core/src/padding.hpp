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

#include <torch/torch.h>

namespace aeanet::detail {

/// One-pixel border for a 3x3 convolution. Reflection needs at least two
/// samples along each padded axis; 1-pixel maps fall back to replication.
inline torch::Tensor pad_for_conv3x3(const torch::Tensor& x) {
  namespace F = torch::nn::functional;
  if (x.size(-1) >= 2 && x.size(-2) >= 2) {
    return F::pad(x, F::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReflect));
  }
  return F::pad(x, F::PadFuncOptions({1, 1, 1, 1}).mode(torch::kReplicate));
}

} // namespace aeanet::detail
