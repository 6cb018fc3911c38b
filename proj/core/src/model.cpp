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

#include "aeanet/model.hpp"

#include <functional>

#include <torch/torch.h>

#include "aeanet/errors.hpp"

namespace aeanet {

namespace F = torch::nn::functional;

namespace {

// Visits every parameter slot in schema order.
template <typename Model, typename Fn>
void visit_slots(Model& m, Fn&& fn) {
  auto conv = [&](const std::string& prefix, auto& c) {
    fn(prefix + ".weight", c.weight);
    fn(prefix + ".bias", c.bias);
  };
  conv("caea.q", m.caea.q);
  conv("caea.k", m.caea.k);
  conv("caea.v", m.caea.v);
  conv("saea.q", m.saea.q);
  conv("saea.k", m.saea.k);
  conv("saea.v", m.saea.v);
  conv("ha.cc1", m.ha.cc1);
  conv("ha.ss1", m.ha.ss1);
  conv("ha.ss2", m.ha.ss2);
  for (size_t i = 0; i < m.decoder.convs.size(); ++i) {
    conv("decoder.conv_" + std::to_string(i + 1), m.decoder.convs[i]);
  }
}

} // namespace

ModelParams ModelParams::initialize(const ModelConfig& config, uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  ModelParams m;
  m.config = config;
  const int64_t c = config.channels();
  m.caea = AEAParams::init(c, gen);
  m.saea = AEAParams::init(c, gen);
  m.ha = HAParams::init(c, gen);
  m.decoder = DecoderParams::init(config.backbone, gen);
  return m;
}

std::vector<std::pair<std::string, torch::Tensor>> ModelParams::named_parameters() const {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  visit_slots(*this, [&](const std::string& name, const torch::Tensor& t) {
    out.emplace_back(name, t);
  });
  return out;
}

std::vector<torch::Tensor> ModelParams::parameters() const {
  std::vector<torch::Tensor> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

TensorMap ModelParams::state_dict() const {
  TensorMap out;
  for (auto& [name, t] : named_parameters()) out[name] = t.detach();
  return out;
}

std::vector<std::pair<std::string, std::vector<int64_t>>> ModelParams::schema(
    const ModelConfig& config) {
  std::vector<std::pair<std::string, std::vector<int64_t>>> out;
  const int64_t c = config.channels();
  for (const char* block : {"caea.q", "caea.k", "caea.v", "saea.q", "saea.k", "saea.v", "ha.cc1",
                            "ha.ss1", "ha.ss2"}) {
    out.push_back({std::string(block) + ".weight", {c, c, 1, 1}});
    out.push_back({std::string(block) + ".bias", {c}});
  }
  auto layout = DecoderParams::layout(config.backbone);
  for (size_t i = 0; i < layout.size(); ++i) {
    auto [in, o] = layout[i];
    auto prefix = "decoder.conv_" + std::to_string(i + 1);
    out.push_back({prefix + ".weight", {o, in, 3, 3}});
    out.push_back({prefix + ".bias", {o}});
  }
  return out;
}

ModelParams ModelParams::from_state_dict(const TensorMap& tensors, const ModelConfig& config) {
  // Validate everything before touching any state.
  for (const auto& [name, shape] : schema(config)) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw SchemaError("model entry " + name + " absent");
    if (it->second.sizes() != at::IntArrayRef(shape)) {
      throw SchemaError("model entry " + name + " shape mismatch: expected " + c10::str(shape) +
                        ", got " + c10::str(it->second.sizes()));
    }
    if (!it->second.is_floating_point()) {
      throw SchemaError("model entry " + name + " is not floating point");
    }
  }
  ModelParams m;
  m.config = config;
  m.decoder.convs.resize(DecoderParams::layout(config.backbone).size());
  visit_slots(m, [&](const std::string& name, torch::Tensor& slot) {
    slot = tensors.at(name).detach().clone();
  });
  return m;
}

ModelParams ModelParams::clone() const {
  ModelParams m = *this;
  visit_slots(m, [](const std::string&, torch::Tensor& t) {
    bool rg = t.requires_grad();
    t = t.detach().clone().set_requires_grad(rg);
  });
  return m;
}

ModelParams ModelParams::to(torch::ScalarType dtype) const {
  ModelParams m = *this;
  visit_slots(m, [&](const std::string&, torch::Tensor& t) { t = t.detach().to(dtype).clone(); });
  return m;
}

void ModelParams::set_requires_grad(bool on) {
  visit_slots(*this, [&](const std::string&, torch::Tensor& t) { t.set_requires_grad(on); });
}

torch::Tensor pad_to_multiple(const torch::Tensor& images, int64_t multiple) {
  const int64_t h = images.size(-2);
  const int64_t w = images.size(-1);
  const int64_t ph = (multiple - h % multiple) % multiple;
  const int64_t pw = (multiple - w % multiple) % multiple;
  if (ph == 0 && pw == 0) return images;
  if (ph < h && pw < w) {
    return F::pad(images, F::PadFuncOptions({0, pw, 0, ph}).mode(torch::kReflect));
  }
  return F::pad(images, F::PadFuncOptions({0, pw, 0, ph}).mode(torch::kReplicate));
}

torch::Tensor stylized_feature(const torch::Tensor& content_feature,
                               const torch::Tensor& style_feature, const ModelParams& model) {
  auto fcc = aea_forward(content_feature, model.caea);
  auto fss = aea_forward(style_feature, model.saea);
  return hybrid_attention(fcc, fss, model.ha, model.config.hybrid);
}

torch::Tensor blend_features(const torch::Tensor& content_feature, const torch::Tensor& stylized,
                             double alpha) {
  check_alpha(alpha);
  return alpha * stylized + (1.0 - alpha) * content_feature;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ArgumentError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

torch::Tensor pre_decoder_feature(const torch::Tensor& contents, const torch::Tensor& styles,
                                  const ModelParams& model, const PretrainedWeights& weights,
                                  double alpha) {
  check_alpha(alpha);
  if (weights.spec() != model.config.backbone) {
    throw DimensionError("model was built for a different encoder width configuration");
  }
  auto fc = encode_to(contents, Tap::relu4_1, weights);
  auto fs = encode_to(styles, Tap::relu4_1, weights);
  return blend_features(fc, stylized_feature(fc, fs, model), alpha);
}

torch::Tensor stylize_batch_raw(const torch::Tensor& contents, const torch::Tensor& styles,
                                const ModelParams& model, const PretrainedWeights& weights,
                                double alpha) {
  check_alpha(alpha);
  if (contents.dim() != 4 || styles.dim() != 4) {
    throw DimensionError("stylize: expected N x 3 x H x W batches");
  }
  const int64_t h = contents.size(2);
  const int64_t w = contents.size(3);
  auto padded = pad_to_multiple(contents, 8);
  auto feature = pre_decoder_feature(padded, styles, model, weights, alpha);
  return decode_raw(feature, model.decoder).slice(2, 0, h).slice(3, 0, w);
}

torch::Tensor stylize_batch(const torch::Tensor& contents, const torch::Tensor& styles,
                            const ModelParams& model, const PretrainedWeights& weights,
                            double alpha) {
  return stylize_batch_raw(contents, styles, model, weights, alpha).clamp(0.0, 1.0);
}

Image stylize(const Image& content, const Image& style, const ModelParams& model,
              const PretrainedWeights& weights, double alpha) {
  check_alpha(alpha);
  torch::NoGradGuard no_grad;
  auto out = stylize_batch(content.batch(), style.batch(), model, weights, alpha);
  return Image::from_tensor(out[0]);
}

} // namespace aeanet
