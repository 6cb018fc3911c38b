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

#include <benchmark/benchmark.h>
#include <torch/torch.h>

#include "aeanet/aeanet.hpp"

namespace {

using namespace aeanet;

torch::Tensor random_features(int64_t c, int64_t side, uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  return torch::rand({1, c, side, side}, gen);
}

// Feature side 32 is what a 256 px image gives at relu4_1.
void BM_AeaForward(benchmark::State& state) {
  const int64_t side = state.range(0);
  auto gen = at::make_generator<at::CPUGeneratorImpl>(1);
  auto params = AEAParams::init(512, gen);
  auto x = random_features(512, side, 2);
  torch::NoGradGuard g;
  for (auto _ : state) benchmark::DoNotOptimize(aea_forward(x, params));
  state.SetLabel(std::to_string(side * side) + " positions");
}
BENCHMARK(BM_AeaForward)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_HybridAttention(benchmark::State& state) {
  const int64_t side = state.range(0);
  auto gen = at::make_generator<at::CPUGeneratorImpl>(1);
  auto params = HAParams::init(512, gen);
  auto c = random_features(512, side, 2), s = random_features(512, side, 3);
  torch::NoGradGuard g;
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_attention(c, s, params));
}
BENCHMARK(BM_HybridAttention)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DetailWeight(benchmark::State& state) {
  auto x = torch::rand({1 << 20}) * 10 - 5;
  for (auto _ : state) benchmark::DoNotOptimize(detail_weight(x));
  state.SetItemsProcessed(state.iterations() * x.numel());
}
BENCHMARK(BM_DetailWeight)->Unit(benchmark::kMicrosecond);

void BM_Stylize(benchmark::State& state) {
  const int64_t side = state.range(0);
  static const auto weights = synthesize_vgg_weights(BackboneSpec::vgg19(), 0);
  static const auto model = ModelParams::initialize(ModelConfig{}, 1);
  auto content = Image::from_tensor(torch::rand({3, side, side}));
  auto style = Image::from_tensor(torch::rand({3, side, side}));
  for (auto _ : state) benchmark::DoNotOptimize(stylize(content, style, model, weights));
}
BENCHMARK(BM_Stylize)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_Ssim(benchmark::State& state) {
  auto a = Image::from_tensor(torch::rand({3, 512, 512}));
  auto b = Image::from_tensor(torch::rand({3, 512, 512}));
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
