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

// Shared fixtures for unit and acceptance tests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "aeanet/aeanet.hpp"

namespace aeanet::testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "aeanet") {
    static std::atomic<uint64_t> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// A narrow encoder that keeps the full VGG-19 topology.
inline BackboneSpec tiny_spec() {
  BackboneSpec spec;
  spec.widths = {4, 4, 8, 8, 8};
  return spec;
}

inline ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.backbone = tiny_spec();
  return cfg;
}

/// Smooth random RGB image in [0, 1]; the blur keeps features structured.
inline Image random_image(int64_t h, int64_t w, uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  auto x = torch::rand({1, 3, h, w}, gen);
  x = torch::avg_pool2d(torch::nn::functional::pad(
                            x, torch::nn::functional::PadFuncOptions({1, 1, 1, 1})
                                   .mode(torch::kReplicate)),
                        3, 1);
  return Image::from_tensor(x[0]);
}

/// Write `count` random PNGs named <prefix><i>.png into dir.
inline std::vector<fs::path> write_images(const fs::path& dir, const std::string& prefix,
                                          int count, int64_t h, int64_t w, uint64_t seed) {
  fs::create_directories(dir);
  std::vector<fs::path> out;
  for (int i = 0; i < count; ++i) {
    auto p = dir / (prefix + std::to_string(i) + ".png");
    write_image(random_image(h + 3 * i, w + 5 * i, seed + static_cast<uint64_t>(i)), p);
    out.push_back(p);
  }
  return out;
}

/// Random feature map of the given shape in float64.
inline torch::Tensor random_map(std::vector<int64_t> shape, uint64_t seed, double lo = -1,
                                double hi = 1) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  return torch::rand(shape, gen, torch::kFloat64) * (hi - lo) + lo;
}

inline AEAParams random_aea(int64_t channels, uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  auto p = AEAParams::init(channels, gen);
  for (Conv1x1* c : {&p.q, &p.k, &p.v}) {
    c->weight = c->weight.to(torch::kFloat64);
    c->bias = c->bias.to(torch::kFloat64);
  }
  return p;
}

inline HAParams random_ha(int64_t channels, uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  auto p = HAParams::init(channels, gen);
  for (Conv1x1* c : {&p.cc1, &p.ss1, &p.ss2}) {
    c->weight = c->weight.to(torch::kFloat64);
    c->bias = c->bias.to(torch::kFloat64);
  }
  return p;
}

/// Pyramid of random maps with the given per-tap channel count and side.
inline FeaturePyramid random_pyramid(int64_t n, int64_t channels, int64_t side, uint64_t seed) {
  std::array<torch::Tensor, kNumTaps> taps;
  for (int i = 0; i < kNumTaps; ++i) {
    taps[i] = random_map({n, channels, side, side}, seed * 31 + static_cast<uint64_t>(i), 0, 2);
  }
  return FeaturePyramid(taps);
}

inline bool bitwise_equal(const torch::Tensor& a, const torch::Tensor& b) {
  return a.sizes() == b.sizes() && a.scalar_type() == b.scalar_type() && torch::equal(a, b);
}

} // namespace aeanet::testing
