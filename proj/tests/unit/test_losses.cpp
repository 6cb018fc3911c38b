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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

namespace aeanet {
namespace {

using testing::random_map;
using testing::random_pyramid;
using testing::tiny_config;
using testing::tiny_spec;

// Same pyramid with every tap's positions shuffled by one fixed permutation.
FeaturePyramid shuffle_positions(const FeaturePyramid& p, uint64_t seed) {
  std::array<torch::Tensor, kNumTaps> taps;
  for (int i = 0; i < kNumTaps; ++i) {
    const auto& t = p.taps()[i];
    auto flat = t.flatten(2);
    auto gen = at::make_generator<at::CPUGeneratorImpl>(seed + i);
    auto perm = torch::randperm(flat.size(2), gen);
    taps[i] = flat.index_select(2, perm).view(t.sizes());
  }
  return FeaturePyramid(taps);
}

TEST(FeatureStats, ConstantAndTwoPointMaps) {
  auto s = feature_stats(torch::full({1, 2, 3, 3}, 3.0, torch::kFloat64));
  EXPECT_DOUBLE_EQ(s.mean[0][1].item<double>(), 3.0);
  EXPECT_NEAR(s.std[0][0].item<double>(), std::sqrt(1e-5), 1e-12);

  auto two = torch::tensor({1.0, 3.0}, torch::kFloat64).view({1, 1, 1, 2});
  auto t = feature_stats(two);
  EXPECT_DOUBLE_EQ(t.mean.item<double>(), 2.0);
  EXPECT_NEAR(t.std.item<double>(), 1.0, 1e-5);
}

TEST(FeatureStats, MatchesLoopOracle) {
  auto m = random_map({2, 3, 4, 5}, 1, -2, 2);
  auto s = feature_stats(m);
  for (int64_t n = 0; n < 2; ++n) {
    auto o = oracle::channel_stats(m, n);
    for (int64_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(s.mean[n][c].item<double>(), o.mean[c], 1e-12);
      EXPECT_NEAR(s.std[n][c].item<double>(), o.std[c], 1e-12);
    }
  }
}

TEST(Losses, ContentLossOracleAndSingleEntry) {
  auto a = random_pyramid(2, 3, 2, 1), b = random_pyramid(2, 3, 2, 2);
  EXPECT_NEAR(content_loss(a, b).item<double>(), oracle::content_loss(a, b, kContentLayers), 1e-9);
  EXPECT_EQ(content_loss(a, a).item<double>(), 0.0);

  auto c = random_pyramid(1, 3, 2, 3);
  auto d = FeaturePyramid(c.taps());
  d[Tap::relu4_1] = c[Tap::relu4_1].clone();
  d[Tap::relu4_1][0][1][1][0] += 0.75;
  EXPECT_NEAR(content_loss(c, d).item<double>(), 0.75, 1e-12);
}

TEST(Losses, ContentLossShapeMismatch) {
  auto a = random_pyramid(1, 3, 2, 1), b = random_pyramid(1, 3, 3, 2);
  EXPECT_THROW(content_loss(a, b), DimensionError);
}

TEST(Losses, StyleLossOracleAndInvariances) {
  auto s = random_pyramid(2, 3, 3, 4), cs = random_pyramid(2, 3, 3, 5);
  EXPECT_NEAR(style_loss(s, cs).item<double>(), oracle::style_loss(s, cs, kStyleLayers), 1e-9);
  EXPECT_EQ(style_loss(s, s).item<double>(), 0.0);
  EXPECT_LT(style_loss(s, shuffle_positions(s, 9)).item<double>(), 1e-12);
  EXPECT_LT(ld_style_loss(s, shuffle_positions(s, 3)).item<double>(), 1e-12);

  // Spatial sizes may differ, channel counts may not.
  auto other = random_pyramid(2, 3, 5, 6);
  EXPECT_NO_THROW(style_loss(s, other));
  EXPECT_THROW(style_loss(s, random_pyramid(2, 4, 3, 6)), DimensionError);
}

TEST(Losses, LocalDissimilarityIsMeanOfPerPairLosses) {
  auto a = random_pyramid(2, 3, 2, 11), b = random_pyramid(2, 3, 2, 12);
  double per_pair_c = 0, per_pair_s = 0;
  for (int64_t n = 0; n < 2; ++n) {
    auto idx = torch::tensor({n});
    per_pair_c += content_loss(a.index_batch(idx), b.index_batch(idx)).item<double>();
    per_pair_s += style_loss(a.index_batch(idx), b.index_batch(idx)).item<double>();
  }
  EXPECT_NEAR(ld_content_loss(a, b).item<double>(), per_pair_c / 2, 1e-12);
  EXPECT_NEAR(ld_style_loss(a, b).item<double>(), per_pair_s / 2, 1e-12);
  EXPECT_NEAR(ld_content_loss(a, b).item<double>(), oracle::content_loss(a, b, kContentLayers), 1e-9);
  EXPECT_EQ(ld_content_loss(a, a).item<double>(), 0.0);
  EXPECT_EQ(ld_style_loss(a, a).item<double>(), 0.0);
}

TEST(Losses, LocalDissimilarityOnImages) {
  auto w = synthesize_vgg_weights(tiny_spec(), 1);
  auto x = torch::rand({2, 3, 32, 32});
  EXPECT_EQ(ld_content_loss(x, x, w).item<float>(), 0.0f);
  EXPECT_EQ(ld_style_loss(x, x, w).item<float>(), 0.0f);
  EXPECT_GT(ld_content_loss(x, x.flip(0), w).item<float>(), 0.0f);
  EXPECT_THROW(ld_content_loss(x, x.slice(0, 0, 1), w), DimensionError);
  EXPECT_THROW(ld_style_loss(x, x.slice(0, 0, 1), w), DimensionError);
}

IdentityInputs fabricated_identity(uint64_t seed, bool perfect) {
  IdentityInputs in;
  in.content = random_map({2, 3, 4, 4}, seed, 0, 1);
  in.style = random_map({2, 3, 4, 4}, seed + 1, 0, 1);
  in.content_recon = perfect ? in.content : random_map({2, 3, 4, 4}, seed + 2, 0, 1);
  in.style_recon = perfect ? in.style : random_map({2, 3, 4, 4}, seed + 3, 0, 1);
  in.content_pyr = random_pyramid(2, 2, 2, seed + 4);
  in.style_pyr = random_pyramid(2, 2, 2, seed + 5);
  in.content_recon_pyr = perfect ? in.content_pyr : random_pyramid(2, 2, 2, seed + 6);
  in.style_recon_pyr = perfect ? in.style_pyr : random_pyramid(2, 2, 2, seed + 7);
  return in;
}

TEST(Losses, IdentityLossOracleAndPerfectModel) {
  auto in = fabricated_identity(1, false);
  EXPECT_NEAR(identity_loss(in, 1.0, 50.0).item<double>(), oracle::identity_loss(in, 1.0, 50.0),
              1e-9);
  EXPECT_NEAR(identity_loss(in, 0.3, 0.0).item<double>(), oracle::identity_loss(in, 0.3, 0.0),
              1e-12);
  EXPECT_EQ(identity_loss(fabricated_identity(2, true), 1.0, 50.0).item<double>(), 0.0);
}

TEST(Losses, IdentityLossFromModelEqualsSeparateTerms) {
  auto w = synthesize_vgg_weights(tiny_spec(), 1);
  auto m = ModelParams::initialize(tiny_config(), 2);
  auto c = torch::rand({1, 3, 32, 32});
  auto s = torch::rand({1, 3, 32, 32});
  torch::NoGradGuard g;
  auto got = identity_loss(m, w, c, s, 1.0, 50.0).item<double>();

  auto icc = stylize_batch_raw(c, c, m, w);
  auto iss = stylize_batch_raw(s, s, m, w);
  double pixel = oracle::sample_distance(icc, c, 0) + oracle::sample_distance(iss, s, 0);
  auto pc = encode(c, w), ps = encode(s, w), pcc = encode(icc, w), pss = encode(iss, w);
  double feature = 0;
  for (Tap t : kAllTaps) {
    feature += oracle::sample_distance(pcc[t], pc[t], 0) + oracle::sample_distance(pss[t], ps[t], 0);
  }
  EXPECT_NEAR(got, pixel + 50.0 * feature, 1e-4 * (pixel + 50.0 * feature));
  EXPECT_EQ(identity_loss(m, w, c, s, 0.0, 0.0).item<double>(), 0.0);
}

TEST(Losses, TotalLossWeighting) {
  LossWeights w;
  w.content = 2;
  w.style = 3;
  auto b = total_loss(1, 5, 0, 0, 0, w);
  EXPECT_DOUBLE_EQ(b.total, 17.0);

  LossTerms terms{torch::tensor(1.0), torch::tensor(2.0), torch::tensor(3.0), torch::tensor(4.0),
                  torch::tensor(5.0)};
  auto c = total_loss(terms, LossWeights{});
  // identity is already weighted, so it enters with factor 1.
  EXPECT_NEAR(c.breakdown.total, 1 + 5 * 2 + 3 + 4 + 5, 1e-9);
  EXPECT_DOUBLE_EQ(c.breakdown.style, 2.0);
}

TEST(Losses, NonFiniteTermIsNamed) {
  LossTerms terms{torch::tensor(1.0), torch::tensor(std::nan("")), torch::tensor(0.0),
                  torch::tensor(0.0), torch::tensor(0.0)};
  try {
    total_loss(terms, LossWeights{});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.term(), "style");
  }
  try {
    total_loss(0, 0, 0, std::numeric_limits<double>::infinity(), 0, LossWeights{});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.term(), "ld_content");
  }
}

TEST(Losses, NegativeWeightsAreRejected) {
  LossWeights w;
  w.ld_style = -1;
  EXPECT_THROW(w.validate(), ArgumentError);
}

} // namespace
} // namespace aeanet
