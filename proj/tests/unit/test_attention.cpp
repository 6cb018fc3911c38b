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

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

namespace aeanet {
namespace {

using testing::random_aea;
using testing::random_ha;
using testing::random_map;

Conv1x1 identity_conv(int64_t c) {
  return {torch::eye(c, torch::kFloat64).view({c, c, 1, 1}), torch::zeros({c}, torch::kFloat64)};
}

TEST(Attention, FlattenIsRowMajorOverPositions) {
  auto m = torch::arange(12, torch::kFloat64).view({1, 2, 2, 3});
  auto flat = flatten_positions(m);
  EXPECT_EQ(flat.sizes(), (c10::IntArrayRef{1, 6, 2}));
  EXPECT_EQ(flat[0][4][1].item<double>(), m[0][1][1][1].item<double>());
  EXPECT_TRUE(torch::equal(unflatten_positions(flat, 2, 3), m));
}

TEST(Attention, OneHotSoftmaxProductMatchesHandValues) {
  auto eye = torch::eye(2, torch::kFloat64).unsqueeze(0);
  auto out = softmax_attention(eye, eye, eye);
  const double e = std::exp(1.0), hi = e / (e + 1), lo = 1 / (e + 1);
  EXPECT_NEAR(out[0][0][0].item<double>(), hi, 1e-12);
  EXPECT_NEAR(out[0][0][1].item<double>(), lo, 1e-12);
  EXPECT_NEAR(out[0][1][0].item<double>(), lo, 1e-12);
  EXPECT_NEAR(out[0][1][1].item<double>(), hi, 1e-12);
}

TEST(Attention, ScoreRowsSumToOneAtEverySite) {
  for (int64_t side : {1, 3, 8}) {
    auto x = random_map({2, 5, side, side}, 10 + side, -3, 3);
    auto y = random_map({2, 5, side + 1, side}, 20 + side, -3, 3);
    auto a = affinity_map(x, random_aea(5, 1));
    auto h = hybrid_scores(x, y, random_ha(5, 2));
    for (const auto& s : {a.cross_scores, a.self_scores, h}) {
      auto err = (s.sum(-1) - 1).abs().max().item<double>();
      EXPECT_LT(err, 1e-12);
      EXPECT_GE(s.min().item<double>(), 0.0);
    }
  }
}

TEST(Attention, TwoPositionIdentityConvsMatchExplicitChain) {
  AEAParams p{identity_conv(1), identity_conv(1), identity_conv(1)};
  const double a = 0.7, b = -0.4;
  auto m = torch::tensor({a, b}, torch::kFloat64).view({1, 1, 1, 2});
  auto out = affinity_map(m, p);

  // Row i of softmax(x x^T): weights exp(x_i x_j) normalised over j.
  auto row = [](double xi, double a, double b) {
    double ea = std::exp(xi * a), eb = std::exp(xi * b);
    return std::pair{ea / (ea + eb), eb / (ea + eb)};
  };
  auto [s00, s01] = row(a, a, b);
  auto [s10, s11] = row(b, a, b);
  double A0 = s00 * a + s01 * b, A1 = s10 * a + s11 * b;
  double F0 = s00 * A0 + s01 * A1, F1 = s10 * A0 + s11 * A1;
  EXPECT_NEAR(out.affinity[0][0][0].item<double>(), F0, 1e-12);
  EXPECT_NEAR(out.affinity[0][1][0].item<double>(), F1, 1e-12);
}

TEST(Attention, AffinityMapMatchesScalarOracle) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const int64_t c = 1 + seed % 3, h = 1 + seed % 2, w = 2;
    auto m = random_map({2, c, h, w}, seed, -2, 2);
    auto p = random_aea(c, seed + 100);
    auto got = affinity_map(m, p);
    for (int64_t n = 0; n < 2; ++n) {
      auto want = oracle::affinity_map(m, n, p);
      EXPECT_LT(oracle::max_abs_diff(want.affinity, got.affinity, n), 1e-9);
      EXPECT_LT(oracle::max_abs_diff(want.value, got.value, n), 1e-12);
    }
  }
}

TEST(Attention, DetailWeightValues) {
  auto x = torch::tensor({0.0, 1.0, 2.0, -1.0, 0.5, 0.25}, torch::kFloat64);
  auto m = detail_weight(x);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(m[i].item<double>(), 0.0) << i;
  EXPECT_NEAR(m[4].item<double>(), 0.5, 1e-6);
  EXPECT_NEAR(m[5].item<double>(), std::sqrt(0.1875), 1e-6);

  auto f = torch::tensor({0.0f, 1.0f, 2.0f});
  EXPECT_EQ(detail_weight(f).abs().max().item<float>(), 0.0f);

  auto r = random_map({10000}, 7, -5, 5);
  auto mr = detail_weight(r);
  EXPECT_GE(mr.min().item<double>(), 0.0);
  EXPECT_LE(mr.max().item<double>(), 0.5 + 1e-6);
}

TEST(Attention, DetailWeightGradientIsFiniteAtTheKinks) {
  auto x = torch::tensor({0.0, 1.0, 0.5, 3.0}, torch::kFloat64).requires_grad_();
  detail_weight(x).sum().backward();
  EXPECT_TRUE(torch::isfinite(x.grad()).all().item<bool>());
}

TEST(Attention, DetailEnhanceMatchesScalarOracle) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto aff = random_map({2, 4, 3}, seed, -0.5, 1.5);
    auto val = random_map({2, 4, 3}, seed + 50, -2, 2);
    auto got = detail_enhance(aff, val, 2, 2);
    for (int64_t n = 0; n < 2; ++n) {
      oracle::Mat a = oracle::zeros(4, 3), v = oracle::zeros(4, 3);
      for (int p = 0; p < 4; ++p)
        for (int c = 0; c < 3; ++c) {
          a[p][c] = aff[n][p][c].item<double>();
          v[p][c] = val[n][p][c].item<double>();
        }
      EXPECT_LT(oracle::max_abs_diff(oracle::detail_enhance(a, v), got, n), 1e-12);
    }
  }
}

TEST(Attention, AeaForwardMatchesScalarOracle) {
  auto m = random_map({1, 3, 2, 2}, 9, -1, 1);
  auto p = random_aea(3, 3);
  EXPECT_LT(oracle::max_abs_diff(oracle::aea_forward(m, 0, p), aea_forward(m, p), 0), 1e-9);
}

TEST(Attention, SinglePositionAeaReturnsValue) {
  // One position: both softmaxes are 1 and the normalised value is 0.
  auto m = random_map({1, 3, 1, 1}, 4);
  auto p = random_aea(3, 5);
  auto v = p.v.apply(flatten_positions(m));
  EXPECT_LT((flatten_positions(aea_forward(m, p)) - v).abs().max().item<double>(), 1e-12);
}

TEST(Attention, HybridMatchesScalarOracle) {
  for (bool normalize : {false, true}) {
    for (uint64_t seed = 0; seed < 4; ++seed) {
      const int64_t c = 2 + seed % 2;
      auto content = random_map({2, c, 2, 2}, seed, -1, 2);
      auto style = random_map({2, c, 1, 3}, seed + 30, -1, 2);
      auto p = random_ha(c, seed + 60);
      auto got = hybrid_attention(content, style, p, {normalize});
      EXPECT_EQ(got.sizes(), content.sizes());
      for (int64_t n = 0; n < 2; ++n) {
        auto want = oracle::hybrid_attention(content, style, n, p, normalize);
        EXPECT_LT(oracle::max_abs_diff(want, got, n), 1e-9);
      }
    }
  }
}

TEST(Attention, HybridWithSingleStylePositionBroadcastsIt) {
  auto content = random_map({1, 2, 2, 2}, 1);
  auto style = random_map({1, 2, 1, 1}, 2);
  auto p = random_ha(2, 3);
  auto got = flatten_positions(hybrid_attention(content, style, p));
  auto ss2 = p.ss2.apply(flatten_positions(style));
  auto want = ss2 + flatten_positions(content);
  EXPECT_LT((got - want).abs().max().item<double>(), 1e-12);
}

TEST(Attention, ShapeErrors) {
  auto p = random_aea(3, 1);
  EXPECT_THROW(aea_forward(random_map({1, 4, 2, 2}, 1), p), DimensionError);
  auto h = random_ha(3, 1);
  EXPECT_THROW(hybrid_attention(random_map({1, 3, 2, 2}, 1), random_map({1, 2, 2, 2}, 2), h),
               DimensionError);
  EXPECT_THROW(hybrid_attention(random_map({2, 3, 2, 2}, 1), random_map({1, 3, 2, 2}, 2), h),
               DimensionError);
  EXPECT_THROW(detail_enhance(random_map({1, 4, 3}, 1), random_map({1, 4, 2}, 1), 2, 2),
               DimensionError);
}

// Central differences of a fixed random projection of the output.
void expect_gradients_match(const std::vector<torch::Tensor>& inputs,
                            const std::function<torch::Tensor()>& forward) {
  for (auto& t : inputs) t.requires_grad_(true);
  auto out = forward();
  auto proj = random_map(out.sizes().vec(), 99);
  (out * proj).sum().backward();
  const double h = 1e-4;
  torch::NoGradGuard g;
  for (const auto& t : inputs) {
    auto flat = t.view(-1);
    auto grad = t.grad().view(-1);
    for (int64_t i = 0; i < flat.numel(); ++i) {
      const double x0 = flat[i].item<double>();
      flat[i] = x0 + h;
      double up = (forward() * proj).sum().item<double>();
      flat[i] = x0 - h;
      double down = (forward() * proj).sum().item<double>();
      flat[i] = x0;
      double numeric = (up - down) / (2 * h);
      double analytic = grad[i].item<double>();
      double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      EXPECT_LT(std::abs(numeric - analytic) / scale, 1e-3)
          << "coordinate " << i << ": analytic " << analytic << " numeric " << numeric;
    }
  }
}

TEST(Attention, AeaGradientsMatchFiniteDifferences) {
  auto m = random_map({1, 2, 2, 2}, 21, -1, 1);
  auto p = random_aea(2, 22);
  expect_gradients_match({m, p.q.weight, p.k.weight, p.v.weight, p.v.bias},
                         [&] { return aea_forward(m, p); });
}

TEST(Attention, HybridGradientsMatchFiniteDifferences) {
  auto c = random_map({1, 2, 2, 2}, 31, -1, 1);
  auto s = random_map({1, 2, 2, 2}, 32, -1, 1);
  auto p = random_ha(2, 33);
  expect_gradients_match({c, s, p.cc1.weight, p.ss1.weight, p.ss2.weight},
                         [&] { return hybrid_attention(c, s, p); });
}

} // namespace
} // namespace aeanet
