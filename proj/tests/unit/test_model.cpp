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

#include "support.hpp"

namespace aeanet {
namespace {

using testing::random_image;
using testing::tiny_config;
using testing::tiny_spec;

TEST(Decoder, LayoutAndShapes) {
  auto layout = DecoderParams::layout(BackboneSpec::vgg19());
  ASSERT_EQ(layout.size(), 9u);
  EXPECT_EQ(layout.front().first, 512);
  EXPECT_EQ(layout.back().second, 3);

  auto gen = at::make_generator<at::CPUGeneratorImpl>(1);
  auto d = DecoderParams::init(tiny_spec(), gen);
  auto x = torch::rand({2, 8, 3, 5});
  EXPECT_EQ(decode_raw(x, d).sizes(), (c10::IntArrayRef{2, 3, 24, 40}));
  EXPECT_THROW(decode(torch::rand({1, 7, 3, 3}), d), DimensionError);
}

TEST(Decoder, DecodeClampsRawOutput) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(2);
  auto d = DecoderParams::init(tiny_spec(), gen);
  d.convs.back().bias.fill_(3.0);
  auto x = torch::rand({1, 8, 2, 2});
  EXPECT_GT(decode_raw(x, d).max().item<float>(), 1.0f);
  auto y = decode(x, d);
  EXPECT_LE(y.max().item<float>(), 1.0f);
  EXPECT_GE(y.min().item<float>(), 0.0f);
  EXPECT_EQ(decode_image(x, d).height(), 16);
}

TEST(Model, InitialisationIsSeeded) {
  auto a = ModelParams::initialize(tiny_config(), 7).state_dict();
  auto b = ModelParams::initialize(tiny_config(), 7).state_dict();
  auto c = ModelParams::initialize(tiny_config(), 8).state_dict();
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [k, v] : a) EXPECT_TRUE(torch::equal(v, b.at(k))) << k;
  EXPECT_FALSE(torch::equal(a.at("ha.ss2.weight"), c.at("ha.ss2.weight")));
}

TEST(Model, SchemaCoversEveryParameter) {
  auto m = ModelParams::initialize(tiny_config(), 1);
  auto schema = ModelParams::schema(tiny_config());
  auto named = m.named_parameters();
  ASSERT_EQ(schema.size(), named.size());
  // 3 attention blocks x 3 convs x 2 tensors + 9 decoder convs x 2 tensors.
  EXPECT_EQ(named.size(), 36u);
  for (size_t i = 0; i < schema.size(); ++i) {
    EXPECT_EQ(schema[i].first, named[i].first);
    EXPECT_EQ(schema[i].second, named[i].second.sizes().vec()) << schema[i].first;
  }
}

TEST(Model, StateDictRoundTripAndErrors) {
  auto m = ModelParams::initialize(tiny_config(), 3);
  auto sd = m.state_dict();
  auto back = ModelParams::from_state_dict(sd, tiny_config());
  for (const auto& [k, v] : back.state_dict()) EXPECT_TRUE(torch::equal(v, sd.at(k))) << k;

  auto missing = sd;
  missing.erase("saea.k.bias");
  EXPECT_THROW(ModelParams::from_state_dict(missing, tiny_config()), SchemaError);
  EXPECT_THROW(ModelParams::from_state_dict(sd, ModelConfig{}), SchemaError);
}

TEST(Model, CloneIsDeep) {
  auto m = ModelParams::initialize(tiny_config(), 3);
  auto c = m.clone();
  c.caea.q.weight.data().add_(1.0);
  EXPECT_FALSE(torch::equal(c.caea.q.weight, m.caea.q.weight));
}

TEST(Model, PadToMultiple) {
  auto x = torch::rand({1, 3, 17, 24});
  auto p = pad_to_multiple(x, 8);
  EXPECT_EQ(p.sizes(), (c10::IntArrayRef{1, 3, 24, 24}));
  EXPECT_TRUE(torch::equal(p.slice(2, 0, 17), x));
  EXPECT_TRUE(torch::equal(pad_to_multiple(x.slice(2, 0, 16), 8), x.slice(2, 0, 16)));
}

class StylizeTest : public ::testing::Test {
 protected:
  PretrainedWeights weights = synthesize_vgg_weights(tiny_spec(), 1);
  ModelParams model = ModelParams::initialize(tiny_config(), 2);
};

TEST_F(StylizeTest, OutputKeepsContentResolution) {
  for (auto [ch, cw, sh, sw] : {std::array<int64_t, 4>{32, 32, 32, 32},
                                 std::array<int64_t, 4>{41, 29, 64, 20},
                                 std::array<int64_t, 4>{16, 16, 50, 50}}) {
    auto out = stylize(random_image(ch, cw, 1), random_image(sh, sw, 2), model, weights);
    EXPECT_EQ(out.height(), ch);
    EXPECT_EQ(out.width(), cw);
  }
}

TEST_F(StylizeTest, AlphaZeroIgnoresStyle) {
  auto c = random_image(32, 40, 1);
  auto a = stylize(c, random_image(32, 32, 2), model, weights, 0.0);
  auto b = stylize(c, random_image(48, 24, 3), model, weights, 0.0);
  EXPECT_TRUE(torch::equal(a.tensor(), b.tensor()));
}

TEST_F(StylizeTest, PreDecoderFeatureIsLinearInAlpha) {
  torch::NoGradGuard g;
  auto c = random_image(32, 32, 1).batch();
  auto s = random_image(32, 32, 2).batch();
  auto f0 = pre_decoder_feature(c, s, model, weights, 0.0);
  auto f1 = pre_decoder_feature(c, s, model, weights, 1.0);
  auto fh = pre_decoder_feature(c, s, model, weights, 0.5);
  EXPECT_LT((fh - (f0 + f1) / 2).abs().max().item<float>(), 1e-6f);
  EXPECT_TRUE(torch::equal(f0, encode_to(c, Tap::relu4_1, weights)));
}

TEST_F(StylizeTest, AlphaOutsideUnitIntervalIsRejected) {
  auto c = random_image(16, 16, 1);
  EXPECT_THROW(stylize(c, c, model, weights, -0.1), ArgumentError);
  EXPECT_THROW(stylize(c, c, model, weights, 1.5), ArgumentError);
  EXPECT_THROW(stylize(c, c, model, weights, std::nan("")), ArgumentError);
}

TEST_F(StylizeTest, MismatchedEncoderIsRejected) {
  auto other = synthesize_vgg_weights(BackboneSpec{{4, 4, 8, 16, 16}}, 1);
  auto c = random_image(16, 16, 1);
  EXPECT_THROW(stylize(c, c, model, other), DimensionError);
}

TEST_F(StylizeTest, BatchMatchesSingleImages) {
  auto c = std::vector<Image>{random_image(32, 32, 1), random_image(32, 32, 2)};
  auto s = std::vector<Image>{random_image(32, 32, 3), random_image(32, 32, 4)};
  torch::NoGradGuard g;
  auto batch = stylize_batch(stack_images(c), stack_images(s), model, weights);
  for (int i = 0; i < 2; ++i) {
    auto one = stylize(c[i], s[i], model, weights);
    EXPECT_LT((batch[i] - one.tensor()).abs().max().item<float>(), 1e-5f);
  }
}

} // namespace
} // namespace aeanet
