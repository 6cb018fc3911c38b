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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "aeanet/image.hpp"
#include "aeanet/model.hpp"
#include "aeanet/vgg_backbone.hpp"

namespace aeanet {

enum class SsimChannels {
  luminance,  // ITU-R BT.601 luma
  rgb_mean,   // SSIM per RGB channel, averaged
};

struct SsimOptions {
  SsimChannels channels = SsimChannels::luminance;
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Mean single-scale SSIM over all fully contained Gaussian windows.
/// Throws DimensionError if the images differ in size or are smaller than
/// the window.
double ssim(const Image& a, const Image& b, const SsimOptions& options = {});

/// Content discrepancy of a stylization: content_loss on relu4_1 and relu5_1.
double metric_content(const Image& content, const Image& stylized, const PretrainedWeights& weights);

/// Style discrepancy: style_loss over all five taps.
double metric_style(const Image& style, const Image& stylized, const PretrainedWeights& weights);

struct PairRecord {
  std::string content;
  std::string style;
  double content_loss = 0;
  double style_loss = 0;
  double ssim = 0;
  double seconds = 0;

  bool operator==(const PairRecord&) const = default;
};

struct EvalReport {
  double mean_content_loss = 0;
  double mean_style_loss = 0;
  double mean_ssim = 0;
  double mean_time_seconds = 0;
  int64_t num_pairs = 0;
  int64_t resolution = 0;
  uint64_t seed = 0;
  int warmup = 0;
  std::string ssim_pairing = "stylized_vs_content";
  std::string ssim_channels = "luminance";
  std::string environment;
  std::string checkpoint;
  std::vector<PairRecord> pairs;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
  /// Atomic write (temporary file + rename).
  void write(const std::filesystem::path& path) const;
  static EvalReport read(const std::filesystem::path& path);

  bool operator==(const EvalReport&) const = default;
};

/// Two-line table in the column order L_c, L_s, SSIM, Time/sec.
std::string summary_table(const EvalReport& report);

/// Maps a content/style pair to a stylized image at the content's size.
using Stylizer = std::function<Image(const Image& content, const Image& style)>;

struct EvalOptions {
  int64_t num_pairs = 1;
  /// Both inputs are resized to resolution x resolution.
  int64_t resolution = 512;
  uint64_t seed = 0;
  /// Untimed stylizer calls before measurement starts.
  int warmup = 2;
  SsimOptions ssim;
};

/// Describes the compute environment for reports.
std::string environment_descriptor();

/// Samples `num_pairs` (content, style) pairs with replacement, stylizes each
/// with `stylizer`, and aggregates the metrics. Timing covers only the
/// stylizer call.
EvalReport evaluate(const Stylizer& stylizer, const PretrainedWeights& weights,
                    const std::filesystem::path& content_dir,
                    const std::filesystem::path& style_dir, const EvalOptions& options);

/// evaluate() with the model at alpha = 1.
EvalReport run_eval(const ModelParams& model, const PretrainedWeights& weights,
                    const std::filesystem::path& content_dir,
                    const std::filesystem::path& style_dir, const EvalOptions& options);

/// Mean seconds per stylize call at resolution x resolution over `n` timed
/// calls, after `warmup` untimed calls. Excludes file decoding.
double benchmark_timing(const ModelParams& model, const PretrainedWeights& weights,
                        const std::filesystem::path& content_dir,
                        const std::filesystem::path& style_dir, int64_t n, int64_t resolution,
                        int warmup = 2);

} // namespace aeanet
