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
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <torch/types.h>

#include "aeanet/image.hpp"
#include "aeanet/losses.hpp"
#include "aeanet/model.hpp"
#include "aeanet/vgg_backbone.hpp"

namespace torch::optim {
class Adam;
}

namespace aeanet {

/// How the local-dissimilarity partners are produced.
enum class LdMode {
  /// I_cs2 = stylize(c_i, s_pi(i)), I_sc2 = stylize(c_pi(i), s_i): two extra
  /// stylization passes per step.
  extra_passes,
  /// Both partners are the batch-permuted I_cs (no extra passes).
  permuted_outputs,
};

std::string_view ld_mode_name(LdMode mode);
LdMode parse_ld_mode(std::string_view name);

struct TrainConfig {
  std::filesystem::path content_dir;
  std::filesystem::path style_dir;
  std::filesystem::path vgg_weights;
  std::filesystem::path checkpoint_dir = "checkpoints";
  int64_t batch_size = 8;
  double learning_rate = 1e-4;
  int64_t iterations = 160000;
  int64_t resize = 512;
  int64_t crop = 256;
  LossWeights loss_weights;
  bool enable_ld = true;
  LdMode ld_mode = LdMode::extra_passes;
  /// Taps compared by the local-dissimilarity content term.
  std::vector<Tap> ld_content_layers{Tap::relu4_1, Tap::relu5_1};
  int64_t checkpoint_every = 10000;
  uint64_t seed = 0;
  bool resume = true;
  BackboneSpec backbone;
  bool normalize_ha_value = false;

  /// Field-level checks that do not touch the filesystem. Throws
  /// ArgumentError whose message starts with the offending field name.
  void validate() const;

  ModelConfig model_config() const;

  std::string to_json() const;
  /// Parses a JSON config. Unknown keys and wrongly typed values are
  /// ArgumentErrors naming the key. Missing keys keep their defaults.
  static TrainConfig from_json(const std::string& text);
  static TrainConfig load(const std::filesystem::path& path);

  bool operator==(const TrainConfig&) const = default;
};

/// A directory of training images sampled with replacement. Each draw is
/// resized so its shorter side equals `resize`, then randomly cropped to
/// `crop` x `crop`. Files that fail to decode are skipped with a warning.
class ImageFolder {
 public:
  ImageFolder(const std::filesystem::path& dir, int64_t resize, int64_t crop,
              std::ostream* warnings = nullptr, size_t cache_bytes = size_t{512} << 20);

  size_t size() const { return files_.size(); }
  const std::filesystem::path& dir() const { return dir_; }

  /// N x 3 x crop x crop batch. Deterministic for a given generator state.
  torch::Tensor sample(int64_t batch_size, std::mt19937_64& rng);

 private:
  const Image* fetch(size_t index);

  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  std::vector<bool> bad_;
  std::vector<std::optional<Image>> cache_;
  Image scratch_;  // holds an uncached draw until the next fetch
  size_t live_ = 0;
  size_t cache_bytes_ = 0;
  size_t cache_budget_;
  int64_t resize_;
  int64_t crop_;
  std::ostream* warnings_;
};

/// Shorter side to `shorter_side`, aspect ratio preserved.
Image resize_shorter_side(const Image& image, int64_t shorter_side);

/// One batch from `folder`.
torch::Tensor load_batch(ImageFolder& folder, int64_t batch_size, std::mt19937_64& rng);

struct OptimizerState {
  int64_t step = 0;
  TensorMap exp_avg;
  TensorMap exp_avg_sq;
};

struct Checkpoint {
  ModelParams model;
  OptimizerState optimizer;
  int64_t iteration = 0;
  TrainConfig config;
  /// Serialized std::mt19937_64 states; empty for a fresh run.
  std::string sampler_rng;
  std::string permutation_rng;
};

/// Writes the checkpoint as one safetensors file: model entries under their
/// schema names, Adam moments under "optimizer.exp_avg.<name>" and
/// "optimizer.exp_avg_sq.<name>", everything else in the metadata.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

/// Loads a checkpoint using the model configuration stored in it.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Loads a checkpoint and requires it to match `expected`; a checkpoint
/// built for other channel widths is a SchemaError naming the first entry
/// whose shape differs.
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected);

struct StepResult {
  LossBreakdown losses;
  /// Permutation used for the local-dissimilarity partners.
  std::vector<int64_t> permutation;
};

/// Owns the model and its Adam optimizer and runs training steps.
class Trainer {
 public:
  Trainer(TrainConfig config, PretrainedWeights weights);
  /// Restores model, optimizer, iteration counter and RNG state.
  Trainer(TrainConfig config, PretrainedWeights weights, const Checkpoint& resume_from);
  ~Trainer();

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// One Adam update on the full objective for a content/style batch pair.
  /// Throws NumericError naming the term if any loss is non-finite; the
  /// parameters are left untouched in that case.
  StepResult step(const torch::Tensor& contents, const torch::Tensor& styles);

  const ModelParams& model() const { return model_; }
  const PretrainedWeights& weights() const { return weights_; }
  const TrainConfig& config() const { return config_; }
  int64_t iteration() const { return iteration_; }

  Checkpoint checkpoint(const std::string& sampler_rng = {}) const;

  /// Random permutation of 0..n-1, redrawn once if it is the identity.
  std::vector<int64_t> draw_permutation(int64_t n);

 private:
  void build_optimizer();

  TrainConfig config_;
  PretrainedWeights weights_;
  ModelParams model_;
  std::unique_ptr<torch::optim::Adam> optimizer_;
  std::mt19937_64 permutation_rng_;
  int64_t iteration_ = 0;
};

struct TrainHooks {
  /// Receives one JSON line per iteration.
  std::ostream* log = nullptr;
  /// Receives decode warnings and progress notes.
  std::ostream* warnings = nullptr;
  /// Called after every completed iteration with the iteration count; return
  /// true to save a checkpoint and stop early.
  std::function<bool(int64_t)> should_stop;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::filesystem::path checkpoint_path;
  std::vector<LossBreakdown> history;
};

/// Path of the most recent checkpoint inside a checkpoint directory.
std::filesystem::path latest_checkpoint_path(const std::filesystem::path& checkpoint_dir);

/// Full training loop. Resumes from `latest_checkpoint_path` when
/// `config.resume` is set and that file exists. Holds a lock file in the
/// checkpoint directory for its whole duration.
TrainResult train(const TrainConfig& config, const TrainHooks& hooks = {});

/// One structured log line (JSON object, no trailing newline).
std::string format_log_line(int64_t iteration, const LossBreakdown& losses, double wall_seconds);

} // namespace aeanet
