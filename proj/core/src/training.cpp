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

#include "aeanet/training.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <torch/torch.h>

#include <json.hpp>

#include "aeanet/errors.hpp"

namespace aeanet {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kCheckpointFormat = "aeanet-checkpoint";
constexpr uint64_t kPermutationStream = 0x9e3779b97f4a7c15ULL;

std::string rng_state(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void restore_rng(std::mt19937_64& rng, const std::string& state) {
  if (state.empty()) return;
  std::istringstream is(state);
  is >> rng;
  if (!is) throw SchemaError("corrupt random generator state");
}

// Config key readers; errors name the key.
template <typename T>
T read_value(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ArgumentError(key + ": wrong value type");
  }
}

int64_t read_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ArgumentError(key + ": expected an integer");
  return j.get<int64_t>();
}

double read_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw ArgumentError(key + ": expected a number");
  return j.get<double>();
}

bool read_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ArgumentError(key + ": expected true or false");
  return j.get<bool>();
}

std::string read_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ArgumentError(key + ": expected a string");
  return j.get<std::string>();
}

// Exclusive ownership of a checkpoint directory for one training run.
class DirectoryLock {
 public:
  explicit DirectoryLock(fs::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      throw DataError("checkpoint directory is locked by another training run (" +
                      path_.string() + ")");
    }
    auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
  }
  ~DirectoryLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

} // namespace

std::string_view ld_mode_name(LdMode mode) {
  return mode == LdMode::extra_passes ? "extra_passes" : "permuted_outputs";
}

LdMode parse_ld_mode(std::string_view name) {
  if (name == "extra_passes") return LdMode::extra_passes;
  if (name == "permuted_outputs") return LdMode::permuted_outputs;
  throw ArgumentError("ld_mode: expected extra_passes or permuted_outputs, got '" +
                      std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// TrainConfig

void TrainConfig::validate() const {
  if (batch_size < 1) throw ArgumentError("batch_size: must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw ArgumentError("learning_rate: must be > 0");
  }
  if (iterations < 0) throw ArgumentError("iterations: must be >= 0");
  if (crop < kMinEncodeSide) {
    throw ArgumentError("crop: must be >= " + std::to_string(kMinEncodeSide));
  }
  if (crop % 8 != 0) throw ArgumentError("crop: must be a multiple of 8");
  if (resize < crop) throw ArgumentError("resize: must be >= crop");
  if (checkpoint_every < 1) throw ArgumentError("checkpoint_every: must be >= 1");
  if (enable_ld && batch_size < 2) {
    throw ArgumentError("batch_size: local-dissimilarity losses need batch_size >= 2");
  }
  if (ld_content_layers.empty()) throw ArgumentError("ld_content_layers: must not be empty");
  for (auto w : backbone.widths) {
    if (w < 1) throw ArgumentError("backbone_widths: must be positive");
  }
  try {
    loss_weights.validate();
  } catch (const ArgumentError& e) {
    throw ArgumentError(std::string("loss_weights.") + e.what());
  }
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.backbone = backbone;
  m.hybrid.normalize_value = normalize_ha_value;
  return m;
}

std::string TrainConfig::to_json() const {
  json j;
  j["content_dir"] = content_dir.string();
  j["style_dir"] = style_dir.string();
  j["vgg_weights"] = vgg_weights.string();
  j["checkpoint_dir"] = checkpoint_dir.string();
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["iterations"] = iterations;
  j["resize"] = resize;
  j["crop"] = crop;
  j["loss_weights"] = {{"lambda_c", loss_weights.content},
                       {"lambda_s", loss_weights.style},
                       {"lambda_id1", loss_weights.identity_pixel},
                       {"lambda_id2", loss_weights.identity_feature},
                       {"lambda_cld", loss_weights.ld_content},
                       {"lambda_sld", loss_weights.ld_style}};
  j["enable_ld"] = enable_ld;
  j["ld_mode"] = std::string(ld_mode_name(ld_mode));
  std::vector<std::string> layers;
  for (Tap t : ld_content_layers) layers.emplace_back(tap_name(t));
  j["ld_content_layers"] = layers;
  j["checkpoint_every"] = checkpoint_every;
  j["seed"] = seed;
  j["resume"] = resume;
  j["backbone_widths"] = backbone.widths;
  j["normalize_ha_value"] = normalize_ha_value;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("config: top level must be an object");

  TrainConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "content_dir") {
      c.content_dir = read_string(v, key);
    } else if (key == "style_dir") {
      c.style_dir = read_string(v, key);
    } else if (key == "vgg_weights") {
      c.vgg_weights = read_string(v, key);
    } else if (key == "checkpoint_dir") {
      c.checkpoint_dir = read_string(v, key);
    } else if (key == "batch_size") {
      c.batch_size = read_int(v, key);
    } else if (key == "learning_rate") {
      c.learning_rate = read_real(v, key);
    } else if (key == "iterations") {
      c.iterations = read_int(v, key);
    } else if (key == "resize") {
      c.resize = read_int(v, key);
    } else if (key == "crop") {
      c.crop = read_int(v, key);
    } else if (key == "enable_ld") {
      c.enable_ld = read_bool(v, key);
    } else if (key == "ld_mode") {
      c.ld_mode = parse_ld_mode(read_string(v, key));
    } else if (key == "ld_content_layers") {
      if (!v.is_array()) throw ArgumentError(key + ": expected a list of tap names");
      c.ld_content_layers.clear();
      for (const auto& e : v) c.ld_content_layers.push_back(parse_tap(read_string(e, key)));
    } else if (key == "checkpoint_every") {
      c.checkpoint_every = read_int(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
        throw ArgumentError(key + ": expected a non-negative integer");
      }
      c.seed = v.get<uint64_t>();
    } else if (key == "resume") {
      c.resume = read_bool(v, key);
    } else if (key == "normalize_ha_value") {
      c.normalize_ha_value = read_bool(v, key);
    } else if (key == "backbone_widths") {
      auto widths = read_value<std::vector<int64_t>>(v, key);
      if (widths.size() != kNumTaps) throw ArgumentError(key + ": expected 5 widths");
      std::copy(widths.begin(), widths.end(), c.backbone.widths.begin());
    } else if (key == "loss_weights") {
      if (!v.is_object()) throw ArgumentError(key + ": expected an object");
      for (const auto& [wk, wv] : v.items()) {
        auto full = key + "." + wk;
        double x = read_real(wv, full);
        if (wk == "lambda_c") c.loss_weights.content = x;
        else if (wk == "lambda_s") c.loss_weights.style = x;
        else if (wk == "lambda_id1") c.loss_weights.identity_pixel = x;
        else if (wk == "lambda_id2") c.loss_weights.identity_feature = x;
        else if (wk == "lambda_cld") c.loss_weights.ld_content = x;
        else if (wk == "lambda_sld") c.loss_weights.ld_style = x;
        else throw ArgumentError(full + ": unknown key");
      }
    } else {
      throw ArgumentError(key + ": unknown config key");
    }
  }
  return c;
}

TrainConfig TrainConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Data

Image resize_shorter_side(const Image& image, int64_t shorter_side) {
  const int64_t h = image.height();
  const int64_t w = image.width();
  if (h <= w) {
    auto nw = static_cast<int64_t>(std::llround(static_cast<double>(w) * shorter_side / h));
    return resize(image, shorter_side, std::max<int64_t>(nw, shorter_side));
  }
  auto nh = static_cast<int64_t>(std::llround(static_cast<double>(h) * shorter_side / w));
  return resize(image, std::max<int64_t>(nh, shorter_side), shorter_side);
}

ImageFolder::ImageFolder(const fs::path& dir, int64_t resize, int64_t crop, std::ostream* warnings,
                         size_t cache_bytes)
    : dir_(dir), cache_budget_(cache_bytes), resize_(resize), crop_(crop), warnings_(warnings) {
  if (crop < 1 || resize < crop) throw ArgumentError("ImageFolder: need 1 <= crop <= resize");
  files_ = list_images(dir);
  if (files_.empty()) throw DataError("no images in " + dir.string());
  bad_.assign(files_.size(), false);
  cache_.resize(files_.size());
  live_ = files_.size();
}

const Image* ImageFolder::fetch(size_t index) {
  if (cache_[index]) return &*cache_[index];
  try {
    auto img = resize_shorter_side(read_image(files_[index]), resize_);
    size_t bytes = static_cast<size_t>(img.tensor().numel()) * sizeof(float);
    if (cache_bytes_ + bytes <= cache_budget_) {
      cache_bytes_ += bytes;
      cache_[index] = std::move(img);
      return &*cache_[index];
    }
    scratch_ = std::move(img);
    return &scratch_;
  } catch (const LoadError& e) {
    bad_[index] = true;
    --live_;
    if (warnings_ != nullptr) *warnings_ << "warning: skipping " << e.what() << "\n";
    return nullptr;
  }
}

torch::Tensor ImageFolder::sample(int64_t batch_size, std::mt19937_64& rng) {
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  std::vector<torch::Tensor> crops;
  crops.reserve(static_cast<size_t>(batch_size));
  std::uniform_int_distribution<size_t> pick(0, files_.size() - 1);
  while (static_cast<int64_t>(crops.size()) < batch_size) {
    if (live_ == 0) throw DataError("no decodable images in " + dir_.string());
    size_t idx = pick(rng);
    if (bad_[idx]) continue;
    const Image* img = fetch(idx);
    if (img == nullptr) continue;
    std::uniform_int_distribution<int64_t> oy(0, img->height() - crop_);
    std::uniform_int_distribution<int64_t> ox(0, img->width() - crop_);
    int64_t y = oy(rng);
    int64_t x = ox(rng);
    crops.push_back(img->tensor().slice(1, y, y + crop_).slice(2, x, x + crop_));
  }
  return torch::stack(crops);
}

torch::Tensor load_batch(ImageFolder& folder, int64_t batch_size, std::mt19937_64& rng) {
  return folder.sample(batch_size, rng);
}

// ---------------------------------------------------------------------------
// Checkpoints

void save_checkpoint(const Checkpoint& checkpoint, const fs::path& path) {
  TensorMap tensors = checkpoint.model.state_dict();
  for (const auto& [name, t] : checkpoint.optimizer.exp_avg) tensors["optimizer.exp_avg." + name] = t;
  for (const auto& [name, t] : checkpoint.optimizer.exp_avg_sq) {
    tensors["optimizer.exp_avg_sq." + name] = t;
  }
  Metadata meta;
  meta["format"] = kCheckpointFormat;
  meta["version"] = "1";
  meta["iteration"] = std::to_string(checkpoint.iteration);
  meta["optimizer.step"] = std::to_string(checkpoint.optimizer.step);
  meta["config"] = checkpoint.config.to_json();
  meta["rng.sampler"] = checkpoint.sampler_rng;
  meta["rng.permutation"] = checkpoint.permutation_rng;
  write_safetensors(path, tensors, meta);
}

namespace {

int64_t parse_meta_int(const Metadata& meta, const std::string& key, const fs::path& path) {
  auto it = meta.find(key);
  if (it == meta.end()) throw SchemaError(path.string() + ": metadata '" + key + "' absent");
  try {
    size_t used = 0;
    auto v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw SchemaError(path.string() + ": metadata '" + key + "' is not an integer");
  }
}

Checkpoint checkpoint_from_file(const NamedTensorFile& file, const fs::path& path,
                                const std::optional<ModelConfig>& expected) {
  const auto& meta = file.metadata;
  auto fmt = meta.find("format");
  if (fmt == meta.end() || fmt->second != kCheckpointFormat) {
    throw SchemaError(path.string() + ": not an aeanet checkpoint");
  }
  Checkpoint ck;
  auto cfg = meta.find("config");
  if (cfg == meta.end()) throw SchemaError(path.string() + ": metadata 'config' absent");
  try {
    ck.config = TrainConfig::from_json(cfg->second);
  } catch (const ArgumentError& e) {
    throw SchemaError(path.string() + ": bad stored config: " + e.what());
  }
  ck.iteration = parse_meta_int(meta, "iteration", path);
  ck.optimizer.step = parse_meta_int(meta, "optimizer.step", path);
  if (auto it = meta.find("rng.sampler"); it != meta.end()) ck.sampler_rng = it->second;
  if (auto it = meta.find("rng.permutation"); it != meta.end()) ck.permutation_rng = it->second;

  ModelConfig model_config = expected ? *expected : ck.config.model_config();
  ck.model = ModelParams::from_state_dict(file.tensors, model_config);
  if (expected) {
    ck.config.backbone = expected->backbone;
    ck.config.normalize_ha_value = expected->hybrid.normalize_value;
  }

  for (const auto& [name, param] : ck.model.named_parameters()) {
    for (const char* kind : {"exp_avg", "exp_avg_sq"}) {
      auto key = std::string("optimizer.") + kind + "." + name;
      auto it = file.tensors.find(key);
      if (it == file.tensors.end()) {
        if (ck.optimizer.step > 0) throw SchemaError(path.string() + ": " + key + " absent");
        continue;
      }
      if (it->second.sizes() != param.sizes()) {
        throw SchemaError(path.string() + ": " + key + " shape mismatch");
      }
      auto& target = std::string(kind) == "exp_avg" ? ck.optimizer.exp_avg : ck.optimizer.exp_avg_sq;
      target[name] = it->second;
    }
  }
  return ck;
}

} // namespace

Checkpoint load_checkpoint(const fs::path& path) {
  if (!fs::exists(path)) throw LoadError("checkpoint not found: " + path.string());
  return checkpoint_from_file(read_safetensors(path), path, std::nullopt);
}

Checkpoint load_checkpoint(const fs::path& path, const ModelConfig& expected) {
  if (!fs::exists(path)) throw LoadError("checkpoint not found: " + path.string());
  return checkpoint_from_file(read_safetensors(path), path, expected);
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(TrainConfig config, PretrainedWeights weights)
    : config_(std::move(config)),
      weights_(std::move(weights)),
      model_(ModelParams::initialize(config_.model_config(), config_.seed)),
      permutation_rng_(config_.seed ^ kPermutationStream) {
  config_.validate();
  if (weights_.spec() != config_.backbone) {
    throw DimensionError("encoder weights do not match the configured backbone widths");
  }
  build_optimizer();
}

Trainer::Trainer(TrainConfig config, PretrainedWeights weights, const Checkpoint& resume_from)
    : config_(std::move(config)),
      weights_(std::move(weights)),
      model_(resume_from.model.clone()),
      permutation_rng_(config_.seed ^ kPermutationStream),
      iteration_(resume_from.iteration) {
  config_.validate();
  if (weights_.spec() != config_.backbone || model_.config.backbone != config_.backbone) {
    throw DimensionError("checkpoint, encoder weights and config disagree on backbone widths");
  }
  restore_rng(permutation_rng_, resume_from.permutation_rng);
  build_optimizer();
  const auto& st = resume_from.optimizer;
  if (st.step > 0) {
    for (const auto& [name, p] : model_.named_parameters()) {
      auto a = st.exp_avg.find(name);
      auto b = st.exp_avg_sq.find(name);
      if (a == st.exp_avg.end() || b == st.exp_avg_sq.end()) {
        throw SchemaError("optimizer state for " + name + " absent");
      }
      auto state = std::make_unique<torch::optim::AdamParamState>();
      state->step(st.step);
      state->exp_avg(a->second.detach().clone());
      state->exp_avg_sq(b->second.detach().clone());
      optimizer_->state()[p.unsafeGetTensorImpl()] = std::move(state);
    }
  }
}

Trainer::~Trainer() = default;

void Trainer::build_optimizer() {
  model_.set_requires_grad(true);
  torch::optim::AdamOptions opts(config_.learning_rate);
  opts.betas({0.9, 0.999}).eps(1e-8).weight_decay(0.0);
  optimizer_ = std::make_unique<torch::optim::Adam>(model_.parameters(), opts);
}

std::vector<int64_t> Trainer::draw_permutation(int64_t n) {
  std::vector<int64_t> perm(static_cast<size_t>(n));
  auto shuffle = [&] {
    for (int64_t i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    for (int64_t i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<int64_t> pick(0, i);
      std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(pick(permutation_rng_))]);
    }
  };
  auto is_identity = [&] {
    for (int64_t i = 0; i < n; ++i) {
      if (perm[static_cast<size_t>(i)] != i) return false;
    }
    return true;
  };
  shuffle();
  if (n >= 2 && is_identity()) shuffle();
  return perm;
}

StepResult Trainer::step(const torch::Tensor& contents, const torch::Tensor& styles) {
  if (contents.dim() != 4 || styles.dim() != 4 || contents.size(0) != styles.size(0)) {
    throw DimensionError("train_step: content and style batches must be N x 3 x H x W with equal N");
  }
  if (contents.size(2) % 8 != 0 || contents.size(3) % 8 != 0) {
    throw DimensionError("train_step: content crops must be a multiple of 8");
  }
  const int64_t n = contents.size(0);
  StepResult result;
  result.permutation = draw_permutation(n);
  auto perm = torch::tensor(result.permutation, torch::kLong);

  FeaturePyramid pyr_c, pyr_s;
  {
    torch::NoGradGuard no_grad;
    pyr_c = encode(contents, weights_);
    pyr_s = encode(styles, weights_);
  }
  const auto& fc = pyr_c[Tap::relu4_1];
  const auto& fs = pyr_s[Tap::relu4_1];
  const auto& hybrid = model_.config.hybrid;

  auto cc_c = aea_forward(fc, model_.caea);
  auto ss_s = aea_forward(fs, model_.saea);
  auto stylized = decode_raw(hybrid_attention(cc_c, ss_s, model_.ha, hybrid), model_.decoder);
  auto pyr_cs = encode(stylized, weights_);

  const auto& w = config_.loss_weights;
  LossTerms terms;
  terms.content = content_loss(pyr_c, pyr_cs);
  terms.style = style_loss(pyr_s, pyr_cs);

  if (w.identity_pixel != 0.0 || w.identity_feature != 0.0) {
    auto ss_c = aea_forward(fc, model_.saea);
    auto cc_s = aea_forward(fs, model_.caea);
    IdentityInputs id;
    id.content = contents;
    id.style = styles;
    id.content_recon = decode_raw(hybrid_attention(cc_c, ss_c, model_.ha, hybrid), model_.decoder);
    id.style_recon = decode_raw(hybrid_attention(cc_s, ss_s, model_.ha, hybrid), model_.decoder);
    id.content_pyr = pyr_c;
    id.style_pyr = pyr_s;
    id.content_recon_pyr = encode(id.content_recon, weights_);
    id.style_recon_pyr = encode(id.style_recon, weights_);
    terms.identity = identity_loss(id, w.identity_pixel, w.identity_feature);
  } else {
    terms.identity = torch::zeros({});
  }

  if (config_.enable_ld) {
    // Zero-weighted terms are reported only; keep them out of the backward graph.
    std::optional<torch::NoGradGuard> report_only;
    if (w.ld_content == 0.0 && w.ld_style == 0.0) report_only.emplace();
    if (config_.ld_mode == LdMode::extra_passes) {
      auto other_style = decode_raw(
          hybrid_attention(cc_c, ss_s.index_select(0, perm), model_.ha, hybrid), model_.decoder);
      auto other_content = decode_raw(
          hybrid_attention(cc_c.index_select(0, perm), ss_s, model_.ha, hybrid), model_.decoder);
      terms.ld_content =
          ld_content_loss(pyr_cs, encode(other_style, weights_), config_.ld_content_layers);
      terms.ld_style = ld_style_loss(pyr_cs, encode(other_content, weights_));
    } else {
      auto permuted = pyr_cs.index_batch(perm);
      terms.ld_content = ld_content_loss(pyr_cs, permuted, config_.ld_content_layers);
      terms.ld_style = ld_style_loss(pyr_cs, permuted);
    }
  } else {
    terms.ld_content = torch::zeros({});
    terms.ld_style = torch::zeros({});
  }

  auto combined = total_loss(terms, w);
  optimizer_->zero_grad(/*set_to_none=*/true);
  if (combined.total.requires_grad()) combined.total.backward();
  optimizer_->step();
  ++iteration_;
  result.losses = combined.breakdown;
  return result;
}

Checkpoint Trainer::checkpoint(const std::string& sampler_rng) const {
  Checkpoint ck;
  ck.model = model_.clone();
  ck.model.set_requires_grad(false);
  ck.iteration = iteration_;
  ck.config = config_;
  ck.sampler_rng = sampler_rng;
  ck.permutation_rng = rng_state(permutation_rng_);
  int64_t step = 0;
  for (const auto& [name, p] : model_.named_parameters()) {
    auto it = optimizer_->state().find(p.unsafeGetTensorImpl());
    if (it == optimizer_->state().end()) continue;
    const auto& st = static_cast<const torch::optim::AdamParamState&>(*it->second);
    step = st.step();
    ck.optimizer.exp_avg[name] = st.exp_avg().detach().clone();
    ck.optimizer.exp_avg_sq[name] = st.exp_avg_sq().detach().clone();
  }
  ck.optimizer.step = ck.optimizer.exp_avg.empty() ? 0 : step;
  return ck;
}

// ---------------------------------------------------------------------------
// Loop

fs::path latest_checkpoint_path(const fs::path& checkpoint_dir) {
  return checkpoint_dir / "latest.safetensors";
}

std::string format_log_line(int64_t iteration, const LossBreakdown& l, double wall_seconds) {
  json j = {{"iteration", iteration},     {"content", l.content},
            {"style", l.style},           {"identity", l.identity},
            {"ld_content", l.ld_content}, {"ld_style", l.ld_style},
            {"total", l.total},           {"wall_seconds", wall_seconds}};
  return j.dump();
}

TrainResult train(const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (config.content_dir.empty()) throw ArgumentError("content_dir: required");
  if (config.style_dir.empty()) throw ArgumentError("style_dir: required");
  if (config.vgg_weights.empty()) throw ArgumentError("vgg_weights: required");

  fs::create_directories(config.checkpoint_dir);
  DirectoryLock lock(config.checkpoint_dir / "train.lock");

  auto weights = load_vgg_weights(config.vgg_weights, config.backbone);
  ImageFolder contents(config.content_dir, config.resize, config.crop, hooks.warnings);
  ImageFolder styles(config.style_dir, config.resize, config.crop, hooks.warnings);

  std::unique_ptr<Trainer> trainer;
  std::mt19937_64 sampler(config.seed);
  const auto latest = latest_checkpoint_path(config.checkpoint_dir);
  if (config.resume && fs::exists(latest)) {
    auto ck = load_checkpoint(latest, config.model_config());
    restore_rng(sampler, ck.sampler_rng);
    trainer = std::make_unique<Trainer>(config, weights, ck);
    if (hooks.warnings != nullptr) {
      *hooks.warnings << "resuming from " << latest.string() << " at iteration " << ck.iteration
                      << "\n";
    }
  } else {
    trainer = std::make_unique<Trainer>(config, weights);
  }

  TrainResult result;
  auto save = [&] {
    result.checkpoint = trainer->checkpoint(rng_state(sampler));
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint_%08lld.safetensors",
                  static_cast<long long>(trainer->iteration()));
    result.checkpoint_path = config.checkpoint_dir / name;
    save_checkpoint(result.checkpoint, result.checkpoint_path);
    save_checkpoint(result.checkpoint, latest);
  };

  bool saved_current = false;
  while (trainer->iteration() < config.iterations) {
    const auto start = std::chrono::steady_clock::now();
    const int64_t index = trainer->iteration();
    auto c = load_batch(contents, config.batch_size, sampler);
    auto s = load_batch(styles, config.batch_size, sampler);
    auto step = trainer->step(c, s);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(step.losses);
    if (hooks.log != nullptr) *hooks.log << format_log_line(index, step.losses, wall) << std::endl;
    saved_current = false;
    if (trainer->iteration() % config.checkpoint_every == 0) {
      save();
      saved_current = true;
    }
    if (hooks.should_stop && hooks.should_stop(trainer->iteration())) break;
  }
  if (!saved_current) save();
  return result;
}

} // namespace aeanet
