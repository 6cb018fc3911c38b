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

#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aeanet/aeanet.hpp"

namespace aeanet::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string from_env(const char* name) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : std::string();
}

fs::path require_checkpoint(const std::string& flag) {
  if (!flag.empty()) return flag;
  auto env = from_env(kCheckpointEnv);
  if (!env.empty()) return env;
  throw UsageError(std::string("--checkpoint is required (or set ") + kCheckpointEnv + ")");
}

fs::path resolve_vgg(const std::string& flag, const Checkpoint& ck) {
  if (!flag.empty()) return flag;
  auto env = from_env(kVggEnv);
  if (!env.empty()) return env;
  if (!ck.config.vgg_weights.empty()) return ck.config.vgg_weights;
  throw UsageError(std::string("--vgg is required (or set ") + kVggEnv + ")");
}

std::vector<fs::path> expand_inputs(const fs::path& p) {
  if (fs::is_directory(p)) {
    auto files = list_images(p);
    if (files.empty()) throw DataError("no images in " + p.string());
    return files;
  }
  if (!fs::exists(p)) throw LoadError("input not found: " + p.string());
  return {p};
}

std::string output_name(const fs::path& content, const fs::path& style, double alpha,
                        ImageFormat format) {
  char a[32];
  std::snprintf(a, sizeof(a), "%.2f", alpha);
  return content.stem().string() + "_" + style.stem().string() + "_" + a +
         (format == ImageFormat::png ? ".png" : ".jpg");
}

// --------------------------------------------------------------------------

struct StylizeArgs {
  std::string content;
  std::string style;
  std::string checkpoint;
  std::string vgg;
  std::string output;
  std::string format = "png";
  double alpha = 1.0;
  int jpeg_quality = 95;
  int jobs = 1;
};

int cmd_stylize(const StylizeArgs& a, std::ostream& out) {
  if (!(a.alpha >= 0.0 && a.alpha <= 1.0)) throw UsageError("--alpha must lie in [0, 1]");
  if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
  WriteOptions wopts;
  if (a.format == "png") {
    wopts.format = ImageFormat::png;
  } else if (a.format == "jpeg" || a.format == "jpg") {
    wopts.format = ImageFormat::jpeg;
  } else {
    throw UsageError("--format must be png or jpeg");
  }
  if (a.jpeg_quality < 1 || a.jpeg_quality > 100) throw UsageError("--jpeg-quality must be 1..100");
  wopts.jpeg_quality = a.jpeg_quality;

  const auto ckpt_path = require_checkpoint(a.checkpoint);
  auto ck = load_checkpoint(ckpt_path);
  auto weights = load_vgg_weights(resolve_vgg(a.vgg, ck), ck.model.config.backbone);

  auto content_files = expand_inputs(a.content);
  auto style_files = expand_inputs(a.style);
  std::vector<Image> contents, styles;
  for (const auto& p : content_files) contents.push_back(read_image(p));
  for (const auto& p : style_files) styles.push_back(read_image(p));

  struct Job {
    size_t c, s;
  };
  std::vector<Job> jobs;
  for (size_t c = 0; c < contents.size(); ++c) {
    for (size_t s = 0; s < styles.size(); ++s) jobs.push_back({c, s});
  }

  const fs::path out_dir = a.output;
  fs::create_directories(out_dir);
  std::atomic<size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  std::vector<fs::path> written(jobs.size());
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto& j = jobs[i];
        auto img = stylize(contents[j.c], styles[j.s], ck.model, weights, a.alpha);
        auto path = out_dir / output_name(content_files[j.c], style_files[j.s], a.alpha, wopts.format);
        write_image(img, path, wopts);
        written[i] = path;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const size_t nthreads = std::min<size_t>(static_cast<size_t>(a.jobs), jobs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& p : written) out << p.string() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string content_dir, style_dir, vgg, checkpoint_dir, log, ld_mode;
  int64_t batch_size = 0, iterations = 0, resize = 0, crop = 0, checkpoint_every = 0;
  uint64_t seed = 0;
  double learning_rate = 0;
  bool enable_ld = true;
  bool no_resume = false;
  std::vector<int64_t> widths;
  double lambda_c = 0, lambda_s = 0, lambda_id1 = 0, lambda_id2 = 0, lambda_cld = 0, lambda_sld = 0;
};

struct TrainOptionHandles {
  CLI::Option *content_dir, *style_dir, *vgg, *checkpoint_dir, *batch_size, *learning_rate,
      *iterations, *resize, *crop, *enable_ld, *ld_mode, *checkpoint_every, *seed, *lambda_c,
      *lambda_s, *lambda_id1, *lambda_id2, *lambda_cld, *lambda_sld, *widths;
};

TrainConfig build_train_config(const TrainArgs& a, const TrainOptionHandles& h) {
  TrainConfig cfg;
  try {
    if (!a.config.empty()) cfg = TrainConfig::load(a.config);
  } catch (const ArgumentError& e) {
    throw UsageError(std::string("config ") + a.config + ": " + e.what());
  }
  auto set = [](CLI::Option* o) { return o->count() > 0; };
  if (set(h.content_dir)) cfg.content_dir = a.content_dir;
  if (set(h.style_dir)) cfg.style_dir = a.style_dir;
  if (set(h.vgg)) cfg.vgg_weights = a.vgg;
  if (cfg.vgg_weights.empty()) cfg.vgg_weights = from_env(kVggEnv);
  if (set(h.checkpoint_dir)) cfg.checkpoint_dir = a.checkpoint_dir;
  if (set(h.batch_size)) cfg.batch_size = a.batch_size;
  if (set(h.learning_rate)) cfg.learning_rate = a.learning_rate;
  if (set(h.iterations)) cfg.iterations = a.iterations;
  if (set(h.resize)) cfg.resize = a.resize;
  if (set(h.crop)) cfg.crop = a.crop;
  if (set(h.enable_ld)) cfg.enable_ld = a.enable_ld;
  if (set(h.checkpoint_every)) cfg.checkpoint_every = a.checkpoint_every;
  if (set(h.seed)) cfg.seed = a.seed;
  if (set(h.lambda_c)) cfg.loss_weights.content = a.lambda_c;
  if (set(h.lambda_s)) cfg.loss_weights.style = a.lambda_s;
  if (set(h.lambda_id1)) cfg.loss_weights.identity_pixel = a.lambda_id1;
  if (set(h.lambda_id2)) cfg.loss_weights.identity_feature = a.lambda_id2;
  if (set(h.lambda_cld)) cfg.loss_weights.ld_content = a.lambda_cld;
  if (set(h.lambda_sld)) cfg.loss_weights.ld_style = a.lambda_sld;
  if (a.no_resume) cfg.resume = false;
  if (set(h.widths)) {
    for (size_t i = 0; i < cfg.backbone.widths.size(); ++i) cfg.backbone.widths[i] = a.widths[i];
  }
  try {
    if (set(h.ld_mode)) cfg.ld_mode = parse_ld_mode(a.ld_mode);
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  if (cfg.content_dir.empty()) throw UsageError("--content-dir is required");
  if (cfg.style_dir.empty()) throw UsageError("--style-dir is required");
  if (cfg.vgg_weights.empty()) {
    throw UsageError(std::string("--vgg is required (or set ") + kVggEnv + ")");
  }
  return cfg;
}

int cmd_train(const TrainConfig& cfg, const std::string& log_path, std::ostream& out,
              std::ostream& err) {
  std::ofstream log_file;
  std::ostream* log = &out;
  if (!log_path.empty()) {
    log_file.open(log_path, std::ios::app);
    if (!log_file) throw LoadError("cannot open log file " + log_path);
    log = &log_file;
  }
  TrainHooks hooks;
  hooks.log = log;
  hooks.warnings = &err;
  auto result = train(cfg, hooks);
  out << result.checkpoint_path.string() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint, content_dir, style_dir, report, vgg, ssim_channels = "luminance";
  int64_t num_pairs = 0;
  int64_t resolution = 512;
  uint64_t seed = 0;
  int warmup = 2;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.num_pairs < 1) throw UsageError("--num-pairs must be >= 1");
  if (a.resolution < kMinEncodeSide) throw UsageError("--resolution must be >= 16");
  if (a.warmup < 0) throw UsageError("--warmup must be >= 0");
  EvalOptions opts;
  opts.num_pairs = a.num_pairs;
  opts.resolution = a.resolution;
  opts.seed = a.seed;
  opts.warmup = a.warmup;
  if (a.ssim_channels == "luminance") {
    opts.ssim.channels = SsimChannels::luminance;
  } else if (a.ssim_channels == "rgb") {
    opts.ssim.channels = SsimChannels::rgb_mean;
  } else {
    throw UsageError("--ssim-channels must be luminance or rgb");
  }

  const auto ckpt_path = require_checkpoint(a.checkpoint);
  auto ck = load_checkpoint(ckpt_path);
  auto weights = load_vgg_weights(resolve_vgg(a.vgg, ck), ck.model.config.backbone);
  auto report = run_eval(ck.model, weights, a.content_dir, a.style_dir, opts);
  report.checkpoint = ckpt_path.string();
  report.write(a.report);
  out << summary_table(report) << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------

struct SynthArgs {
  std::string output;
  uint64_t seed = 0;
  std::vector<int64_t> widths;
};

int cmd_synth_vgg(const SynthArgs& a, std::ostream& out) {
  BackboneSpec spec = BackboneSpec::vgg19();
  if (!a.widths.empty()) {
    if (a.widths.size() != spec.widths.size()) throw UsageError("--widths takes exactly 5 values");
    for (size_t i = 0; i < spec.widths.size(); ++i) {
      if (a.widths[i] < 1) throw UsageError("--widths must be positive");
      spec.widths[i] = a.widths[i];
    }
  }
  save_vgg_weights(synthesize_vgg_weights(spec, a.seed), a.output);
  out << a.output << "\n";
  return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arbitrary style transfer with affinity-enhanced attention", "aeanet"};
  app.require_subcommand(1);

  StylizeArgs sa;
  auto* stylize_cmd = app.add_subcommand("stylize", "Stylize images or folders of images");
  stylize_cmd->add_option("--content", sa.content, "Content image or directory")->required();
  stylize_cmd->add_option("--style", sa.style, "Style image or directory")->required();
  stylize_cmd->add_option("--checkpoint", sa.checkpoint,
                          std::string("Model checkpoint (default: $") + kCheckpointEnv + ")");
  stylize_cmd->add_option("--alpha", sa.alpha, "Content-style trade-off in [0, 1]")
      ->capture_default_str();
  stylize_cmd->add_option("--output", sa.output, "Output directory")->required();
  stylize_cmd->add_option("--vgg", sa.vgg, std::string("VGG-19 weights (default: $") + kVggEnv + ")");
  stylize_cmd->add_option("--format", sa.format, "png or jpeg")->capture_default_str();
  stylize_cmd->add_option("--jpeg-quality", sa.jpeg_quality, "JPEG quality 1..100")
      ->capture_default_str();
  stylize_cmd->add_option("--jobs", sa.jobs, "Pairs processed concurrently")->capture_default_str();

  TrainArgs ta;
  TrainOptionHandles th{};
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", ta.config, "JSON config file");
  th.content_dir = train_cmd->add_option("--content-dir", ta.content_dir, "Content image directory");
  th.style_dir = train_cmd->add_option("--style-dir", ta.style_dir, "Style image directory");
  th.vgg = train_cmd->add_option("--vgg", ta.vgg, "VGG-19 weights");
  th.checkpoint_dir = train_cmd->add_option("--checkpoint-dir", ta.checkpoint_dir, "Checkpoint directory");
  th.batch_size = train_cmd->add_option("--batch-size", ta.batch_size);
  th.learning_rate = train_cmd->add_option("--learning-rate", ta.learning_rate);
  th.iterations = train_cmd->add_option("--iterations", ta.iterations);
  th.resize = train_cmd->add_option("--resize", ta.resize, "Shorter side before cropping");
  th.crop = train_cmd->add_option("--crop", ta.crop, "Square crop size");
  th.enable_ld = train_cmd->add_option("--enable-ld", ta.enable_ld, "Local-dissimilarity losses (true/false)");
  th.ld_mode = train_cmd->add_option("--ld-mode", ta.ld_mode, "extra_passes or permuted_outputs");
  th.checkpoint_every = train_cmd->add_option("--checkpoint-every", ta.checkpoint_every);
  th.seed = train_cmd->add_option("--seed", ta.seed);
  th.lambda_c = train_cmd->add_option("--lambda-c", ta.lambda_c);
  th.lambda_s = train_cmd->add_option("--lambda-s", ta.lambda_s);
  th.lambda_id1 = train_cmd->add_option("--lambda-id1", ta.lambda_id1);
  th.lambda_id2 = train_cmd->add_option("--lambda-id2", ta.lambda_id2);
  th.lambda_cld = train_cmd->add_option("--lambda-cld", ta.lambda_cld);
  th.lambda_sld = train_cmd->add_option("--lambda-sld", ta.lambda_sld);
  th.widths = train_cmd->add_option("--backbone-widths", ta.widths,
                                    "Encoder stage widths (must match --vgg)")
                  ->expected(5);
  train_cmd->add_flag("--no-resume", ta.no_resume, "Ignore an existing latest checkpoint");
  train_cmd->add_option("--log", ta.log, "Append per-iteration log lines here instead of stdout");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Quantitative evaluation");
  eval_cmd->add_option("--checkpoint", ea.checkpoint,
                       std::string("Model checkpoint (default: $") + kCheckpointEnv + ")");
  eval_cmd->add_option("--content-dir", ea.content_dir)->required();
  eval_cmd->add_option("--style-dir", ea.style_dir)->required();
  eval_cmd->add_option("--num-pairs", ea.num_pairs)->required();
  eval_cmd->add_option("--report", ea.report, "Report file (JSON)")->required();
  eval_cmd->add_option("--resolution", ea.resolution)->capture_default_str();
  eval_cmd->add_option("--seed", ea.seed)->capture_default_str();
  eval_cmd->add_option("--warmup", ea.warmup, "Untimed calls before timing")->capture_default_str();
  eval_cmd->add_option("--vgg", ea.vgg, std::string("VGG-19 weights (default: $") + kVggEnv + ")");
  eval_cmd->add_option("--ssim-channels", ea.ssim_channels, "luminance or rgb")->capture_default_str();

  SynthArgs ya;
  auto* synth_cmd = app.add_subcommand(
      "synth-vgg", "Write randomly initialised encoder weights (for tests and demos, not for quality)");
  synth_cmd->add_option("--output", ya.output, "Output .safetensors")->required();
  synth_cmd->add_option("--seed", ya.seed)->capture_default_str();
  synth_cmd->add_option("--widths", ya.widths, "Channel widths of the five stages")->expected(5);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*stylize_cmd) return cmd_stylize(sa, out);
    if (*train_cmd) return cmd_train(build_train_config(ta, th), ta.log, out, err);
    if (*eval_cmd) return cmd_eval(ea, out);
    if (*synth_cmd) return cmd_synth_vgg(ya, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace aeanet::cli
