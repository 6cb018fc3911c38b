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

#include "aeanet/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <torch/torch.h>
#if __has_include(<torch/headeronly/version.h>)
#include <torch/headeronly/version.h>
#endif

#include <json.hpp>

#include "aeanet/errors.hpp"
#include "aeanet/losses.hpp"

namespace aeanet {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

torch::Tensor gaussian_kernel(int size, double sigma) {
  auto x = torch::arange(size, torch::kFloat64) - (size - 1) / 2.0;
  auto g = torch::exp(-(x * x) / (2 * sigma * sigma));
  return g / g.sum();
}

// Valid-window Gaussian filtering of a 1 x 1 x H x W double tensor.
torch::Tensor filter(const torch::Tensor& x, const torch::Tensor& g) {
  const int64_t n = g.size(0);
  auto rows = torch::conv2d(x, g.view({1, 1, 1, n}));
  return torch::conv2d(rows, g.view({1, 1, n, 1}));
}

double ssim_plane(const torch::Tensor& x, const torch::Tensor& y, const SsimOptions& o) {
  auto g = gaussian_kernel(o.window, o.sigma);
  const double c1 = std::pow(o.k1 * o.data_range, 2);
  const double c2 = std::pow(o.k2 * o.data_range, 2);
  auto mx = filter(x, g);
  auto my = filter(y, g);
  auto mxy = mx * my;
  auto sxx = filter(x * x, g) - mx * mx;
  auto syy = filter(y * y, g) - my * my;
  auto sxy = filter(x * y, g) - mxy;
  auto num = (2 * mxy + c1) * (2 * sxy + c2);
  auto den = (mx * mx + my * my + c1) * (sxx + syy + c2);
  return (num / den).mean().item<double>();
}

torch::Tensor luminance(const torch::Tensor& rgb) {
  return (0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]).view({1, 1, rgb.size(1), rgb.size(2)});
}

json pair_to_json(const PairRecord& p) {
  return {{"content", p.content}, {"style", p.style}, {"content_loss", p.content_loss},
          {"style_loss", p.style_loss}, {"ssim", p.ssim}, {"seconds", p.seconds}};
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("eval report field '") + key + "': " + e.what());
  }
}

} // namespace

double ssim(const Image& a, const Image& b, const SsimOptions& options) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw DimensionError("ssim: images differ in size (" + std::to_string(a.height()) + "x" +
                         std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                         std::to_string(b.width()) + ")");
  }
  if (a.height() < options.window || a.width() < options.window) {
    throw DimensionError("ssim: images must be at least " + std::to_string(options.window) +
                         " pixels per side");
  }
  torch::NoGradGuard no_grad;
  auto x = a.tensor().to(torch::kFloat64);
  auto y = b.tensor().to(torch::kFloat64);
  if (options.channels == SsimChannels::luminance) {
    return ssim_plane(luminance(x), luminance(y), options);
  }
  double total = 0;
  for (int64_t c = 0; c < 3; ++c) {
    total += ssim_plane(x[c].view({1, 1, x.size(1), x.size(2)}),
                        y[c].view({1, 1, y.size(1), y.size(2)}), options);
  }
  return total / 3.0;
}

double metric_content(const Image& content, const Image& stylized, const PretrainedWeights& weights) {
  if (content.height() != stylized.height() || content.width() != stylized.width()) {
    throw DimensionError("metric_content: content and stylized images differ in resolution");
  }
  torch::NoGradGuard no_grad;
  return content_loss(encode(content, weights), encode(stylized, weights)).item<double>();
}

double metric_style(const Image& style, const Image& stylized, const PretrainedWeights& weights) {
  torch::NoGradGuard no_grad;
  return style_loss(encode(style, weights), encode(stylized, weights)).item<double>();
}

std::string EvalReport::to_json() const {
  json j;
  j["mean_content_loss"] = mean_content_loss;
  j["mean_style_loss"] = mean_style_loss;
  j["mean_ssim"] = mean_ssim;
  j["mean_time_seconds"] = mean_time_seconds;
  j["num_pairs"] = num_pairs;
  j["resolution"] = resolution;
  j["seed"] = seed;
  j["warmup"] = warmup;
  j["ssim_pairing"] = ssim_pairing;
  j["ssim_channels"] = ssim_channels;
  j["environment"] = environment;
  j["checkpoint"] = checkpoint;
  j["pairs"] = json::array();
  for (const auto& p : pairs) j["pairs"].push_back(pair_to_json(p));
  return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("eval report is not valid JSON: ") + e.what());
  }
  EvalReport r;
  r.mean_content_loss = field<double>(j, "mean_content_loss");
  r.mean_style_loss = field<double>(j, "mean_style_loss");
  r.mean_ssim = field<double>(j, "mean_ssim");
  r.mean_time_seconds = field<double>(j, "mean_time_seconds");
  r.num_pairs = field<int64_t>(j, "num_pairs");
  r.resolution = field<int64_t>(j, "resolution");
  r.seed = field<uint64_t>(j, "seed");
  r.warmup = field<int>(j, "warmup");
  r.ssim_pairing = field<std::string>(j, "ssim_pairing");
  r.ssim_channels = field<std::string>(j, "ssim_channels");
  r.environment = field<std::string>(j, "environment");
  r.checkpoint = field<std::string>(j, "checkpoint");
  for (const auto& p : field<json>(j, "pairs")) {
    r.pairs.push_back({field<std::string>(p, "content"), field<std::string>(p, "style"),
                       field<double>(p, "content_loss"), field<double>(p, "style_loss"),
                       field<double>(p, "ssim"), field<double>(p, "seconds")});
  }
  return r;
}

void EvalReport::write(const fs::path& path) const {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  auto tmp = temp_path_for(path);
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << to_json() << "\n";
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw LoadError("cannot write report " + path.string());
    }
  }
  commit_file(tmp, path);
}

EvalReport EvalReport::read(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open report " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string summary_table(const EvalReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%10s %10s %10s %10s\n%10.4f %10.4f %10.4f %10.4f", "L_c", "L_s",
                "SSIM", "Time/sec", r.mean_content_loss, r.mean_style_loss, r.mean_ssim,
                r.mean_time_seconds);
  return buf;
}

std::string environment_descriptor() {
  std::ostringstream os;
  os << "cpu, threads=" << at::get_num_threads();
#ifdef TORCH_VERSION_MAJOR
  os << ", libtorch " << TORCH_VERSION_MAJOR << "." << TORCH_VERSION_MINOR << "."
     << TORCH_VERSION_PATCH;
#endif
  return os.str();
}

EvalReport evaluate(const Stylizer& stylizer, const PretrainedWeights& weights,
                    const fs::path& content_dir, const fs::path& style_dir,
                    const EvalOptions& options) {
  if (options.num_pairs < 1) throw ArgumentError("num_pairs must be >= 1");
  if (options.resolution < kMinEncodeSide) {
    throw ArgumentError("resolution must be >= " + std::to_string(kMinEncodeSide));
  }
  auto contents = list_images(content_dir);
  auto styles = list_images(style_dir);
  if (contents.empty()) throw DataError("no images in " + content_dir.string());
  if (styles.empty()) throw DataError("no images in " + style_dir.string());

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<size_t> pick_c(0, contents.size() - 1);
  std::uniform_int_distribution<size_t> pick_s(0, styles.size() - 1);

  auto load = [&](const fs::path& p) { return resize(read_image(p), options.resolution, options.resolution); };

  EvalReport report;
  report.num_pairs = options.num_pairs;
  report.resolution = options.resolution;
  report.seed = options.seed;
  report.warmup = options.warmup;
  report.ssim_channels = options.ssim.channels == SsimChannels::luminance ? "luminance" : "rgb_mean";
  report.environment = environment_descriptor();

  bool warmed = false;
  for (int64_t k = 0; k < options.num_pairs; ++k) {
    const auto& cp = contents[pick_c(rng)];
    const auto& sp = styles[pick_s(rng)];
    auto content = load(cp);
    auto style = load(sp);
    if (!warmed) {
      for (int i = 0; i < options.warmup; ++i) (void)stylizer(content, style);
      warmed = true;
    }
    const auto start = std::chrono::steady_clock::now();
    auto out = stylizer(content, style);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    PairRecord rec;
    rec.content = cp.filename().string();
    rec.style = sp.filename().string();
    rec.content_loss = metric_content(content, out, weights);
    rec.style_loss = metric_style(style, out, weights);
    rec.ssim = ssim(out, content, options.ssim);
    rec.seconds = secs;
    report.pairs.push_back(rec);
  }

  const double n = static_cast<double>(report.pairs.size());
  for (const auto& p : report.pairs) {
    report.mean_content_loss += p.content_loss / n;
    report.mean_style_loss += p.style_loss / n;
    report.mean_ssim += p.ssim / n;
    report.mean_time_seconds += p.seconds / n;
  }
  for (double v : {report.mean_content_loss, report.mean_style_loss, report.mean_ssim,
                   report.mean_time_seconds}) {
    if (!std::isfinite(v)) throw NumericError("report", "evaluation produced a non-finite mean");
  }
  return report;
}

EvalReport run_eval(const ModelParams& model, const PretrainedWeights& weights,
                    const fs::path& content_dir, const fs::path& style_dir,
                    const EvalOptions& options) {
  Stylizer stylizer = [&](const Image& c, const Image& s) {
    return stylize(c, s, model, weights, 1.0);
  };
  return evaluate(stylizer, weights, content_dir, style_dir, options);
}

double benchmark_timing(const ModelParams& model, const PretrainedWeights& weights,
                        const fs::path& content_dir, const fs::path& style_dir, int64_t n,
                        int64_t resolution, int warmup) {
  if (n < 1) throw ArgumentError("n must be >= 1");
  auto contents = list_images(content_dir);
  auto styles = list_images(style_dir);
  if (contents.empty() || styles.empty()) throw DataError("timing needs non-empty corpora");
  std::vector<std::pair<Image, Image>> inputs;
  for (int64_t i = 0; i < n; ++i) {
    inputs.emplace_back(
        resize(read_image(contents[static_cast<size_t>(i) % contents.size()]), resolution, resolution),
        resize(read_image(styles[static_cast<size_t>(i) % styles.size()]), resolution, resolution));
  }
  for (int i = 0; i < warmup; ++i) (void)stylize(inputs[0].first, inputs[0].second, model, weights);
  double total = 0;
  for (const auto& [c, s] : inputs) {
    const auto start = std::chrono::steady_clock::now();
    auto out = stylize(c, s, model, weights);
    total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return total / static_cast<double>(n);
}

} // namespace aeanet
