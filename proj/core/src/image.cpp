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

#include "aeanet/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <torch/torch.h>

#include "aeanet/errors.hpp"
#include "aeanet/tensor_io.hpp"

namespace aeanet {

namespace fs = std::filesystem;

namespace {

// RGB float32 H x W x 3 mat -> 3 x H x W tensor (owning copy).
torch::Tensor mat_to_tensor(const cv::Mat& rgb) {
  cv::Mat contiguous = rgb.isContinuous() ? rgb : rgb.clone();
  auto hwc = torch::from_blob(contiguous.data, {contiguous.rows, contiguous.cols, 3},
                              torch::kFloat32);
  return hwc.permute({2, 0, 1}).contiguous().clone();
}

cv::Mat tensor_to_mat(const torch::Tensor& chw) {
  auto hwc = chw.permute({1, 2, 0}).contiguous();
  cv::Mat view(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)), CV_32FC3,
               hwc.data_ptr<float>());
  return view.clone();
}

} // namespace

Image Image::from_tensor(const torch::Tensor& pixels) {
  auto t = pixels;
  if (t.dim() == 4 && t.size(0) == 1) t = t.squeeze(0);
  if (t.dim() != 3 || t.size(0) != 3) {
    throw DimensionError("image tensor must be 3 x H x W, got " + c10::str(pixels.sizes()));
  }
  if (t.size(1) < 1 || t.size(2) < 1) throw DimensionError("image has an empty dimension");
  t = t.detach().to(torch::kCPU, torch::kFloat32);
  if (torch::isnan(t).any().item<bool>()) {
    throw NumericError("pixels", "image contains NaN values");
  }
  return Image(t.clamp(0.0, 1.0).contiguous());
}

Image read_image(const fs::path& path) {
  if (!fs::exists(path)) throw LoadError("image not found: " + path.string());
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw LoadError("cannot decode image: " + path.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  rgb.convertTo(rgb, CV_32FC3, 1.0 / 255.0);
  return Image::from_tensor(mat_to_tensor(rgb));
}

void write_image(const Image& image, const fs::path& path, const WriteOptions& options) {
  if (image.empty()) throw ArgumentError("cannot write an empty image");
  auto quantized = (image.tensor() * 255.0).round().clamp(0, 255).to(torch::kUInt8);
  auto hwc = quantized.permute({1, 2, 0}).contiguous();
  cv::Mat rgb(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)), CV_8UC3,
              hwc.data_ptr<uint8_t>());
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);

  std::vector<uchar> encoded;
  bool ok = false;
  if (options.format == ImageFormat::png) {
    ok = cv::imencode(".png", bgr, encoded);
  } else {
    ok = cv::imencode(".jpg", bgr, encoded, {cv::IMWRITE_JPEG_QUALITY, options.jpeg_quality});
  }
  if (!ok) throw LoadError("cannot encode image for " + path.string());

  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  auto tmp = temp_path_for(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(encoded.data()),
              static_cast<std::streamsize>(encoded.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw LoadError("write failed for " + path.string());
    }
  }
  commit_file(tmp, path);
}

Image resize(const Image& image, int64_t height, int64_t width) {
  if (height < 1 || width < 1) throw ArgumentError("resize target must be positive");
  if (height == image.height() && width == image.width()) return image;
  cv::Mat src = tensor_to_mat(image.tensor());
  cv::Mat dst;
  bool shrinking = height < image.height() && width < image.width();
  cv::resize(src, dst, cv::Size(static_cast<int>(width), static_cast<int>(height)), 0, 0,
             shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  return Image::from_tensor(mat_to_tensor(dst));
}

torch::Tensor stack_images(std::span<const Image> images) {
  if (images.empty()) throw ArgumentError("cannot stack an empty image list");
  std::vector<torch::Tensor> ts;
  ts.reserve(images.size());
  for (const auto& im : images) {
    if (im.height() != images[0].height() || im.width() != images[0].width()) {
      throw DimensionError("stacked images must share one size");
    }
    ts.push_back(im.tensor());
  }
  return torch::stack(ts);
}

std::vector<Image> unstack_images(const torch::Tensor& batch) {
  if (batch.dim() != 4) throw DimensionError("expected an N x 3 x H x W batch");
  std::vector<Image> out;
  out.reserve(static_cast<size_t>(batch.size(0)));
  for (int64_t i = 0; i < batch.size(0); ++i) out.push_back(Image::from_tensor(batch[i]));
  return out;
}

bool has_image_extension(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" ||
         ext == ".tif" || ext == ".tiff" || ext == ".webp" || ext == ".ppm";
}

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

} // namespace aeanet
