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

#include <filesystem>
#include <span>
#include <vector>

#include <torch/types.h>

namespace aeanet {

/// An RGB image stored as a float32 tensor of shape 3 x H x W with values in
/// [0, 1]. Construction clamps and validates; an Image is always well formed.
class Image {
 public:
  Image() = default;

  /// Accepts 3 x H x W or 1 x 3 x H x W. Values are clamped into [0, 1].
  /// Throws DimensionError for any other shape and NumericError for NaN.
  static Image from_tensor(const torch::Tensor& pixels);

  int64_t height() const { return pixels_.defined() ? pixels_.size(1) : 0; }
  int64_t width() const { return pixels_.defined() ? pixels_.size(2) : 0; }
  bool empty() const { return !pixels_.defined(); }

  const torch::Tensor& tensor() const { return pixels_; }
  /// 1 x 3 x H x W view for batched operations.
  torch::Tensor batch() const { return pixels_.unsqueeze(0); }

 private:
  explicit Image(torch::Tensor pixels) : pixels_(std::move(pixels)) {}
  torch::Tensor pixels_;
};

enum class ImageFormat { png, jpeg };

struct WriteOptions {
  ImageFormat format = ImageFormat::png;
  int jpeg_quality = 95;
};

/// Decodes an image file (anything OpenCV can read). Grayscale is expanded to
/// RGB and alpha is dropped. Throws LoadError when the file is missing or
/// cannot be decoded.
Image read_image(const std::filesystem::path& path);

/// Quantizes to 8 bits and writes atomically (temporary file + rename).
void write_image(const Image& image, const std::filesystem::path& path,
                 const WriteOptions& options = {});

/// Resizes to exactly height x width (area averaging when shrinking,
/// bilinear when enlarging).
Image resize(const Image& image, int64_t height, int64_t width);

/// Stacks same-sized images into an N x 3 x H x W tensor.
torch::Tensor stack_images(std::span<const Image> images);

/// Splits an N x 3 x H x W tensor into clamped Images.
std::vector<Image> unstack_images(const torch::Tensor& batch);

/// True for file extensions read_image is expected to decode.
bool has_image_extension(const std::filesystem::path& path);

/// Image files directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

} // namespace aeanet
