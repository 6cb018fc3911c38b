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
#include <map>
#include <string>

#include <torch/types.h>

namespace aeanet {

using TensorMap = std::map<std::string, torch::Tensor>;
using Metadata = std::map<std::string, std::string>;

/// Contents of one safetensors file: named tensors plus the free-form
/// string metadata stored under the "__metadata__" header key.
struct NamedTensorFile {
  TensorMap tensors;
  Metadata metadata;
};

/// Writes `tensors` as a safetensors file (F32, F64 and I64 payloads).
/// The file is written to a sibling temporary and renamed into place, so a
/// failed write never leaves a partial file at `path`.
void write_safetensors(const std::filesystem::path& path,
                       const TensorMap& tensors,
                       const Metadata& metadata = {});

/// Reads a safetensors file. Throws LoadError if the file cannot be opened
/// and SchemaError if the header or payload is malformed or truncated.
NamedTensorFile read_safetensors(const std::filesystem::path& path);

/// Renames `tmp` over `dst`; removes `tmp` and rethrows on failure.
void commit_file(const std::filesystem::path& tmp,
                 const std::filesystem::path& dst);

/// Sibling temporary path used for write-then-rename.
std::filesystem::path temp_path_for(const std::filesystem::path& dst);

} // namespace aeanet
