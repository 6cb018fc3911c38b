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

#include "aeanet/tensor_io.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <torch/torch.h>

#include <json.hpp>

#include "aeanet/errors.hpp"

namespace aeanet {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct DtypeInfo {
  const char* name;
  torch::ScalarType type;
  size_t size;
};

constexpr DtypeInfo kDtypes[] = {
    {"F32", torch::kFloat32, 4},
    {"F64", torch::kFloat64, 8},
    {"I64", torch::kInt64, 8},
};

const DtypeInfo& dtype_for(torch::ScalarType t, const std::string& name) {
  for (const auto& d : kDtypes) {
    if (d.type == t) return d;
  }
  throw ArgumentError("tensor '" + name + "' has unsupported dtype " +
                      std::string(c10::toString(t)));
}

const DtypeInfo* dtype_for(const std::string& s) {
  for (const auto& d : kDtypes) {
    if (s == d.name) return &d;
  }
  return nullptr;
}

void put_u64_le(char* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

uint64_t get_u64_le(const unsigned char* in) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

} // namespace

fs::path temp_path_for(const fs::path& dst) {
  static std::atomic<uint64_t> counter{0};
  auto name = dst.filename().string() + ".tmp-" + std::to_string(::getpid()) +
              "-" + std::to_string(counter++);
  return dst.parent_path() / name;
}

void commit_file(const fs::path& tmp, const fs::path& dst) {
  std::error_code ec;
  fs::rename(tmp, dst, ec);
  if (ec) {
    fs::remove(tmp);
    throw LoadError("cannot move " + tmp.string() + " to " + dst.string() +
                    ": " + ec.message());
  }
}

void write_safetensors(const fs::path& path, const TensorMap& tensors,
                       const Metadata& metadata) {
  json header = json::object();
  if (!metadata.empty()) header["__metadata__"] = metadata;

  std::vector<torch::Tensor> payloads;
  uint64_t offset = 0;
  for (const auto& [name, tensor] : tensors) {
    if (name == "__metadata__") throw ArgumentError("reserved tensor name __metadata__");
    const auto& info = dtype_for(tensor.scalar_type(), name);
    auto cpu = tensor.detach().to(torch::kCPU).contiguous();
    uint64_t bytes = static_cast<uint64_t>(cpu.numel()) * info.size;
    header[name] = {{"dtype", info.name},
                    {"shape", cpu.sizes().vec()},
                    {"data_offsets", {offset, offset + bytes}}};
    offset += bytes;
    payloads.push_back(std::move(cpu));
  }

  std::string text = header.dump();
  // Pad so the data section starts 8-byte aligned.
  while ((8 + text.size()) % 8 != 0) text.push_back(' ');

  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  auto tmp = temp_path_for(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot open " + tmp.string() + " for writing");
    char len[8];
    put_u64_le(len, text.size());
    out.write(len, 8);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& p : payloads) {
      out.write(static_cast<const char*>(p.data_ptr()),
                static_cast<std::streamsize>(p.numel() * p.element_size()));
    }
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw LoadError("write failed for " + path.string());
    }
  }
  commit_file(tmp, path);
}

NamedTensorFile read_safetensors(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const auto where = path.string() + ": ";
  if (bytes.size() < 8) throw SchemaError(where + "truncated header length");
  uint64_t header_len = get_u64_le(bytes.data());
  if (header_len > bytes.size() - 8) throw SchemaError(where + "truncated header");

  json header;
  try {
    header = json::parse(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const json::exception& e) {
    throw SchemaError(where + "malformed header: " + e.what());
  }
  if (!header.is_object()) throw SchemaError(where + "header is not an object");

  const unsigned char* data = bytes.data() + 8 + header_len;
  const uint64_t data_len = bytes.size() - 8 - header_len;

  NamedTensorFile file;
  for (const auto& [name, entry] : header.items()) {
    if (name == "__metadata__") {
      if (!entry.is_object()) throw SchemaError(where + "__metadata__ is not an object");
      for (const auto& [k, v] : entry.items()) {
        if (!v.is_string()) throw SchemaError(where + "metadata '" + k + "' is not a string");
        file.metadata[k] = v.get<std::string>();
      }
      continue;
    }
    try {
      const auto* info = dtype_for(entry.at("dtype").get<std::string>());
      if (info == nullptr) throw SchemaError(where + "'" + name + "' has unsupported dtype");
      auto shape = entry.at("shape").get<std::vector<int64_t>>();
      auto offsets = entry.at("data_offsets").get<std::vector<uint64_t>>();
      if (offsets.size() != 2 || offsets[0] > offsets[1] || offsets[1] > data_len) {
        throw SchemaError(where + "'" + name + "' payload out of bounds (truncated file?)");
      }
      uint64_t numel = 1;
      for (auto d : shape) {
        if (d < 0) throw SchemaError(where + "'" + name + "' has a negative dimension");
        numel *= static_cast<uint64_t>(d);
      }
      if (offsets[1] - offsets[0] != numel * info->size) {
        throw SchemaError(where + "'" + name + "' payload size does not match its shape");
      }
      auto t = torch::empty(shape, torch::TensorOptions().dtype(info->type));
      if (numel > 0) std::memcpy(t.data_ptr(), data + offsets[0], numel * info->size);
      file.tensors.emplace(name, std::move(t));
    } catch (const json::exception& e) {
      throw SchemaError(where + "bad entry '" + name + "': " + e.what());
    }
  }
  return file;
}

} // namespace aeanet
