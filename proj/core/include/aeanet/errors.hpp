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

#include <stdexcept>
#include <string>

namespace aeanet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened or read.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its contents do not match the expected schema
/// (missing entries, wrong shapes, truncated payloads).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Tensor shapes or image sizes are incompatible with an operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument is outside its valid domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity is NaN or infinite. `term()` names the offender.
class NumericError : public Error {
 public:
  NumericError(std::string term, const std::string& what)
      : Error(what), term_(std::move(term)) {}
  const std::string& term() const noexcept { return term_; }

 private:
  std::string term_;
};

/// Training or evaluation data is unusable (empty corpus, nothing decodable).
class DataError : public Error {
 public:
  using Error::Error;
};

} // namespace aeanet
