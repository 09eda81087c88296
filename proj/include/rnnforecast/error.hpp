/*
 * Copyright (c) rnnforecast contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
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

namespace rnnforecast {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, dimension mismatch, or out-of-range parameter.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message names the offending row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity reached a gradient or a weight; the run is aborted.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot be normalized (for example a constant coordinate).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver stopped at its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Invalid experiment configuration. The message lists every violation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rnnforecast
