// Copyright 2026 The tsnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace tsnn {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Weight matrices are row-major: one row per output neuron (or per output
// channel for convolutions), which keeps each neuron's fan-in contiguous.
template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A neuron that never fires carries +infinity in the z-domain. Consumers that
// need a finite number (loss, classification, pooling) substitute z_max.
template <typename Scalar = double>
constexpr Scalar no_spike() {
  return Scalar(std::numeric_limits<double>::infinity());
}
inline constexpr double kNoSpike = std::numeric_limits<double>::infinity();

inline constexpr double kDefaultZMax = 1e30;
inline constexpr double kDefaultEpsilonDenom = 1e-10;

// The templated kernels call these unqualified, so a scalar type outside std
// only needs overloads here.
using std::abs;
using std::isfinite;
using std::isnan;
using std::log;

#ifdef __SIZEOF_FLOAT128__
inline bool isfinite(__float128 x) { return __builtin_isfinite(x); }
inline bool isnan(__float128 x) { return __builtin_isnan(x); }
__float128 log(__float128 x);
#endif

template <typename Scalar>
constexpr bool is_spike(Scalar z) {
  return isfinite(z);
}

// Height x width x channels; flattened row-major with channels innermost.
struct Shape {
  int height = 1;
  int width = 1;
  int channels = 1;

  constexpr int size() const { return height * width * channels; }
  constexpr int index(int y, int x, int c) const {
    return (y * width + x) * channels + c;
  }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class KindError : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  enum class Code { kBadMagic, kUnsupportedVersion, kTruncated, kChecksum, kInvalid };

  FormatError(Code code, const std::string& message)
      : Error(message), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

}  // namespace tsnn
