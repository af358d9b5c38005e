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


// Reference precision for finite-difference gradient checks. Quad precision
// keeps the rounding noise of central differences far below any gradient the
// double-precision backward pass can resolve.

#pragma once

#include <limits>

#include <Eigen/Core>

#include "tsnn/common.hpp"

#ifdef TSNN_HAVE_QUADMATH

namespace Eigen {

template <>
struct NumTraits<__float128> : GenericNumTraits<__float128> {
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 0,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };
  using Real = __float128;
  using NonInteger = __float128;
  using Literal = __float128;
  using Nested = __float128;

  static Real epsilon() { return Real(1) / (Real(1ULL << 56) * Real(1ULL << 56)); }
  static Real dummy_precision() { return Real(1e-30); }
  static Real highest() { return std::numeric_limits<long double>::max(); }
  static Real lowest() { return -std::numeric_limits<long double>::max(); }
  static int digits10() { return 33; }
  static Real infinity() { return __builtin_inff128(); }
  static Real quiet_NaN() { return __builtin_nanf128(""); }
};

}  // namespace Eigen

namespace tsnn::internal {
using Extended = __float128;
}

#else

namespace tsnn::internal {
using Extended = long double;
}

#endif
