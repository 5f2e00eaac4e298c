// Copyright 2026 The PSSL Authors
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

#ifndef PSSL_FRACTION_H_
#define PSSL_FRACTION_H_

#include <boost/rational.hpp>

namespace pssl {

// Exact rational counts. Empirical error rates and counting-query values are
// kept as fractions so that equality tests and threshold comparisons never
// depend on floating-point rounding.
using Fraction = boost::rational<long long>;

inline double ToDouble(const Fraction& f) {
  return boost::rational_cast<double>(f);
}

}  // namespace pssl

#endif  // PSSL_FRACTION_H_
