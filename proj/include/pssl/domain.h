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

#ifndef PSSL_DOMAIN_H_
#define PSSL_DOMAIN_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pssl/random.h"

namespace pssl {

// A domain point, encoded as one integer. For a grid domain, the coordinate
// of axis i occupies bits [i*bits_per_axis, (i+1)*bits_per_axis); axis 0 is
// least significant. For a one-axis domain the code is the value itself.
using Point = std::uint64_t;

// Finite discretized domain: `axes` coordinates, each in [0, 2^bits_per_axis).
class Domain {
 public:
  Domain() = default;

  // One axis of 2^bits points, {0, ..., 2^bits - 1}.
  static Domain Bitline(int bits);

  // `axes` coordinates of 2^bits values each.
  static Domain Grid(int bits, int axes);

  int bits_per_axis() const { return bits_per_axis_; }
  int axes() const { return axes_; }
  std::uint64_t axis_size() const { return std::uint64_t{1} << bits_per_axis_; }
  std::uint64_t cardinality() const {
    return std::uint64_t{1} << (bits_per_axis_ * axes_);
  }

  bool Contains(Point p) const { return p < cardinality(); }
  std::uint64_t Coordinate(Point p, int axis) const {
    return (p >> (axis * bits_per_axis_)) & (axis_size() - 1);
  }
  Point Encode(std::span<const std::uint64_t> coords) const;
  std::vector<std::uint64_t> Decode(Point p) const;

  std::string Describe() const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain(int bits, int axes) : bits_per_axis_(bits), axes_(axes) {}

  int bits_per_axis_ = 1;
  int axes_ = 1;
};

// Distribution over the points of a domain: uniform, or an explicit table of
// point weights. Table weights must be nonnegative and sum to 1 within 1e-9.
class Distribution {
 public:
  static Distribution Uniform(const Domain& domain);
  static Distribution Table(const Domain& domain, std::vector<double> weights);

  const Domain& domain() const { return domain_; }
  bool is_uniform() const { return weights_.empty(); }

  double Probability(Point p) const;
  Point Sample(Rng& rng) const;

 private:
  Domain domain_;
  std::vector<double> weights_;  // empty for uniform
  std::vector<double> cdf_;      // cumulative weights, same length
};

}  // namespace pssl

#endif  // PSSL_DOMAIN_H_
