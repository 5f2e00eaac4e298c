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

#include "pssl/domain.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pssl/database.h"
#include "pssl/errors.h"

namespace pssl {

Domain Domain::Bitline(int bits) { return Grid(bits, 1); }

Domain Domain::Grid(int bits, int axes) {
  if (bits < 1 || axes < 1 || bits * axes > 62) {
    throw InvalidInputError("Domain: need bits >= 1, axes >= 1, bits*axes <= 62");
  }
  return Domain(bits, axes);
}

Point Domain::Encode(std::span<const std::uint64_t> coords) const {
  if (static_cast<int>(coords.size()) != axes_) {
    throw InvalidInputError("Domain::Encode: coordinate count mismatch");
  }
  Point p = 0;
  for (int i = axes_ - 1; i >= 0; --i) {
    if (coords[i] >= axis_size()) {
      throw InvalidInputError("Domain::Encode: coordinate out of range");
    }
    p = (p << bits_per_axis_) | coords[i];
  }
  return p;
}

std::vector<std::uint64_t> Domain::Decode(Point p) const {
  if (!Contains(p)) throw InvalidInputError("Domain::Decode: point out of range");
  std::vector<std::uint64_t> coords(axes_);
  for (int i = 0; i < axes_; ++i) coords[i] = Coordinate(p, i);
  return coords;
}

std::string Domain::Describe() const {
  if (axes_ == 1) return "bitline(" + std::to_string(bits_per_axis_) + ")";
  return "grid(" + std::to_string(bits_per_axis_) + "," +
         std::to_string(axes_) + ")";
}

Distribution Distribution::Uniform(const Domain& domain) {
  Distribution d;
  d.domain_ = domain;
  return d;
}

Distribution Distribution::Table(const Domain& domain,
                                 std::vector<double> weights) {
  if (weights.size() != domain.cardinality()) {
    throw InvalidInputError("Distribution::Table: weight count must equal domain size");
  }
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw InvalidInputError("Distribution::Table: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidInputError("Distribution::Table: weights must sum to 1 within 1e-9");
  }
  Distribution d;
  d.domain_ = domain;
  d.cdf_.resize(weights.size());
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    d.cdf_[i] = acc;
  }
  d.cdf_.back() = 1.0;
  d.weights_ = std::move(weights);
  return d;
}

double Distribution::Probability(Point p) const {
  if (!domain_.Contains(p)) {
    throw InvalidInputError("Distribution::Probability: point outside domain");
  }
  if (is_uniform()) return 1.0 / static_cast<double>(domain_.cardinality());
  return weights_[p];
}

Point Distribution::Sample(Rng& rng) const {
  if (is_uniform()) return rng.NextBelow(domain_.cardinality());
  const double u = rng.NextDouble();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<Point>(std::min<std::ptrdiff_t>(
      it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

void ValidateSegments(const PartiallyLabeledDatabase& db) {
  if (!db.segments.has_value()) {
    throw InvalidInputError("database: segmentation required");
  }
  const Segmentation& s = *db.segments;
  if (s.labeled_end > s.expand_end || s.expand_end > db.records.size()) {
    throw InvalidInputError("database: segment bounds out of order");
  }
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    const std::int8_t y = db.records[i].y;
    if (i < s.labeled_end) {
      if (y != 0 && y != 1) {
        throw InvalidInputError("database: labeled prefix contains a withheld label");
      }
    } else if (y != kUnlabeled) {
      throw InvalidInputError("database: label present past the labeled prefix");
    }
  }
}

PartiallyLabeledDatabase MakeSegmented(std::vector<LabeledExample> labeled,
                                       std::vector<Point> expandable,
                                       std::vector<Point> passthrough) {
  PartiallyLabeledDatabase db;
  db.records = std::move(labeled);
  const std::size_t labeled_end = db.records.size();
  for (Point p : expandable) db.records.push_back({p, kUnlabeled});
  const std::size_t expand_end = db.records.size();
  for (Point p : passthrough) db.records.push_back({p, kUnlabeled});
  db.segments = Segmentation{labeled_end, expand_end};
  return db;
}

}  // namespace pssl
