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

#ifndef PSSL_DATABASE_H_
#define PSSL_DATABASE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "pssl/domain.h"

namespace pssl {

// Label value for records whose label is withheld.
inline constexpr std::int8_t kUnlabeled = -1;

struct LabeledExample {
  Point x = 0;
  std::int8_t y = kUnlabeled;  // 0, 1, or kUnlabeled

  friend bool operator==(const LabeledExample&, const LabeledExample&) =
      default;
};

// Segment boundaries of a partially labeled database. Records in
// [0, labeled_end) carry labels; [labeled_end, expand_end) is the pool a
// relabeling pass will label; [expand_end, size) passes through untouched.
struct Segmentation {
  std::size_t labeled_end = 0;
  std::size_t expand_end = 0;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

struct PartiallyLabeledDatabase {
  std::vector<LabeledExample> records;
  std::optional<Segmentation> segments;

  friend bool operator==(const PartiallyLabeledDatabase&,
                         const PartiallyLabeledDatabase&) = default;
};

// Throws InvalidInputError unless segments are present, ordered, within
// bounds, labels in [0, labeled_end) are 0/1, and later labels are withheld.
void ValidateSegments(const PartiallyLabeledDatabase& db);

// Convenience constructors used throughout learners and tests.
PartiallyLabeledDatabase MakeSegmented(std::vector<LabeledExample> labeled,
                                       std::vector<Point> expandable,
                                       std::vector<Point> passthrough);

}  // namespace pssl

#endif  // PSSL_DATABASE_H_
