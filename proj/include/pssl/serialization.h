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
//
// Experiment configuration (JSON) and report (CSV/JSON) formats. CSV output
// is deterministic: doubles are rendered in shortest round-trip form and no
// row carries wall-clock data.

#ifndef PSSL_SERIALIZATION_H_
#define PSSL_SERIALIZATION_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pssl/audit.h"
#include "pssl/concepts.h"
#include "pssl/database.h"
#include "pssl/domain.h"
#include "pssl/mechanisms.h"

namespace pssl {

using Json = nlohmann::json;

// Shortest decimal form that round-trips the exact double value.
std::string FormatDouble(double value);

// Parses a JSON file, wrapping I/O and syntax failures in ConfigError.
Json LoadJsonFile(const std::string& path);

// Concept class described by config: family THRESH | POINT | INTERVAL |
// RECT | EXPLICIT | XOR_OF with family-specific fields.
struct ConceptClassSpec {
  std::string family = "THRESH";
  int bits = 1;
  int axes = 1;
  std::vector<std::vector<std::uint8_t>> tables;     // EXPLICIT
  std::shared_ptr<const ConceptClassSpec> base;      // XOR_OF

  static ConceptClassSpec FromJson(const Json& j);
  Json ToJson() const;
  Domain BuildDomain() const;
  ConceptClass Build() const;
};

struct DistributionSpec {
  std::vector<double> weights;  // empty means uniform

  static DistributionSpec FromJson(const Json& j);
  Json ToJson() const;
  Distribution Build(const Domain& domain) const;
};

struct TargetSpec {
  bool random = true;
  std::uint64_t fixed = 0;

  static TargetSpec FromJson(const Json& j);
  Json ToJson() const;
};

struct SweepSpec {
  std::string axis;  // m | n | alpha | epsilon
  std::vector<double> values;

  static SweepSpec FromJson(const Json& j);
  Json ToJson() const;
};

enum class LearnerKind {
  kErm,
  kPrivateSelection,
  kSanitizeSelect,
  kLabelBoost,
  kLabelBoostAgnostic,
  kSubsampleActive,
};

const std::string& LearnerKindName(LearnerKind kind);
LearnerKind ParseLearnerKind(const std::string& name);

const std::string& SamplerName(ScoreSampler sampler);
ScoreSampler ParseSampler(const std::string& name);

struct ExperimentConfig {
  LearnerKind learner = LearnerKind::kErm;
  ConceptClassSpec concept_class;
  DistributionSpec distribution;
  TargetSpec target;
  double alpha = 0.2;
  double beta = 0.2;
  double epsilon = 1.0;
  double delta = 0.0;
  std::uint64_t labeled = 0;
  std::uint64_t total = 0;
  std::uint64_t trials = 1;
  std::uint64_t root_seed = 1;
  // Label-boost fields.
  double scale = 1.0;
  std::uint64_t base_sample_size = 0;
  // Base learner epsilon for wrapped learners (boost, active subsample).
  double base_epsilon = 1.0;
  // Sanitizer output-size multiplier.
  double kappa = 1.0;
  ScoreSampler sampler = ScoreSampler::kGumbelMax;
  // Error level counted as failure; negative means "use alpha".
  double error_threshold = -1.0;
  std::optional<SweepSpec> sweep;

  double ErrorThreshold() const {
    return error_threshold < 0 ? alpha : error_threshold;
  }

  static ExperimentConfig FromJson(const Json& j);
  static ExperimentConfig FromJsonFile(const std::string& path);
  Json ToJson() const;
};

struct AuditConfig {
  std::string mechanism = "randomizedResponse";  // | selection | relabelPass
  std::optional<ConceptClassSpec> concept_class;
  double epsilon = 1.0;
  double delta = 0.0;
  std::uint64_t trials = 100000;
  std::uint64_t root_seed = 1;
  ScoreSampler sampler = ScoreSampler::kGumbelMax;
  PartiallyLabeledDatabase database;
  std::size_t diff_index = 0;
  LabeledExample replacement;
  AuditOptions options;

  static AuditConfig FromJson(const Json& j);
  static AuditConfig FromJsonFile(const std::string& path);
  Json ToJson() const;
};

struct TrialRow {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  // 1.0 by convention when the trial failed outright.
  double err = 0;
  double err_ci = 0;
  std::uint64_t labeled_used = 0;
  std::uint64_t unlabeled_used = 0;
  bool failed = false;
};

struct SweepRow {
  double value = 0;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double failure_fraction = 0;
  double mean_err = 0;
  double mean_labeled_used = 0;
  // Closed-form utility bound where one applies (selection learners);
  // empty cell otherwise.
  std::optional<double> bound;
};

// "# schema=pssl.trials.v1" header plus one row per trial.
void WriteTrialsCsv(std::ostream& os, std::span<const TrialRow> rows);

// "# schema=pssl.sweep.v1" header plus one row per sweep value.
void WriteSweepCsv(std::ostream& os, std::span<const SweepRow> rows);

// "# schema=pssl.audit.v1" header plus a single report row.
void WriteAuditCsv(std::ostream& os, const AuditReport& report);

Json AuditReportJson(const AuditReport& report);

}  // namespace pssl

#endif  // PSSL_SERIALIZATION_H_
