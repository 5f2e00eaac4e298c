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

#ifndef PSSL_LEARNERS_H_
#define PSSL_LEARNERS_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pssl/concepts.h"
#include "pssl/database.h"
#include "pssl/errors.h"
#include "pssl/mechanisms.h"
#include "pssl/sanitizer.h"

namespace pssl {

// Outcome of one learner run. `labeled_used` counts label reads from the
// input database; relabeled or self-generated labels never count.
struct LearnerResult {
  Hypothesis hypothesis;
  std::uint64_t labeled_used = 0;
  std::uint64_t unlabeled_used = 0;
  PrivacyParams declared;
  bool failed = false;
  std::string failure_reason;
};

// A semi-supervised learner: consumes a database whose labeled records form
// a prefix, returns a hypothesis. Implementations are pure functions of
// (database, seed).
class Learner {
 public:
  virtual ~Learner() = default;
  virtual const std::string& name() const = 0;
  virtual PrivacyParams declared() const = 0;
  virtual LearnerResult Run(const PartiallyLabeledDatabase& db,
                            std::uint64_t seed) const = 0;
};

// Length of the maximal labeled prefix; throws InvalidInputError if a
// labeled record follows an unlabeled one.
std::uint64_t LabeledPrefixSize(const PartiallyLabeledDatabase& db);

// Non-private baseline: lowest-index concept minimizing empirical error on a
// fully labeled database. Declared epsilon is infinite.
class ErmLearner : public Learner {
 public:
  explicit ErmLearner(ConceptClass cls,
                      std::uint64_t eval_budget = kDefaultEvalBudget);
  const std::string& name() const override;
  PrivacyParams declared() const override;
  LearnerResult Run(const PartiallyLabeledDatabase& db,
                    std::uint64_t seed) const override;

 private:
  ConceptClass cls_;
  std::uint64_t eval_budget_;
};

// Pure-private proper learner: exponential mechanism over the entire class
// with the agreement score, on a fully labeled database. Declared
// (epsilon, 0)-DP. Serves as the base learner for the label-boosting wrapper.
class PrivateSelectionLearner : public Learner {
 public:
  PrivateSelectionLearner(ConceptClass cls, double epsilon,
                          ScoreSampler sampler = ScoreSampler::kGumbelMax,
                          std::uint64_t eval_budget = kDefaultEvalBudget);
  const std::string& name() const override;
  PrivacyParams declared() const override;
  LearnerResult Run(const PartiallyLabeledDatabase& db,
                    std::uint64_t seed) const override;

 private:
  ConceptClass cls_;
  double epsilon_;
  ScoreSampler sampler_;
  std::uint64_t eval_budget_;
};

// Labeled / total record counts with the generic sanitize-then-select
// learner's shape: factor * (vc * ln(1/a) / (a^3 e) + ln(1/b) / (a e)) and
// factor * (bits * vc * ln(1/a) / (a^3 e) + ln(1/b) / (a e)). `factor` is an
// empirically calibrated stand-in for the hidden constant.
std::uint64_t GenericLearnerLabeledSize(int vc, double alpha, double beta,
                                        double epsilon, double factor);
std::uint64_t GenericLearnerTotalSize(int vc, int domain_bits, double alpha,
                                      double beta, double epsilon,
                                      double factor);

struct SanitizeSelectOptions {
  SanitizerOptions sanitizer;
  ScoreSampler sampler = ScoreSampler::kGumbelMax;
  std::uint64_t eval_budget = kDefaultEvalBudget;
};

// Diagnostics from one sanitize-then-select run.
struct SanitizeSelectDetail {
  LearnerResult result;
  // Accounting that treats the labeled and unlabeled portions as disjoint
  // inputs, each touched by one epsilon-private step.
  PrivacyParams declared_disjoint;
  std::uint64_t support_size = 0;      // |B|
  std::uint64_t hypothesis_count = 0;  // |H|
  SyntheticDatabase synthetic;
};

// Proper private learner over a partially labeled database: privately
// sanitizes the unlabeled portion against the disagreement class, projects
// the class onto the sanitized support to get a small hypothesis set, and
// selects from it with the exponential mechanism on the labeled portion.
// Both the sanitizer and the selection run with the configured epsilon; the
// default declared accounting is the conservative sequential-composition
// total 2 * epsilon, with the disjoint-input single-epsilon accounting
// reported alongside in the detail struct.
class SanitizeSelectLearner : public Learner {
 public:
  SanitizeSelectLearner(ConceptClass cls, double alpha, double beta,
                        double epsilon, SanitizeSelectOptions opts = {});
  const std::string& name() const override;
  PrivacyParams declared() const override;
  LearnerResult Run(const PartiallyLabeledDatabase& db,
                    std::uint64_t seed) const override;
  SanitizeSelectDetail RunDetailed(const PartiallyLabeledDatabase& db,
                                   std::uint64_t seed) const;

 private:
  ConceptClass cls_;
  double alpha_;
  double beta_;
  double epsilon_;
  SanitizeSelectOptions opts_;
};

struct ExpansionOptions {
  ScoreSampler sampler = ScoreSampler::kGumbelMax;
  std::uint64_t eval_budget = kDefaultEvalBudget;
};

// Result of one relabeling pass.
struct ExpansionPassResult {
  PartiallyLabeledDatabase database;  // relabeled S and T, then D unchanged
  Concept chosen;                     // relabeling concept
  std::uint64_t hypothesis_count = 0;
  std::uint64_t support_size = 0;  // distinct points of S and T
};

// One self-training relabeling pass over a segmented database S, T, D: picks
// a concept by the exponential mechanism (epsilon = 1, agreement score on S,
// candidates covering every dichotomy the class realizes on the distinct
// points of S and T), then relabels S and T with it. D passes through
// untouched; record order and count are preserved, and the output's labeled
// segment covers S and T. Wrapping any (eps, delta)-private consumer of the
// output yields a declared (eps + 3, 4e * delta)-private procedure.
ExpansionPassResult LabelExpansionPass(const PartiallyLabeledDatabase& db,
                                       const ConceptClass& cls,
                                       std::uint64_t seed,
                                       const ExpansionOptions& opts = {});

// Size arithmetic for the iterated label-boosting learner. All absolute
// constants scale with `scale`; at scale = 1 the unscaled recurrences hold
// verbatim. Deletion fractions are structural (the per-iteration pool cap
// divided by 100 must equal the loop target's per-n constant) and do not
// scale.
struct LabelBoostSchedule {
  double alpha = 0;
  double beta = 0;
  double scale = 1.0;
  std::uint64_t base_sample_size = 0;  // n of the base learner
  int vc = 1;
  bool agnostic = false;

  double AlphaAt(int i) const;  // alpha / (10 * 2^i)
  double BetaAt(int i) const;   // beta / (4 * 2^i)

  // |S| threshold ending the growth loop: 300 * n * scale, rounded up.
  std::uint64_t LoopTarget() const;
  // Unlabeled pool size below which the run is flagged: 90000 * n * scale.
  std::uint64_t PoolMinimum() const;
  // Per-iteration cap on newly attached points: 30000 * n * scale, floored.
  std::uint64_t IterationCap() const;
  // Advisory labeled floor: (96000 / alpha) * vc * ln(2240 / (alpha beta)),
  // scaled; the agnostic variant divides by alpha^2 instead of alpha.
  std::uint64_t MinLabeled() const;

  // Natural log of the growth allowance
  // beta_i * vc * exp(alpha_i * s / (200 * vc * scale)); the scale divisor
  // in the exponent keeps the loop arithmetic invariant when the absolute
  // size constants shrink.
  double GrowthAllowanceLog(int i, std::uint64_t s) const;
  // The allowance itself, floored and saturated at 2^62.
  std::uint64_t GrowthAllowance(int i, std::uint64_t s) const;
  // Points attached in iteration i at labeled size s:
  // min(IterationCap, GrowthAllowance - s), clamped to >= 0.
  std::uint64_t VAt(int i, std::uint64_t s) const;

  // Records surviving "delete floor(num/den * size) random entries".
  static std::uint64_t KeepAfterDeletion(std::uint64_t size, std::uint64_t num,
                                         std::uint64_t den);
};

struct LabelBoostOptions {
  double scale = 1.0;
  bool agnostic = false;
  ScoreSampler sampler = ScoreSampler::kGumbelMax;
  std::uint64_t eval_budget = kDefaultEvalBudget;
  // Hard stop on growth iterations; the schedule converges in far fewer.
  int max_iterations = 64;
};

struct BoostIterationStat {
  int index = 0;                      // 1-based
  std::uint64_t labeled_before = 0;   // |S| entering the iteration
  std::uint64_t attached = 0;         // v
  std::uint64_t labeled_kept = 0;     // |S| after the 99/100 deletion
  std::uint64_t attached_kept = 0;    // |T| after the 99/100 deletion
  std::uint64_t labeled_after = 0;    // |S| after the merge
  std::uint64_t relabel_concept = 0;  // concept index chosen by the pass
};

struct LabelBoostDetail {
  LearnerResult result;
  std::vector<BoostIterationStat> iterations;
  std::uint64_t pool_consumed = 0;
  std::uint64_t final_kept = 0;  // |S| fed to the i.i.d. resample
  bool labeled_below_minimum = false;
  bool pool_below_minimum = false;
};

// Iterated self-training wrapper around a base learner with sample
// complexity base_sample_size: grows the labeled region by relabeling pool
// points in exponentially increasing batches, interleaving random deletions
// that pay for the relabeling passes' privacy cost, then feeds the base an
// i.i.d. resample of a 1/300 remnant. Declares (1, 41 * base delta)-DP for a
// base declaring epsilon <= 1. Database sizes along the run depend only on
// (alpha, beta, n, m, scale), never on record contents.
class LabelBoostLearner : public Learner {
 public:
  LabelBoostLearner(ConceptClass cls, std::shared_ptr<const Learner> base,
                    std::uint64_t base_sample_size, double alpha, double beta,
                    LabelBoostOptions opts = {});
  const std::string& name() const override;
  PrivacyParams declared() const override;
  LearnerResult Run(const PartiallyLabeledDatabase& db,
                    std::uint64_t seed) const override;
  LabelBoostDetail RunDetailed(const PartiallyLabeledDatabase& db,
                               std::uint64_t seed) const;
  const LabelBoostSchedule& schedule() const { return schedule_; }

 private:
  ConceptClass cls_;
  std::shared_ptr<const Learner> base_;
  LabelBoostSchedule schedule_;
  LabelBoostOptions opts_;
  std::string name_;
};

// Privacy amplification for learners: the wrapped learner takes
// SubsampleInputSize(base_total, base eps, target eps) records, runs the
// base on a uniformly random shuffled base_total-subset with the selected
// labeled records moved to the front (selection is content-independent).
// Declares (target_epsilon, SubsampleDelta(...))-DP.
std::unique_ptr<Learner> BoostPrivacy(std::shared_ptr<const Learner> base,
                                      std::uint64_t base_total,
                                      double target_epsilon);

}  // namespace pssl

#endif  // PSSL_LEARNERS_H_
