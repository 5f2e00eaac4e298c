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

#ifndef PSSL_AUDIT_H_
#define PSSL_AUDIT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pssl/concepts.h"
#include "pssl/database.h"
#include "pssl/errors.h"
#include "pssl/learners.h"
#include "pssl/mechanisms.h"

namespace pssl {

// A pair of equal-length databases differing in exactly one record.
struct NeighborPair {
  PartiallyLabeledDatabase d1;
  PartiallyLabeledDatabase d2;
  std::size_t diff_index = 0;
};

// Order-sensitive 64-bit hash of a database's records and segments, used
// to mix contents into per-database audit seeds.
std::uint64_t HashDatabase(const PartiallyLabeledDatabase& db);

// Builds a neighbor pair by replacing the record at `index`. Throws
// InvalidInputError if the replacement equals the original record (the
// pair would not be neighboring) or the index is out of range. Segments,
// if present, are copied unchanged.
NeighborPair MakeNeighbors(const PartiallyLabeledDatabase& base,
                           std::size_t index, LabeledExample replacement);

struct AuditOptions {
  // Two-sided confidence level for the per-outcome probability intervals.
  double confidence = 0.95;
  // When true (default), outcome probabilities enter the ratio through
  // Clopper-Pearson bounds: the lower bound of the numerator against the
  // upper bound of the denominator. This yields a lower confidence bound
  // on the true privacy loss and never reports infinity. When false, raw
  // empirical frequencies are compared and a positive-vs-zero split
  // reports an infinite estimate.
  bool clopper_pearson = true;
  std::uint64_t min_trials = 100;
  // Scan all nonempty outcome subsets as events instead of singletons
  // only. Restricted to at most 12 distinct outcomes (4095 events);
  // beyond that a ResourceError is thrown.
  bool subset_events = false;
};

struct OutcomeCount {
  std::int64_t outcome = 0;
  std::uint64_t count1 = 0;
  std::uint64_t count2 = 0;
};

struct AuditReport {
  double epsilon_hat = 0.0;
  // Raw mode only: some outcome had positive frequency on one side and
  // zero on the other (after the delta credit). epsilon_hat is meaningless
  // when set.
  bool infinite = false;
  double delta = 0.0;
  std::uint64_t trials = 0;
  // Outcome attaining the maximum likelihood ratio (for subset events,
  // one member of the maximizing event).
  std::int64_t witness_outcome = 0;
  std::uint64_t distinct_outcomes = 0;
  // Histogram pair, ordered by outcome; each side sums to `trials`.
  std::vector<OutcomeCount> outcome_counts;
  std::string mechanism;
  std::uint64_t seed = 0;
  double confidence = 0.95;
};

// Empirical epsilon estimate for `mech` on a neighbor pair: runs `trials`
// seeded executions on each database, counts outcome frequencies, and for
// every singleton outcome o and both directions computes
//   ln((Pr_lower[M(d)=o] - delta)+ / Pr_upper[M(d')=o]),
// reporting the maximum, floored at zero. Per-database seeds mix the
// record contents into `seed`, so identical databases produce identical
// runs (estimate exactly zero) and swapping d1/d2 leaves the estimate
// unchanged.
AuditReport EstimateEpsilon(const Mechanism& mech, const NeighborPair& pair,
                            double delta, std::uint64_t trials,
                            std::uint64_t seed, const AuditOptions& opts = {});

// Exponential-mechanism selection over the whole class, scored by label
// agreement on a fully labeled database; outcome is the chosen concept
// index. Declares (epsilon, 0).
std::unique_ptr<Mechanism> MakeSelectionMechanism(
    ConceptClass cls, double epsilon,
    ScoreSampler sampler = ScoreSampler::kGumbelMax,
    std::uint64_t eval_budget = kDefaultEvalBudget);

// The relabeling pass as an auditable mechanism: input must carry
// segments; the outcome is the index of the concept the pass selects to
// relabel the first two segments. A continuation that ignores its input
// contributes no privacy loss of its own, so the declared cost is the
// pass's (0 + 3, 4e*0) = (3, 0) for neighbors anywhere in the input.
std::unique_ptr<Mechanism> MakeRelabelPassMechanism(
    ConceptClass cls, const ExpansionOptions& opts = {});

// Wraps a learner as an auditable mechanism. The outcome is a hash of the
// output hypothesis (its concept index when proper, otherwise its truth
// table over the domain). Declares whatever the learner declares.
std::unique_ptr<Mechanism> MakeLearnerMechanism(
    std::shared_ptr<const Learner> learner);

}  // namespace pssl

#endif  // PSSL_AUDIT_H_
