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

#include "pssl/audit.h"

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "pssl/random.h"

namespace pssl {
namespace {

TEST(HashDatabaseTest, SensitiveToRecordsAndSegments) {
  PartiallyLabeledDatabase a;
  a.records = {{0, 1}, {1, 0}};
  PartiallyLabeledDatabase b = a;
  EXPECT_EQ(HashDatabase(a), HashDatabase(b));
  b.records[1].y = 1;
  EXPECT_NE(HashDatabase(a), HashDatabase(b));

  PartiallyLabeledDatabase swapped;
  swapped.records = {{1, 0}, {0, 1}};
  EXPECT_NE(HashDatabase(a), HashDatabase(swapped));

  PartiallyLabeledDatabase segmented = a;
  segmented.segments = Segmentation{2, 2};
  EXPECT_NE(HashDatabase(a), HashDatabase(segmented));
}

TEST(MakeNeighborsTest, ReplacesExactlyOneRecord) {
  PartiallyLabeledDatabase base;
  base.records = {{0, 1}, {1, 0}, {2, 1}};
  const NeighborPair pair = MakeNeighbors(base, 1, {3, 1});
  EXPECT_EQ(pair.d1.records, base.records);
  EXPECT_EQ(pair.d2.records[1], (LabeledExample{3, 1}));
  EXPECT_EQ(pair.d2.records[0], base.records[0]);
  EXPECT_EQ(pair.diff_index, 1u);
  EXPECT_THROW(MakeNeighbors(base, 1, {1, 0}), InvalidInputError);
  EXPECT_THROW(MakeNeighbors(base, 3, {0, 0}), InvalidInputError);
}

NeighborPair RandomizedResponsePair() {
  PartiallyLabeledDatabase base;
  base.records = {{0, 1}};
  return MakeNeighbors(base, 0, {0, 0});
}

TEST(EstimateEpsilonTest, RandomizedResponseNearDeclaredEpsilon) {
  // True loss is exactly 1 and the interval-based estimate concentrates
  // just below it: around ln(0.728 / 0.272) = 0.985 at 1e5 trials.
  const auto mech = MakeRandomizedResponse(1.0);
  const AuditReport report =
      EstimateEpsilon(*mech, RandomizedResponsePair(), 0.0, 100000, 21);
  EXPECT_FALSE(report.infinite);
  EXPECT_GE(report.epsilon_hat, 0.9);
  EXPECT_LE(report.epsilon_hat, 1.02);
  EXPECT_EQ(report.trials, 100000u);
  EXPECT_EQ(report.distinct_outcomes, 2u);
  std::uint64_t sum1 = 0;
  std::uint64_t sum2 = 0;
  for (const OutcomeCount& oc : report.outcome_counts) {
    sum1 += oc.count1;
    sum2 += oc.count2;
  }
  EXPECT_EQ(sum1, 100000u);
  EXPECT_EQ(sum2, 100000u);
  EXPECT_EQ(report.mechanism, "randomizedResponse");
}

TEST(EstimateEpsilonTest, DeltaCreditLowersTheEstimate) {
  const auto mech = MakeRandomizedResponse(1.0);
  const NeighborPair pair = RandomizedResponsePair();
  // ln((0.728 - 0.2) / 0.272) = 0.66.
  const AuditReport some = EstimateEpsilon(*mech, pair, 0.2, 100000, 21);
  EXPECT_GE(some.epsilon_hat, 0.55);
  EXPECT_LE(some.epsilon_hat, 0.75);
  // A delta of 0.5 swallows the whole likelihood gap.
  const AuditReport all = EstimateEpsilon(*mech, pair, 0.5, 100000, 21);
  EXPECT_DOUBLE_EQ(all.epsilon_hat, 0.0);
}

TEST(EstimateEpsilonTest, IdenticalDatabasesGiveExactZero) {
  const auto mech = MakeRandomizedResponse(1.0);
  NeighborPair same;
  same.d1.records = {{0, 1}};
  same.d2 = same.d1;
  const AuditReport report = EstimateEpsilon(*mech, same, 0.0, 1000, 5);
  EXPECT_DOUBLE_EQ(report.epsilon_hat, 0.0);
  for (const OutcomeCount& oc : report.outcome_counts) {
    EXPECT_EQ(oc.count1, oc.count2);
  }
}

TEST(EstimateEpsilonTest, SwapSymmetricAndRepeatable) {
  const auto mech = MakeRandomizedResponse(0.7);
  const NeighborPair pair = RandomizedResponsePair();
  NeighborPair swapped;
  swapped.d1 = pair.d2;
  swapped.d2 = pair.d1;
  const AuditReport fwd = EstimateEpsilon(*mech, pair, 0.0, 20000, 9);
  const AuditReport rev = EstimateEpsilon(*mech, swapped, 0.0, 20000, 9);
  EXPECT_EQ(fwd.epsilon_hat, rev.epsilon_hat);
  const AuditReport again = EstimateEpsilon(*mech, pair, 0.0, 20000, 9);
  EXPECT_EQ(fwd.epsilon_hat, again.epsilon_hat);
  ASSERT_EQ(fwd.outcome_counts.size(), again.outcome_counts.size());
  for (std::size_t i = 0; i < fwd.outcome_counts.size(); ++i) {
    EXPECT_EQ(fwd.outcome_counts[i].count1, again.outcome_counts[i].count1);
    EXPECT_EQ(fwd.outcome_counts[i].count2, again.outcome_counts[i].count2);
    // The swapped run sees the same per-database streams, so the histogram
    // sides trade places exactly.
    EXPECT_EQ(fwd.outcome_counts[i].count1, rev.outcome_counts[i].count2);
    EXPECT_EQ(fwd.outcome_counts[i].count2, rev.outcome_counts[i].count1);
  }
}

// Test-only mechanism: reports the x value of record 0 verbatim, so
// neighbors differing there are perfectly distinguishable.
class RevealFirstPoint : public Mechanism {
 public:
  const std::string& name() const override {
    static const std::string kName = "revealFirstPoint";
    return kName;
  }
  PrivacyParams declared() const override {
    return {std::numeric_limits<double>::infinity(), 0};
  }
  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t) const override {
    return static_cast<std::int64_t>(db.records.at(0).x);
  }
};

TEST(EstimateEpsilonTest, PerfectDistinguisherIsInfiniteOnlyInRawMode) {
  RevealFirstPoint mech;
  PartiallyLabeledDatabase base;
  base.records = {{0, 1}};
  const NeighborPair pair = MakeNeighbors(base, 0, {5, 1});

  AuditOptions raw;
  raw.clopper_pearson = false;
  const AuditReport unbounded = EstimateEpsilon(mech, pair, 0.0, 3000, 1, raw);
  EXPECT_TRUE(unbounded.infinite);
  EXPECT_TRUE(std::isinf(unbounded.epsilon_hat));

  // Interval mode: ln(0.025^{1/3000} / (1 - 0.025^{1/3000})) = 6.7.
  const AuditReport bounded = EstimateEpsilon(mech, pair, 0.0, 3000, 1);
  EXPECT_FALSE(bounded.infinite);
  EXPECT_GE(bounded.epsilon_hat, 5.0);
  EXPECT_LE(bounded.epsilon_hat, 8.0);
}

TEST(EstimateEpsilonTest, ValidatesArguments) {
  const auto mech = MakeRandomizedResponse(1.0);
  const NeighborPair pair = RandomizedResponsePair();
  EXPECT_THROW(EstimateEpsilon(*mech, pair, 0.0, 50, 1), ConfigError);
  EXPECT_THROW(EstimateEpsilon(*mech, pair, -0.1, 1000, 1), ConfigError);
  AuditOptions bad;
  bad.confidence = 1.0;
  EXPECT_THROW(EstimateEpsilon(*mech, pair, 0.0, 1000, 1, bad), ConfigError);
  NeighborPair unequal = pair;
  unequal.d2.records.push_back({1, 0});
  EXPECT_THROW(EstimateEpsilon(*mech, unequal, 0.0, 1000, 1),
               InvalidInputError);
}

// Test-only mechanism with three outcomes whose distribution depends on the
// label of record 0: (0.35, 0.35, 0.3) when labeled 1, (0.2, 0.2, 0.6)
// otherwise. The pair {0, 1} is as informative as either singleton but has
// twice the mass, so interval shrinkage costs it less.
class TriOutcome : public Mechanism {
 public:
  const std::string& name() const override {
    static const std::string kName = "triOutcome";
    return kName;
  }
  PrivacyParams declared() const override { return {1.0, 0}; }
  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    const bool one = db.records.at(0).y == 1;
    const double u = Rng(seed).NextDouble();
    const double pa = one ? 0.35 : 0.2;
    const double pb = one ? 0.70 : 0.4;
    return u < pa ? 0 : (u < pb ? 1 : 2);
  }
};

TEST(EstimateEpsilonTest, SubsetEventsNeverBelowSingletons) {
  TriOutcome mech;
  const NeighborPair pair = RandomizedResponsePair();
  const AuditReport singles = EstimateEpsilon(mech, pair, 0.0, 30000, 13);
  AuditOptions subsets;
  subsets.subset_events = true;
  const AuditReport all =
      EstimateEpsilon(mech, pair, 0.0, 30000, 13, subsets);
  EXPECT_EQ(singles.distinct_outcomes, 3u);
  EXPECT_GE(all.epsilon_hat, singles.epsilon_hat);
  EXPECT_GT(all.epsilon_hat, 0.3);
}

// Test-only mechanism: twenty equally likely outcomes, data-independent.
class ManyOutcomes : public Mechanism {
 public:
  const std::string& name() const override {
    static const std::string kName = "manyOutcomes";
    return kName;
  }
  PrivacyParams declared() const override { return {0.0, 0}; }
  std::int64_t Run(const PartiallyLabeledDatabase&,
                   std::uint64_t seed) const override {
    return static_cast<std::int64_t>(Rng(seed).NextBelow(20));
  }
};

TEST(EstimateEpsilonTest, SubsetScanRefusesWideHistograms) {
  ManyOutcomes mech;
  const NeighborPair pair = RandomizedResponsePair();
  AuditOptions subsets;
  subsets.subset_events = true;
  EXPECT_THROW(EstimateEpsilon(mech, pair, 0.0, 10000, 2, subsets),
               ResourceError);
}

TEST(SelectionMechanismTest, OutcomeIsTheChosenConceptIndex) {
  // Same fixture as the selection learner: scores (3, 6, 3) at epsilon 1
  // give P(outcome 1) = 0.6914; 5 sigma at 1e5 draws is 0.0073.
  const auto mech = MakeSelectionMechanism(ConceptClass::Thresholds(1), 1.0);
  EXPECT_EQ(mech->declared(), (PrivacyParams{1.0, 0.0}));
  PartiallyLabeledDatabase db;
  db.records = {{0, 1}, {0, 1}, {0, 1}, {1, 0}, {1, 0}, {1, 0}};
  int hits = 0;
  for (int t = 0; t < 100000; ++t) {
    const std::int64_t outcome = mech->Run(db, static_cast<std::uint64_t>(t));
    ASSERT_GE(outcome, 0);
    ASSERT_LT(outcome, 3);
    hits += outcome == 1;
  }
  EXPECT_NEAR(hits / 100000.0, 0.6914, 0.0075);

  PartiallyLabeledDatabase partial;
  partial.records = {{0, 1}, {1, kUnlabeled}};
  EXPECT_THROW(mech->Run(partial, 0), InvalidInputError);
  EXPECT_THROW(MakeSelectionMechanism(ConceptClass::Thresholds(1), 0.0),
               ConfigError);
}

TEST(RelabelPassMechanismTest, IgnoresThePassthroughSegment) {
  const ConceptClass cls = ConceptClass::Thresholds(3);
  const auto mech = MakeRelabelPassMechanism(cls);
  EXPECT_EQ(mech->declared(), (PrivacyParams{3.0, 0.0}));

  const PartiallyLabeledDatabase d1 =
      MakeSegmented({{0, 1}, {1, 1}, {5, 0}, {6, 0}}, {2, 7}, {3, 4});
  PartiallyLabeledDatabase d2 = d1;
  d2.records[7] = {5, kUnlabeled};  // change inside the passthrough segment

  // The pass never reads the passthrough segment, so with the seed held
  // fixed the executions coincide exactly.
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::int64_t o1 = mech->Run(d1, seed);
    EXPECT_EQ(o1, mech->Run(d2, seed));
    EXPECT_GE(o1, 0);
    EXPECT_LT(o1, static_cast<std::int64_t>(cls.size()));
  }
}

TEST(LearnerMechanismTest, HashesTheOutputHypothesis) {
  const auto erm = std::make_shared<ErmLearner>(ConceptClass::Thresholds(2));
  const auto mech = MakeLearnerMechanism(erm);
  EXPECT_EQ(mech->name(), "learner(erm)");
  PartiallyLabeledDatabase zeros;
  zeros.records = {{0, 0}, {1, 0}};
  PartiallyLabeledDatabase ones;
  ones.records = {{0, 1}, {1, 1}};
  // ERM is deterministic: c0 on the first database, c2 on the second.
  EXPECT_EQ(mech->Run(zeros, 1), mech->Run(zeros, 2));
  EXPECT_NE(mech->Run(zeros, 1), mech->Run(ones, 1));
  EXPECT_THROW(MakeLearnerMechanism(nullptr), ConfigError);
}

}  // namespace
}  // namespace pssl
