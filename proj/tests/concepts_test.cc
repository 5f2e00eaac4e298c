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

#include "pssl/concepts.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "pssl/random.h"

namespace pssl {
namespace {

TEST(ConceptClassTest, ThresholdEvaluation) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  EXPECT_EQ(cls.size(), 5u);
  EXPECT_EQ(cls.domain().cardinality(), 4u);
  ASSERT_TRUE(cls.known_vc().has_value());
  EXPECT_EQ(*cls.known_vc(), 1);
  // Concept j labels x positive iff x < j.
  EXPECT_FALSE(cls.Evaluate(Concept{0}, 0));
  EXPECT_TRUE(cls.Evaluate(Concept{1}, 0));
  EXPECT_FALSE(cls.Evaluate(Concept{1}, 1));
  EXPECT_TRUE(cls.Evaluate(Concept{4}, 3));
  EXPECT_THROW(cls.Evaluate(Concept{5}, 0), InvalidInputError);
  EXPECT_THROW(cls.Evaluate(Concept{0}, 4), InvalidInputError);
}

TEST(ConceptClassTest, SingletonsAndIntervals) {
  const ConceptClass pts = ConceptClass::Singletons(Domain::Bitline(3));
  EXPECT_EQ(pts.size(), 8u);
  EXPECT_TRUE(pts.Evaluate(Concept{5}, 5));
  EXPECT_FALSE(pts.Evaluate(Concept{5}, 4));

  const ConceptClass iv = ConceptClass::Intervals(2);
  EXPECT_EQ(iv.size(), 16u);  // all (a, b) index pairs, duplicates allowed
  // Concept (a=1, b=2) has index 1*4+2 = 6 and covers [1, 2].
  EXPECT_FALSE(iv.Evaluate(Concept{6}, 0));
  EXPECT_TRUE(iv.Evaluate(Concept{6}, 1));
  EXPECT_TRUE(iv.Evaluate(Concept{6}, 2));
  EXPECT_FALSE(iv.Evaluate(Concept{6}, 3));
  // a > b denotes the empty set.
  EXPECT_FALSE(iv.Evaluate(Concept{4}, 0));  // (a=1, b=0)
  EXPECT_FALSE(iv.Evaluate(Concept{4}, 1));
}

TEST(ConceptClassTest, RectangleGrid) {
  const ConceptClass rect = ConceptClass::Rectangles(2, 2);
  EXPECT_EQ(rect.size(), 256u);
  ASSERT_TRUE(rect.known_vc().has_value());
  EXPECT_EQ(*rect.known_vc(), 4);
  EXPECT_EQ(rect.domain().cardinality(), 16u);
}

struct DisagreementFixture {
  const char* name;
  ConceptClass cls;
  std::uint64_t xor_size;
  int vc;
  int xor_vc;
};

// Sizes and dimensions fixed by exhaustive enumeration over the packed
// truth tables of each class (brute force over all pairs).
std::vector<DisagreementFixture> Fixtures() {
  std::vector<DisagreementFixture> fx;
  fx.push_back({"THRESH_1", ConceptClass::Thresholds(1), 4, 1, 2});
  fx.push_back({"THRESH_2", ConceptClass::Thresholds(2), 11, 1, 2});
  fx.push_back({"THRESH_3", ConceptClass::Thresholds(3), 37, 1, 2});
  fx.push_back({"THRESH_4", ConceptClass::Thresholds(4), 137, 1, 2});
  fx.push_back(
      {"POINT_1", ConceptClass::Singletons(Domain::Bitline(1)), 2, 1, 1});
  fx.push_back(
      {"POINT_2", ConceptClass::Singletons(Domain::Bitline(2)), 7, 1, 2});
  fx.push_back(
      {"POINT_3", ConceptClass::Singletons(Domain::Bitline(3)), 29, 1, 2});
  fx.push_back(
      {"POINT_4", ConceptClass::Singletons(Domain::Bitline(4)), 121, 1, 2});
  fx.push_back({"INTERVAL_1", ConceptClass::Intervals(1), 4, 2, 2});
  fx.push_back({"INTERVAL_2", ConceptClass::Intervals(2), 16, 2, 4});
  fx.push_back({"INTERVAL_3", ConceptClass::Intervals(3), 163, 2, 4});
  fx.push_back({"RECT_2_2", ConceptClass::Rectangles(2, 2), 3051, 4, 7});
  return fx;
}

TEST(DisagreementsTest, SizesAndDimensionsMatchEnumeration) {
  for (DisagreementFixture& fx : Fixtures()) {
    SCOPED_TRACE(fx.name);
    EXPECT_EQ(VcDimension(fx.cls), fx.vc);
    const ConceptClass xcls = ConceptClass::Disagreements(fx.cls);
    EXPECT_EQ(xcls.size(), fx.xor_size);
    EXPECT_EQ(VcDimension(xcls), fx.xor_vc);
  }
}

TEST(DisagreementsTest, ContainsAllZeroAndIsDuplicateFree) {
  const ConceptClass xcls =
      ConceptClass::Disagreements(ConceptClass::Thresholds(3));
  // h = f contributes the everywhere-zero concept.
  bool has_zero = false;
  std::set<std::vector<std::uint64_t>> tables;
  const BehaviorCatalog& cat = xcls.Behaviors();
  EXPECT_EQ(cat.tables.size(), xcls.size());
  for (std::size_t t = 0; t < cat.tables.size(); ++t) {
    tables.insert(cat.tables[t]);
    bool all_zero = true;
    for (Point p = 0; p < xcls.domain().cardinality(); ++p) {
      if (BehaviorBit(cat, t, p)) all_zero = false;
    }
    has_zero = has_zero || all_zero;
  }
  EXPECT_TRUE(has_zero);
  EXPECT_EQ(tables.size(), xcls.size());
}

TEST(ProjectionTest, ThresholdDichotomiesAndWitnesses) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const std::vector<Point> b = {1, 3};
  const Projection proj = ProjectWithWitnesses(cls, b);
  ASSERT_EQ(proj.dichotomies.size(), 3u);
  EXPECT_EQ(proj.dichotomies[0], (Dichotomy{0, 0}));
  EXPECT_EQ(proj.dichotomies[1], (Dichotomy{1, 0}));
  EXPECT_EQ(proj.dichotomies[2], (Dichotomy{1, 1}));
  // Lowest-index witnesses: c0 gives (0,0); c2 = {x < 2} gives (1,0);
  // c4 gives (1,1).
  EXPECT_EQ(proj.witnesses[0].index, 0u);
  EXPECT_EQ(proj.witnesses[1].index, 2u);
  EXPECT_EQ(proj.witnesses[2].index, 4u);
}

TEST(ProjectionTest, DisagreementProjectionIsXorClosure) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const ConceptClass xcls = ConceptClass::Disagreements(cls);
  const std::vector<Point> b = {1, 3};
  const std::vector<Dichotomy> base = Project(cls, b);
  const std::vector<Dichotomy> xproj = Project(xcls, b);
  std::set<Dichotomy> expected;
  for (const Dichotomy& z1 : base) {
    for (const Dichotomy& z2 : base) {
      Dichotomy x(z1.size());
      for (std::size_t i = 0; i < z1.size(); ++i) x[i] = z1[i] ^ z2[i];
      expected.insert(x);
    }
  }
  EXPECT_EQ(std::set<Dichotomy>(xproj.begin(), xproj.end()), expected);
  EXPECT_EQ(xproj.size(), 4u);  // (0,1) appears even though C misses it
}

TEST(ProjectionTest, DuplicatePointsAreDeduped) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const std::vector<Point> dup = {1, 1, 3, 1};
  const std::vector<Point> uniq = {1, 3};
  EXPECT_EQ(Project(cls, dup), Project(cls, uniq));
  const Projection proj = ProjectWithWitnesses(cls, dup);
  EXPECT_EQ(proj.points, uniq);
}

TEST(ConsistencyTest, LowestWitnessAndUnrealizable) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const std::vector<Point> b = {1, 3};
  const auto c = ConsistentConcept(cls, b, {1, 0});
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->index, 2u);
  EXPECT_FALSE(ConsistentConcept(cls, b, {0, 1}).has_value());
  // Conflicting labels on a duplicated point are unrealizable.
  const std::vector<Point> dup = {1, 1};
  EXPECT_FALSE(ConsistentConcept(cls, dup, {0, 1}).has_value());
  EXPECT_TRUE(ConsistentConcept(cls, dup, {1, 1}).has_value());
}

TEST(SauerTest, ProjectionSizeWithinBound) {
  for (DisagreementFixture& fx : Fixtures()) {
    SCOPED_TRACE(fx.name);
    const std::uint64_t card = fx.cls.domain().cardinality();
    std::vector<Point> all(card);
    for (Point p = 0; p < card; ++p) all[p] = p;
    const double count = static_cast<double>(Project(fx.cls, all).size());
    const int vc = VcDimension(fx.cls);
    const double bound =
        card <= static_cast<std::uint64_t>(vc)
            ? std::pow(2.0, static_cast<double>(card))
            : std::pow(std::exp(1.0) * static_cast<double>(card) / vc, vc);
    EXPECT_LE(count, bound);
  }
}

TEST(ExplicitTest, ValidatesTables) {
  const Domain dom = Domain::Bitline(2);
  EXPECT_NO_THROW(ConceptClass::Explicit(dom, {{0, 0, 1, 1}, {1, 0, 0, 0}}));
  // Duplicate tables.
  EXPECT_THROW(ConceptClass::Explicit(dom, {{0, 0, 1, 1}, {0, 0, 1, 1}}),
               InvalidInputError);
  // Wrong length.
  EXPECT_THROW(ConceptClass::Explicit(dom, {{0, 1}}), InvalidInputError);
  // Non-binary entry.
  EXPECT_THROW(ConceptClass::Explicit(dom, {{0, 2, 0, 0}}), InvalidInputError);
  // Empty class.
  EXPECT_THROW(ConceptClass::Explicit(dom, {}), InvalidInputError);
}

TEST(BehaviorCatalogTest, WitnessesAreLowestIndices) {
  const ConceptClass rect = ConceptClass::Rectangles(2, 2);
  const BehaviorCatalog& cat = rect.Behaviors();
  // 256 corner pairs collapse to 101 distinct boxes (100 nonempty + empty).
  EXPECT_EQ(cat.tables.size(), 101u);
  // Witness order is ascending, and each witness realizes its table.
  for (std::size_t t = 0; t < cat.tables.size(); ++t) {
    if (t > 0) {
      EXPECT_LT(cat.witnesses[t - 1], cat.witnesses[t]);
    }
    for (Point p = 0; p < rect.domain().cardinality(); ++p) {
      ASSERT_EQ(rect.Evaluate(Concept{cat.witnesses[t]}, p),
                BehaviorBit(cat, t, p));
    }
  }
}

TEST(VcTest, ShatteringRespectsBudget) {
  const ConceptClass rect = ConceptClass::Rectangles(2, 2);
  VcOptions opts;
  opts.subset_budget = 2;
  EXPECT_THROW(VcDimension(rect, opts), ResourceError);
}

TEST(HypothesisTest, ProperAndImproper) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const Hypothesis proper = Hypothesis::FromConcept(cls, Concept{2});
  EXPECT_TRUE(proper.proper());
  ASSERT_TRUE(proper.AsConcept().has_value());
  EXPECT_EQ(proper.AsConcept()->index, 2u);
  EXPECT_TRUE(proper.Evaluate(0));
  EXPECT_FALSE(proper.Evaluate(2));

  const Hypothesis improper =
      Hypothesis::FromTable(Domain::Bitline(2), {1, 0, 1, 0});
  EXPECT_FALSE(improper.proper());
  EXPECT_FALSE(improper.AsConcept().has_value());
  EXPECT_TRUE(improper.Evaluate(2));
  EXPECT_FALSE(improper.Evaluate(3));
}

TEST(EmpiricalErrorTest, ExactRationalCounts) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const Hypothesis h = Hypothesis::FromConcept(cls, Concept{2});
  const std::vector<LabeledExample> s = {
      {0, 1}, {1, 1}, {2, 1}, {3, 0}, {1, 0}, {0, 1}};
  // h labels {0,1} positive: mismatches at x=2 (want 1) and x=1 (want 0).
  EXPECT_EQ(EmpiricalError(h, s), Fraction(2, 6));
  EXPECT_EQ(EmpiricalError(cls, Concept{2}, s), Fraction(1, 3));
  EXPECT_THROW(EmpiricalError(h, std::vector<LabeledExample>{}),
               InvalidInputError);
  const std::vector<LabeledExample> unlabeled = {{0, kUnlabeled}};
  EXPECT_THROW(EmpiricalError(h, unlabeled), InvalidInputError);
}

TEST(GeneralizationTest, ExactUniformAndTable) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const Hypothesis h = Hypothesis::FromConcept(cls, Concept{0});
  const Hypothesis target = Hypothesis::FromConcept(cls, Concept{2});
  const Distribution uniform = Distribution::Uniform(cls.domain());
  const ErrorEstimate exact = GeneralizationError(h, target, uniform);
  EXPECT_TRUE(exact.exact);
  EXPECT_DOUBLE_EQ(exact.value, 0.5);  // disagree on {0, 1} of 4 points

  const Distribution point_mass =
      Distribution::Table(cls.domain(), {1.0, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(GeneralizationError(h, target, point_mass).value, 1.0);
}

TEST(GeneralizationTest, MonteCarloAgreesWithExact) {
  const ConceptClass cls = ConceptClass::Thresholds(3);
  const Hypothesis h = Hypothesis::FromConcept(cls, Concept{2});
  const Hypothesis target = Hypothesis::FromConcept(cls, Concept{6});
  const Distribution uniform = Distribution::Uniform(cls.domain());
  const double exact = GeneralizationError(h, target, uniform).value;
  const ErrorEstimate mc =
      GeneralizationErrorMonteCarlo(h, target, uniform, 20000, 77);
  EXPECT_FALSE(mc.exact);
  EXPECT_GT(mc.ci_half_width, 0.0);
  EXPECT_NEAR(mc.value, exact, 2 * mc.ci_half_width);
}

TEST(DisagreementsTest, RandomExplicitClassesObeyTenTimesVcBound) {
  const Domain dom = Domain::Bitline(3);
  Rng rng(20260815);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t count = 2 + rng.NextBelow(6);
    std::set<std::vector<std::uint8_t>> distinct;
    while (distinct.size() < count) {
      std::vector<std::uint8_t> table(8);
      for (auto& b : table) b = static_cast<std::uint8_t>(rng.NextBelow(2));
      distinct.insert(table);
    }
    const ConceptClass cls = ConceptClass::Explicit(
        dom, std::vector<std::vector<std::uint8_t>>(distinct.begin(),
                                                    distinct.end()));
    const ConceptClass xcls = ConceptClass::Disagreements(cls);
    EXPECT_LE(VcDimension(xcls), 10 * std::max(1, VcDimension(cls)));
  }
}

}  // namespace
}  // namespace pssl
