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

#include "pssl/sanitizer.h"

#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

namespace pssl {
namespace {

TEST(QueryValueTest, ExactRationalFractions) {
  const ConceptClass cls = ConceptClass::Thresholds(2);
  const std::vector<Point> d = {0, 1, 2, 3};
  // c2 = {x < 2} covers 2 of the 4 points.
  EXPECT_EQ(QueryValue(cls, Concept{2}, d), Fraction(1, 2));
  EXPECT_EQ(QueryValue(cls, Concept{0}, d), Fraction(0));
  EXPECT_EQ(QueryValue(cls, Concept{4}, d), Fraction(1));
  // Multiset: duplicates count.
  const std::vector<Point> dup = {1, 1, 3};
  EXPECT_EQ(QueryValue(cls, Concept{2}, dup), Fraction(2, 3));
  EXPECT_THROW(QueryValue(cls, Concept{2}, std::vector<Point>{}),
               InvalidInputError);
}

TEST(SanitizedSizeTest, CeilFormulaWithFloor) {
  // 0.09 * 2 / 0.25^2 * ln 4 = 3.9925 -> 4.
  EXPECT_EQ(SanitizedSize(2, 0.25, 0.09), 4u);
  // 1 / 0.2^2 * ln 5 = 40.24 -> 41.
  EXPECT_EQ(SanitizedSize(1, 0.2, 1.0), 41u);
  // Tiny raw values clamp to one record.
  EXPECT_EQ(SanitizedSize(1, 0.9, 0.001), 1u);
  EXPECT_THROW(SanitizedSize(-1, 0.25, 1.0), InvalidInputError);
  EXPECT_THROW(SanitizedSize(1, 1.0, 1.0), InvalidInputError);
  EXPECT_THROW(SanitizedSize(1, 0.25, 0.0), InvalidInputError);
}

TEST(RecommendedInputTest, SumOfBothTerms) {
  // 3 * 2 * ln 4 / 0.25^3 + ln 10 / 0.25 = 532.34 + 9.21 -> 542.
  EXPECT_EQ(RecommendedSanitizerInput(2, 3, 0.25, 0.1, 1.0), 542u);
  EXPECT_THROW(RecommendedSanitizerInput(2, 3, 0.0, 0.1, 1.0),
               InvalidInputError);
  EXPECT_THROW(RecommendedSanitizerInput(2, 3, 0.25, 0.1, 0.0),
               InvalidInputError);
}

TEST(SanitizeTest, StrongSelectionFindsZeroErrorCandidate) {
  // The input is itself a size-4 multiset, so the candidate equal to it
  // scores 0 and every other score is at most -1. At epsilon 200 with
  // sensitivity 4 the mechanism misses the top score with probability under
  // 330 * e^{-25}.
  const ConceptClass cls = ConceptClass::Thresholds(3);
  const std::vector<Point> d = {0, 2, 4, 6};
  SanitizerOptions opts;
  opts.kappa = 0.09;
  const LearnerSanitization out =
      SanitizeForLearner(d, cls, 0.25, 0.1, 200.0, 42, opts);
  EXPECT_EQ(out.query_vc, 2);
  EXPECT_EQ(out.query_class.size(), 37u);  // threshold disagreements on 8 points
  EXPECT_EQ(out.synthetic.target_size, 4u);
  ASSERT_EQ(out.synthetic.points.size(), 4u);
  EXPECT_TRUE(std::is_sorted(out.synthetic.points.begin(),
                             out.synthetic.points.end()));
  EXPECT_FALSE(out.synthetic.approximate_sampler);
  // At epsilon 200 the recommended input is ceil(532.34/200 + 9.21/200) = 3,
  // so four points are not flagged as undersized.
  EXPECT_FALSE(out.synthetic.input_below_recommended);
  EXPECT_EQ(out.synthetic.max_query_error, Fraction(0));
  // Support is the deduplicated point set.
  EXPECT_TRUE(std::is_sorted(out.support.begin(), out.support.end()));
  EXPECT_EQ(std::adjacent_find(out.support.begin(), out.support.end()),
            out.support.end());
  for (Point p : out.support) {
    EXPECT_TRUE(std::binary_search(out.synthetic.points.begin(),
                                   out.synthetic.points.end(), p));
  }
}

TEST(SanitizeTest, DiagnosticMatchesExhaustiveRecomputation) {
  const ConceptClass cls = ConceptClass::Thresholds(3);
  const ConceptClass query = ConceptClass::Disagreements(cls);
  std::vector<Point> d;
  for (Point p = 0; p < 8; ++p) {
    for (int c = 0; c < (p % 3 == 0 ? 3 : 1); ++c) d.push_back(p);
  }
  SanitizerOptions opts;
  opts.kappa = 0.09;
  const SyntheticDatabase syn = Sanitize(d, query, 0.25, 0.1, 1.0, 7, opts);
  Fraction worst(0);
  for (std::uint64_t j = 0; j < query.size(); ++j) {
    const Fraction in = QueryValue(query, Concept{j}, d);
    const Fraction out = QueryValue(query, Concept{j}, syn.points);
    const Fraction err = in > out ? in - out : out - in;
    if (err > worst) worst = err;
  }
  EXPECT_EQ(syn.max_query_error, worst);
}

TEST(SanitizeTest, DeterministicPerSeed) {
  const ConceptClass cls = ConceptClass::Thresholds(3);
  const ConceptClass query = ConceptClass::Disagreements(cls);
  const std::vector<Point> d = {0, 1, 1, 2, 5, 7, 7, 7};
  SanitizerOptions opts;
  opts.kappa = 0.09;
  const SyntheticDatabase a = Sanitize(d, query, 0.25, 0.1, 1.0, 9, opts);
  const SyntheticDatabase b = Sanitize(d, query, 0.25, 0.1, 1.0, 9, opts);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.max_query_error, b.max_query_error);
}

TEST(SanitizeTest, MetropolisRegimeIsFlaggedAndAccurate) {
  // Forcing the walk by shrinking the exhaustive limit. The input equals a
  // representable multiset, and at epsilon 50 the walk is a near-greedy
  // ascent, so it should land within 1/2 of every query.
  const ConceptClass cls = ConceptClass::Thresholds(3);
  const std::vector<Point> d = {0, 2, 4, 6};
  SanitizerOptions opts;
  opts.kappa = 0.09;
  opts.exhaustive_limit = 1;
  const LearnerSanitization out =
      SanitizeForLearner(d, cls, 0.25, 0.1, 50.0, 11, opts);
  EXPECT_TRUE(out.synthetic.approximate_sampler);
  ASSERT_EQ(out.synthetic.points.size(), 4u);
  EXPECT_TRUE(std::is_sorted(out.synthetic.points.begin(),
                             out.synthetic.points.end()));
  EXPECT_LE(out.synthetic.max_query_error, Fraction(1, 2));
}

TEST(SanitizeTest, ValidatesInputs) {
  const ConceptClass query =
      ConceptClass::Disagreements(ConceptClass::Thresholds(2));
  const std::vector<Point> d = {0, 1};
  EXPECT_THROW(Sanitize({}, query, 0.25, 0.1, 1.0, 1), InvalidInputError);
  EXPECT_THROW(Sanitize(d, query, 1.5, 0.1, 1.0, 1), InvalidInputError);
  EXPECT_THROW(Sanitize(d, query, 0.25, 0.0, 1.0, 1), InvalidInputError);
  EXPECT_THROW(Sanitize(d, query, 0.25, 0.1, -1.0, 1), InvalidInputError);
  const std::vector<Point> outside = {0, 9};
  EXPECT_THROW(Sanitize(outside, query, 0.25, 0.1, 1.0, 1), InvalidInputError);
}

}  // namespace
}  // namespace pssl
