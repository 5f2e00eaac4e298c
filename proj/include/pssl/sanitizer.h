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

#ifndef PSSL_SANITIZER_H_
#define PSSL_SANITIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "pssl/concepts.h"
#include "pssl/errors.h"
#include "pssl/fraction.h"

namespace pssl {

struct SanitizerOptions {
  // Constant inside the synthetic-database size
  // m-hat = ceil(kappa * VC / alpha^2 * ln(1/alpha)). The default keeps the
  // formula's unit constant; fixtures calibrate it empirically.
  double kappa = 1.0;

  // Candidate multisets are enumerated exhaustively when their count is at
  // most this limit (and scoring fits `score_budget`); otherwise a
  // Metropolis walk over the same Gibbs distribution is used and the result
  // is flagged approximate.
  std::uint64_t exhaustive_limit = 1'000'000;

  // Steps of the Metropolis walk in the non-exhaustive regime.
  std::uint64_t walk_steps = 200'000;

  // Cap on candidate-times-behavior scoring work in the exhaustive regime.
  std::uint64_t score_budget = 200'000'000;

  std::uint64_t eval_budget = kDefaultEvalBudget;
};

// A privately selected stand-in database approximating every counting query
// of a class on the input.
struct SyntheticDatabase {
  std::vector<Point> points;  // multiset, ascending
  std::uint64_t target_size = 0;

  // Exhaustive max over the query class of |Q_c(input) - Q_c(points)|,
  // computed on the returned database as a diagnostic (exact rational).
  Fraction max_query_error{0};

  // True when the Metropolis sampler was used: the selection then only
  // approximates the exponential-mechanism distribution.
  bool approximate_sampler = false;

  // Advisory: the input was smaller than the recommended floor for the
  // requested accuracy, so the (alpha, beta) contract may not hold.
  bool input_below_recommended = false;
};

// Fraction of the points satisfying the concept, as an exact rational.
// Throws on an empty point list.
Fraction QueryValue(const ConceptClass& cls, Concept c, std::span<const Point> d);

// Synthetic-database size m-hat = ceil(kappa * vc / alpha^2 * ln(1/alpha)),
// clamped to at least one record.
std::uint64_t SanitizedSize(int query_vc, double alpha, double kappa);

// Input-size floor (unit constants) below which the accuracy contract is not
// expected: bits * vc * ln(1/alpha) / (alpha^3 eps) + ln(1/beta) / (eps alpha).
std::uint64_t RecommendedSanitizerInput(int query_vc, int domain_bits,
                                        double alpha, double beta,
                                        double epsilon);

// Privately selects a size-m-hat multiset whose counting-query answers over
// `query_class` approximate those of `d`, via the exponential mechanism with
// the integer score -max_c |#1(c, d) * m-hat - #1(c, candidate) * |d||.
// Changing one record of `d` moves each per-concept count by at most one and
// hence the score by at most m-hat, so the mechanism runs with sensitivity
// m-hat. Declared (epsilon, 0)-DP in the exhaustive regime.
SyntheticDatabase Sanitize(std::span<const Point> d,
                           const ConceptClass& query_class, double alpha,
                           double beta, double epsilon, std::uint64_t seed,
                           const SanitizerOptions& opts = {});

// Sanitize specialized for a learner: queries are the disagreement
// indicators of `cls`, and the deduplicated support of the synthetic
// database is returned alongside it.
struct LearnerSanitization {
  SyntheticDatabase synthetic;
  std::vector<Point> support;  // distinct points, ascending
  ConceptClass query_class;    // disagreement class actually queried
  int query_vc = 0;
};
LearnerSanitization SanitizeForLearner(std::span<const Point> d,
                                       const ConceptClass& cls, double alpha,
                                       double beta, double epsilon,
                                       std::uint64_t seed,
                                       const SanitizerOptions& opts = {});

}  // namespace pssl

#endif  // PSSL_SANITIZER_H_
