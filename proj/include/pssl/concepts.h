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

#ifndef PSSL_CONCEPTS_H_
#define PSSL_CONCEPTS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pssl/database.h"
#include "pssl/domain.h"
#include "pssl/errors.h"
#include "pssl/fraction.h"

namespace pssl {

// Default cap on concept-on-point evaluations for class enumeration
// (projections, behavior catalogs, consistency scans).
inline constexpr std::uint64_t kDefaultEvalBudget = std::uint64_t{1} << 26;

// A member of a concept class, identified by its enumeration index.
struct Concept {
  std::uint64_t index = 0;

  friend bool operator==(const Concept&, const Concept&) = default;
};

// A labeling of a point list: entry i is the label the concept assigns to
// the i-th point.
using Dichotomy = std::vector<std::uint8_t>;

// Distinct behaviors of a class over its whole domain. `tables[k]` is a
// bit-packed truth table (bit p = label of point p) and `witnesses[k]` is the
// lowest concept index realizing it. Tables appear in witness order.
struct BehaviorCatalog {
  std::vector<std::vector<std::uint64_t>> tables;
  std::vector<std::uint64_t> witnesses;
  std::size_t words_per_table = 0;
};

// Label assigned to point `p` by catalog entry `table`.
inline bool BehaviorBit(const BehaviorCatalog& cat, std::size_t table, Point p) {
  return (cat.tables[table][p >> 6] >> (p & 63)) & 1;
}

// A finite class of binary concepts over a finite domain. Instances are
// immutable and cheap to copy; enumeration caches are shared.
class ConceptClass {
 public:
  // Threshold functions over a one-axis domain of 2^bits points:
  // concept j labels x positive iff x < j, for j in [0, 2^bits]. The class
  // has 2^bits + 1 members.
  static ConceptClass Thresholds(int bits);

  // Singleton indicators: one concept per domain point, positive only there.
  static ConceptClass Singletons(const Domain& domain);

  // Axis-aligned boxes over a grid: a concept is a pair (a, b) of corner
  // points, positive at x iff a_i <= x_i <= b_i on every axis. Pairs with
  // a_i > b_i on some axis denote the empty box, so as with any enumeration
  // by parameters, several indices may share one behavior.
  static ConceptClass Rectangles(int bits, int axes);

  // Rectangles over one axis: all [a, b] range indicators.
  static ConceptClass Intervals(int bits);

  // Explicit class given by truth tables (one per concept, entry per domain
  // point, values 0/1). Tables must be pairwise distinct.
  static ConceptClass Explicit(const Domain& domain,
                               std::vector<std::vector<std::uint8_t>> tables);

  // The class of disagreement indicators {x -> h(x) != f(x) : h, f in base},
  // including the everywhere-zero member (h = f). Members with identical
  // behavior are merged, so this class is a set of functions; order follows
  // first appearance when scanning pairs (i, j), i <= j, in index order.
  static ConceptClass Disagreements(const ConceptClass& base,
                                    std::uint64_t eval_budget = kDefaultEvalBudget);

  const Domain& domain() const;
  std::uint64_t size() const;
  std::optional<int> known_vc() const;
  const std::string& Describe() const;

  // Label assigned by concept `c` to point `x`. Throws on out-of-range
  // concept index or point.
  bool Evaluate(Concept c, Point x) const;

  // Distinct behaviors over the whole domain, built on first use and cached.
  // Throws ResourceError if enumeration would exceed `eval_budget`.
  const BehaviorCatalog& Behaviors(std::uint64_t eval_budget = kDefaultEvalBudget) const;

  class Impl;
  explicit ConceptClass(std::shared_ptr<const Impl> impl);
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

// A binary hypothesis over a domain: either a member of a class (proper) or
// an explicit truth table (improper).
class Hypothesis {
 public:
  Hypothesis() = default;
  static Hypothesis FromConcept(const ConceptClass& cls, Concept c);
  static Hypothesis FromTable(const Domain& domain,
                              std::vector<std::uint8_t> table);

  bool valid() const { return cls_.has_value() || !table_.empty(); }
  bool proper() const { return cls_.has_value(); }
  std::optional<Concept> AsConcept() const;
  const Domain& domain() const { return domain_; }
  bool Evaluate(Point x) const;

 private:
  Domain domain_;
  std::optional<ConceptClass> cls_;
  Concept concept_;
  std::vector<std::uint8_t> table_;
};

struct ProjectionOptions {
  std::uint64_t eval_budget = kDefaultEvalBudget;
};

// The set of dichotomies the class realizes on `b`. Duplicate points in `b`
// are dropped (first appearance kept), so dichotomy entries follow the order
// of distinct points in `b`. The result is sorted lexicographically.
std::vector<Dichotomy> Project(const ConceptClass& cls, std::span<const Point> b,
                               const ProjectionOptions& opts = {});

// Projection along with, for each dichotomy, the lowest-index concept
// realizing it. Rows are sorted lexicographically by dichotomy.
struct Projection {
  std::vector<Point> points;  // deduplicated b, in first-appearance order
  std::vector<Dichotomy> dichotomies;
  std::vector<Concept> witnesses;
};
Projection ProjectWithWitnesses(const ConceptClass& cls, std::span<const Point> b,
                                const ProjectionOptions& opts = {});

// Lowest-index concept labeling the points of `b` according to `z`, if one
// exists. `z` aligns with `b` entry by entry; duplicated points with
// conflicting requested labels make the dichotomy unrealizable.
std::optional<Concept> ConsistentConcept(const ConceptClass& cls,
                                         std::span<const Point> b,
                                         const Dichotomy& z,
                                         const ProjectionOptions& opts = {});

struct VcOptions {
  // Cap on the number of point subsets whose projection is examined.
  std::uint64_t subset_budget = std::uint64_t{1} << 20;
  std::uint64_t eval_budget = kDefaultEvalBudget;
};

// Exact dimension by exhaustive shattering search, smallest subsets first.
// The result is cached on the class. Throws ResourceError over budget.
int VcDimension(const ConceptClass& cls, const VcOptions& opts = {});

// Fraction of records where the hypothesis disagrees with the label. All
// records must be labeled; the list must be nonempty.
Fraction EmpiricalError(const Hypothesis& h, std::span<const LabeledExample> s);
Fraction EmpiricalError(const ConceptClass& cls, Concept c,
                        std::span<const LabeledExample> s);

// Fraction of the point multiset where two hypotheses disagree.
Fraction DisagreementRate(const Hypothesis& h, const Hypothesis& f,
                          std::span<const Point> points);

struct ErrorEstimate {
  double value = 0;
  double ci_half_width = 0;  // 0 for exact results
  bool exact = false;
};

// Mass of the disagreement region between `h` and `target` under `mu`,
// summed exactly over the domain.
ErrorEstimate GeneralizationError(const Hypothesis& h, const Hypothesis& target,
                                  const Distribution& mu);

// Monte Carlo estimate with a 95% Hoeffding half-width.
ErrorEstimate GeneralizationErrorMonteCarlo(const Hypothesis& h,
                                            const Hypothesis& target,
                                            const Distribution& mu,
                                            std::uint64_t samples,
                                            std::uint64_t seed);

}  // namespace pssl

#endif  // PSSL_CONCEPTS_H_
