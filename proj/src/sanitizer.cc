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
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>

#include "pssl/mechanisms.h"
#include "pssl/random.h"

namespace pssl {

namespace {

void ValidateContract(double alpha, double beta, double epsilon) {
  if (!(alpha > 0) || alpha >= 1) {
    throw InvalidInputError("sanitizer: alpha must be in (0, 1)");
  }
  if (!(beta > 0) || beta >= 1) {
    throw InvalidInputError("sanitizer: beta must be in (0, 1)");
  }
  if (!(epsilon > 0)) {
    throw InvalidInputError("sanitizer: epsilon must be positive");
  }
}

// Number of size-k multisets over `card` points, i.e. C(card + k - 1, k),
// clamped to `limit` + 1 on overflow or excess.
std::uint64_t MultisetCount(std::uint64_t card, std::uint64_t k,
                            std::uint64_t limit) {
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (card - 1 + i) / i;  // exact: running value is C(card-1+i, i)
    if (result > limit) return limit + 1;
  }
  return static_cast<std::uint64_t>(result);
}

// Walks all size-k count vectors over `card` points in a fixed order (counts
// of point 0 ascending, then point 1, ...), maintaining per-behavior counts
// incrementally. `leaf` is called once per candidate.
class MultisetWalker {
 public:
  MultisetWalker(std::uint64_t card, std::uint64_t k, const BehaviorCatalog& cat)
      : card_(card), k_(k), cat_(cat), counts_(card, 0),
        behavior_counts_(cat.tables.size(), 0) {}

  void Walk(const std::function<void(std::span<const std::int64_t>)>& leaf) {
    Descend(0, k_, leaf);
  }

  std::span<const std::uint64_t> counts() const { return counts_; }

 private:
  void Apply(Point p, std::int64_t delta) {
    for (std::size_t b = 0; b < behavior_counts_.size(); ++b) {
      if (BehaviorBit(cat_, b, p)) behavior_counts_[b] += delta;
    }
  }

  void Descend(Point p, std::uint64_t rem,
               const std::function<void(std::span<const std::int64_t>)>& leaf) {
    if (p == card_ - 1) {
      counts_[p] = rem;
      Apply(p, static_cast<std::int64_t>(rem));
      leaf(behavior_counts_);
      Apply(p, -static_cast<std::int64_t>(rem));
      counts_[p] = 0;
      return;
    }
    for (std::uint64_t c = 0; c <= rem; ++c) {
      counts_[p] = c;
      if (c > 0) Apply(p, 1);
      Descend(p + 1, rem - c, leaf);
    }
    Apply(p, -static_cast<std::int64_t>(rem));
    counts_[p] = 0;
  }

  std::uint64_t card_;
  std::uint64_t k_;
  const BehaviorCatalog& cat_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::int64_t> behavior_counts_;
};

std::int64_t Score(std::span<const std::int64_t> input_counts,
                   std::span<const std::int64_t> candidate_counts,
                   std::int64_t input_size, std::int64_t mhat) {
  std::int64_t worst = 0;
  for (std::size_t b = 0; b < input_counts.size(); ++b) {
    worst = std::max(worst, std::abs(input_counts[b] * mhat -
                                     candidate_counts[b] * input_size));
  }
  return -worst;
}

}  // namespace

Fraction QueryValue(const ConceptClass& cls, Concept c, std::span<const Point> d) {
  if (d.empty()) throw InvalidInputError("QueryValue: empty point list");
  long long hits = 0;
  for (Point p : d) hits += cls.Evaluate(c, p);
  return Fraction(hits, static_cast<long long>(d.size()));
}

std::uint64_t SanitizedSize(int query_vc, double alpha, double kappa) {
  if (query_vc < 0) throw InvalidInputError("SanitizedSize: negative VC");
  if (!(alpha > 0) || alpha >= 1) {
    throw InvalidInputError("SanitizedSize: alpha must be in (0, 1)");
  }
  if (!(kappa > 0)) throw InvalidInputError("SanitizedSize: kappa must be positive");
  const double raw = kappa * static_cast<double>(query_vc) /
                     (alpha * alpha) * std::log(1.0 / alpha);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw)));
}

std::uint64_t RecommendedSanitizerInput(int query_vc, int domain_bits,
                                        double alpha, double beta,
                                        double epsilon) {
  ValidateContract(alpha, beta, epsilon);
  const double first = static_cast<double>(domain_bits) *
                       static_cast<double>(query_vc) * std::log(1.0 / alpha) /
                       (alpha * alpha * alpha * epsilon);
  const double second = std::log(1.0 / beta) / (epsilon * alpha);
  return static_cast<std::uint64_t>(std::ceil(first + second));
}

SyntheticDatabase Sanitize(std::span<const Point> d,
                           const ConceptClass& query_class, double alpha,
                           double beta, double epsilon, std::uint64_t seed,
                           const SanitizerOptions& opts) {
  ValidateContract(alpha, beta, epsilon);
  if (d.empty()) throw InvalidInputError("Sanitize: empty input database");
  const Domain& domain = query_class.domain();
  for (Point p : d) {
    if (!domain.Contains(p)) {
      throw InvalidInputError("Sanitize: input point outside the query domain");
    }
  }

  const int vc = query_class.known_vc().has_value()
                     ? *query_class.known_vc()
                     : VcDimension(query_class, {.eval_budget = opts.eval_budget});
  const std::uint64_t mhat = SanitizedSize(vc, alpha, opts.kappa);
  const std::uint64_t card = domain.cardinality();
  const BehaviorCatalog& cat = query_class.Behaviors(opts.eval_budget);
  const std::size_t nbeh = cat.tables.size();

  // Per-behavior counts of the input.
  std::vector<std::int64_t> input_counts(nbeh, 0);
  for (Point p : d) {
    for (std::size_t b = 0; b < nbeh; ++b) {
      input_counts[b] += BehaviorBit(cat, b, p);
    }
  }
  const auto input_size = static_cast<std::int64_t>(d.size());
  const auto smhat = static_cast<std::int64_t>(mhat);

  SyntheticDatabase out;
  out.target_size = mhat;
  out.input_below_recommended =
      d.size() < RecommendedSanitizerInput(vc, domain.bits_per_axis() * domain.axes(),
                                           alpha, beta, epsilon);

  Rng rng(seed);
  std::vector<std::uint64_t> chosen_counts(card, 0);

  const std::uint64_t cand_count = MultisetCount(card, mhat, opts.exhaustive_limit);
  const bool exhaustive =
      cand_count <= opts.exhaustive_limit &&
      cand_count <= opts.score_budget / std::max<std::uint64_t>(nbeh, 1);
  if (exhaustive) {
    std::vector<std::int64_t> scores;
    scores.reserve(cand_count);
    MultisetWalker walker(card, mhat, cat);
    walker.Walk([&](std::span<const std::int64_t> counts) {
      scores.push_back(Score(input_counts, counts, input_size, smhat));
    });
    const std::size_t pick = SampleExponentialMechanism(
        epsilon, scores, rng, ScoreSampler::kGumbelMax,
        static_cast<double>(mhat));
    // Second pass to the selected leaf; the walk order is deterministic.
    std::size_t leaf_index = 0;
    MultisetWalker rewalk(card, mhat, cat);
    rewalk.Walk([&](std::span<const std::int64_t>) {
      if (leaf_index++ == pick) {
        const auto counts = rewalk.counts();
        chosen_counts.assign(counts.begin(), counts.end());
      }
    });
  } else {
    out.approximate_sampler = true;
    // Metropolis walk over size-mhat multisets targeting
    // Pr[candidate] proportional to exp(eps * score / (2 * mhat)).
    std::vector<Point> state(mhat);
    std::vector<std::int64_t> state_counts(nbeh, 0);
    for (std::uint64_t i = 0; i < mhat; ++i) {
      state[i] = rng.NextBelow(card);
      for (std::size_t b = 0; b < nbeh; ++b) {
        state_counts[b] += BehaviorBit(cat, b, state[i]);
      }
    }
    std::int64_t current = Score(input_counts, state_counts, input_size, smhat);
    for (std::uint64_t step = 0; step < opts.walk_steps; ++step) {
      const std::uint64_t slot = rng.NextBelow(mhat);
      const Point old_p = state[slot];
      const Point new_p = rng.NextBelow(card);
      if (new_p == old_p) continue;
      for (std::size_t b = 0; b < nbeh; ++b) {
        state_counts[b] += static_cast<std::int64_t>(BehaviorBit(cat, b, new_p)) -
                           static_cast<std::int64_t>(BehaviorBit(cat, b, old_p));
      }
      const std::int64_t proposed =
          Score(input_counts, state_counts, input_size, smhat);
      const double log_accept = epsilon *
                                static_cast<double>(proposed - current) /
                                (2.0 * static_cast<double>(mhat));
      if (log_accept >= 0 || rng.NextDouble() < std::exp(log_accept)) {
        state[slot] = new_p;
        current = proposed;
      } else {
        for (std::size_t b = 0; b < nbeh; ++b) {
          state_counts[b] += static_cast<std::int64_t>(BehaviorBit(cat, b, old_p)) -
                             static_cast<std::int64_t>(BehaviorBit(cat, b, new_p));
        }
      }
    }
    for (Point p : state) ++chosen_counts[p];
  }

  out.points.reserve(mhat);
  for (Point p = 0; p < card; ++p) {
    for (std::uint64_t c = 0; c < chosen_counts[p]; ++c) out.points.push_back(p);
  }

  // Exhaustive diagnostic on the selected database.
  std::vector<std::int64_t> final_counts(nbeh, 0);
  for (Point p : out.points) {
    for (std::size_t b = 0; b < nbeh; ++b) {
      final_counts[b] += BehaviorBit(cat, b, p);
    }
  }
  Fraction worst(0);
  for (std::size_t b = 0; b < nbeh; ++b) {
    const long long diff = std::abs(input_counts[b] * smhat -
                                    final_counts[b] * input_size);
    const Fraction err(diff, input_size * smhat);
    if (err > worst) worst = err;
  }
  out.max_query_error = worst;
  return out;
}

LearnerSanitization SanitizeForLearner(std::span<const Point> d,
                                       const ConceptClass& cls, double alpha,
                                       double beta, double epsilon,
                                       std::uint64_t seed,
                                       const SanitizerOptions& opts) {
  ConceptClass query = ConceptClass::Disagreements(cls, opts.eval_budget);
  const int query_vc = VcDimension(query, {.eval_budget = opts.eval_budget});
  SyntheticDatabase syn = Sanitize(d, query, alpha, beta, epsilon, seed, opts);
  std::vector<Point> support;
  for (Point p : syn.points) {
    if (support.empty() || support.back() != p) support.push_back(p);
  }
  return {std::move(syn), std::move(support), std::move(query), query_vc};
}

}  // namespace pssl
