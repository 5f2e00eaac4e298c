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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "pssl/random.h"

namespace pssl {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t FnvByte(std::uint64_t h, unsigned char b) {
  return (h ^ b) * kFnvPrime;
}

std::uint64_t FnvWord(std::uint64_t h, std::uint64_t w) {
  for (int i = 0; i < 8; ++i) {
    h = FnvByte(h, static_cast<unsigned char>(w >> (8 * i)));
  }
  return h;
}

// Two-sided Clopper-Pearson interval endpoints for k successes in n draws.
double BinomialLower(std::uint64_t k, std::uint64_t n, double tail) {
  if (k == 0) return 0.0;
  boost::math::beta_distribution<double> dist(static_cast<double>(k),
                                              static_cast<double>(n - k + 1));
  return boost::math::quantile(dist, tail);
}

double BinomialUpper(std::uint64_t k, std::uint64_t n, double tail) {
  if (k == n) return 1.0;
  boost::math::beta_distribution<double> dist(static_cast<double>(k + 1),
                                              static_cast<double>(n - k));
  return boost::math::quantile(dist, 1.0 - tail);
}

}  // namespace

std::uint64_t HashDatabase(const PartiallyLabeledDatabase& db) {
  std::uint64_t h = kFnvOffset;
  for (const LabeledExample& e : db.records) {
    h = FnvWord(h, e.x);
    h = FnvByte(h, static_cast<unsigned char>(e.y + 1));
  }
  if (db.segments.has_value()) {
    h = FnvWord(h, db.segments->labeled_end);
    h = FnvWord(h, db.segments->expand_end);
  }
  return h;
}

NeighborPair MakeNeighbors(const PartiallyLabeledDatabase& base,
                           std::size_t index, LabeledExample replacement) {
  if (index >= base.records.size()) {
    throw InvalidInputError("neighbors: index out of range");
  }
  const LabeledExample& original = base.records[index];
  if (original.x == replacement.x && original.y == replacement.y) {
    throw InvalidInputError("neighbors: replacement equals the original record");
  }
  NeighborPair pair;
  pair.d1 = base;
  pair.d2 = base;
  pair.d2.records[index] = replacement;
  pair.diff_index = index;
  return pair;
}

AuditReport EstimateEpsilon(const Mechanism& mech, const NeighborPair& pair,
                            double delta, std::uint64_t trials,
                            std::uint64_t seed, const AuditOptions& opts) {
  if (pair.d1.records.size() != pair.d2.records.size()) {
    throw InvalidInputError("audit: databases must have equal length");
  }
  if (trials < opts.min_trials) {
    throw ConfigError("audit: trials below the configured minimum");
  }
  if (delta < 0 || !(opts.confidence > 0) || !(opts.confidence < 1)) {
    throw ConfigError("audit: invalid delta or confidence");
  }

  const std::uint64_t seed1 = seed ^ HashDatabase(pair.d1);
  const std::uint64_t seed2 = seed ^ HashDatabase(pair.d2);
  std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> counts;
  for (std::uint64_t t = 0; t < trials; ++t) {
    counts[mech.Run(pair.d1, DeriveSeed(seed1, t))].first++;
    counts[mech.Run(pair.d2, DeriveSeed(seed2, t))].second++;
  }

  AuditReport report;
  report.delta = delta;
  report.trials = trials;
  report.distinct_outcomes = counts.size();
  report.mechanism = mech.name();
  report.seed = seed;
  report.confidence = opts.confidence;
  report.outcome_counts.reserve(counts.size());
  for (const auto& [outcome, pair_counts] : counts) {
    report.outcome_counts.push_back(
        {outcome, pair_counts.first, pair_counts.second});
  }

  const double tail = (1.0 - opts.confidence) / 2.0;
  double best = 0.0;
  std::int64_t best_outcome = counts.empty() ? 0 : counts.begin()->first;
  bool infinite = false;
  const auto consider = [&](std::int64_t outcome, std::uint64_t k_num,
                            std::uint64_t k_den) {
    double numerator;
    double denominator;
    if (opts.clopper_pearson) {
      numerator = BinomialLower(k_num, trials, tail) - delta;
      denominator = BinomialUpper(k_den, trials, tail);
    } else {
      numerator =
          static_cast<double>(k_num) / static_cast<double>(trials) - delta;
      denominator = static_cast<double>(k_den) / static_cast<double>(trials);
    }
    if (numerator <= 0) return;
    if (denominator <= 0) {
      // Only reachable in raw mode; the upper confidence bound of a count
      // is always positive.
      if (!infinite) {
        infinite = true;
        best_outcome = outcome;
      }
      return;
    }
    const double eps = std::log(numerator / denominator);
    if (eps > best) {
      best = eps;
      best_outcome = outcome;
    }
  };
  if (opts.subset_events) {
    const std::size_t k = report.outcome_counts.size();
    if (k > 12) {
      throw ResourceError(
          "audit: subset-event scan limited to 12 distinct outcomes");
    }
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      std::uint64_t k1 = 0;
      std::uint64_t k2 = 0;
      std::int64_t member = 0;
      for (std::size_t b = 0; b < k; ++b) {
        if (mask & (1u << b)) {
          k1 += report.outcome_counts[b].count1;
          k2 += report.outcome_counts[b].count2;
          member = report.outcome_counts[b].outcome;
        }
      }
      consider(member, k1, k2);
      consider(member, k2, k1);
    }
  } else {
    for (const auto& [outcome, pair_counts] : counts) {
      consider(outcome, pair_counts.first, pair_counts.second);
      consider(outcome, pair_counts.second, pair_counts.first);
    }
  }
  report.infinite = infinite;
  report.epsilon_hat = infinite ? std::numeric_limits<double>::infinity() : best;
  report.witness_outcome = best_outcome;
  return report;
}

namespace {

class SelectionMechanism : public Mechanism {
 public:
  SelectionMechanism(ConceptClass cls, double epsilon, ScoreSampler sampler,
                     std::uint64_t eval_budget)
      : cls_(std::move(cls)),
        epsilon_(epsilon),
        sampler_(sampler),
        eval_budget_(eval_budget),
        name_("selection(" + cls_.Describe() + ")") {
    if (!(epsilon > 0)) throw ConfigError("selection: epsilon must be positive");
  }

  const std::string& name() const override { return name_; }
  PrivacyParams declared() const override { return {epsilon_, 0}; }

  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    if (LabeledPrefixSize(db) != db.records.size()) {
      throw InvalidInputError("selection: database must be fully labeled");
    }
    if (cls_.size() >
        eval_budget_ / std::max<std::uint64_t>(db.records.size(), 1)) {
      throw ResourceError("selection: class enumeration exceeds the budget");
    }
    std::vector<Concept> candidates(cls_.size());
    for (std::uint64_t c = 0; c < cls_.size(); ++c) candidates[c] = Concept{c};
    const std::vector<std::int64_t> scores =
        AgreementScores(cls_, candidates, db.records);
    Rng rng(seed);
    return static_cast<std::int64_t>(
        candidates[SampleExponentialMechanism(epsilon_, scores, rng, sampler_)]
            .index);
  }

 private:
  ConceptClass cls_;
  double epsilon_;
  ScoreSampler sampler_;
  std::uint64_t eval_budget_;
  std::string name_;
};

class RelabelPassMechanism : public Mechanism {
 public:
  RelabelPassMechanism(ConceptClass cls, const ExpansionOptions& opts)
      : cls_(std::move(cls)),
        opts_(opts),
        name_("relabelPass(" + cls_.Describe() + ")") {}

  const std::string& name() const override { return name_; }
  PrivacyParams declared() const override { return {3.0, 0}; }

  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    return static_cast<std::int64_t>(
        LabelExpansionPass(db, cls_, seed, opts_).chosen.index);
  }

 private:
  ConceptClass cls_;
  ExpansionOptions opts_;
  std::string name_;
};

class LearnerMechanism : public Mechanism {
 public:
  explicit LearnerMechanism(std::shared_ptr<const Learner> learner)
      : learner_(std::move(learner)), name_("learner(" + learner_->name() + ")") {}

  const std::string& name() const override { return name_; }
  PrivacyParams declared() const override { return learner_->declared(); }

  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    const LearnerResult r = learner_->Run(db, seed);
    std::uint64_t h = kFnvOffset;
    h = FnvByte(h, r.failed ? 1 : 0);
    if (!r.failed && r.hypothesis.valid()) {
      if (const auto c = r.hypothesis.AsConcept(); c.has_value()) {
        h = FnvByte(h, 1);
        h = FnvWord(h, c->index);
      } else {
        h = FnvByte(h, 2);
        const Domain dom = r.hypothesis.domain();
        for (Point p = 0; p < dom.cardinality(); ++p) {
          h = FnvByte(h, r.hypothesis.Evaluate(p) ? 1 : 0);
        }
      }
    }
    return static_cast<std::int64_t>(h & 0x7fffffffffffffffULL);
  }

 private:
  std::shared_ptr<const Learner> learner_;
  std::string name_;
};

}  // namespace

std::unique_ptr<Mechanism> MakeSelectionMechanism(ConceptClass cls,
                                                  double epsilon,
                                                  ScoreSampler sampler,
                                                  std::uint64_t eval_budget) {
  return std::make_unique<SelectionMechanism>(std::move(cls), epsilon, sampler,
                                              eval_budget);
}

std::unique_ptr<Mechanism> MakeRelabelPassMechanism(
    ConceptClass cls, const ExpansionOptions& opts) {
  return std::make_unique<RelabelPassMechanism>(std::move(cls), opts);
}

std::unique_ptr<Mechanism> MakeLearnerMechanism(
    std::shared_ptr<const Learner> learner) {
  if (learner == nullptr) throw ConfigError("learner mechanism: null learner");
  return std::make_unique<LearnerMechanism>(std::move(learner));
}

}  // namespace pssl
