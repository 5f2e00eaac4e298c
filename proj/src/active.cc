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

#include "pssl/active.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pssl/mechanisms.h"
#include "pssl/random.h"

namespace pssl {

LabelOracle::LabelOracle(std::vector<Point> pool,
                         std::vector<std::uint8_t> labels, std::uint64_t budget)
    : pool_(std::move(pool)), labels_(std::move(labels)), budget_(budget) {
  if (pool_.size() != labels_.size()) {
    throw InvalidInputError("oracle: pool and label sizes differ");
  }
  for (std::uint8_t y : labels_) {
    if (y > 1) throw InvalidInputError("oracle: labels must be 0 or 1");
  }
}

LabelOracle LabelOracle::FromConcept(const ConceptClass& cls, Concept target,
                                     std::vector<Point> pool,
                                     std::uint64_t budget) {
  std::vector<std::uint8_t> labels;
  labels.reserve(pool.size());
  for (Point x : pool) {
    labels.push_back(cls.Evaluate(target, x) ? 1 : 0);
  }
  return LabelOracle(std::move(pool), std::move(labels), budget);
}

int LabelOracle::Label(std::uint64_t index) {
  if (transcript_.size() >= budget_) {
    throw ProtocolError("oracle: query budget of " + std::to_string(budget_) +
                        " exhausted");
  }
  if (index >= pool_.size()) {
    throw InvalidInputError("oracle: query index out of range");
  }
  transcript_.push_back(index);
  return labels_[index];
}

ActiveRunResult RunActive(const ActiveLearner& learner, LabelOracle& oracle,
                          std::uint64_t seed) {
  if (oracle.pool().empty()) {
    throw InvalidInputError("active run: empty pool");
  }
  ActiveRunResult out;
  out.result = learner.RunActive(oracle, seed);
  out.transcript = oracle.transcript();
  return out;
}

PrefixQueryStrategy::PrefixQueryStrategy(std::shared_ptr<const Learner> base,
                                         std::uint64_t m)
    : base_(std::move(base)), m_(m) {
  if (base_ == nullptr) throw ConfigError("prefix strategy: null base learner");
  name_ = "prefixQuery(" + base_->name() + ")";
}

PrivacyParams PrefixQueryStrategy::declared() const {
  return base_->declared();
}

LearnerResult PrefixQueryStrategy::RunActive(LabelOracle& oracle,
                                             std::uint64_t seed) const {
  const std::vector<Point>& pool = oracle.pool();
  if (m_ > pool.size()) {
    throw InvalidInputError("prefix strategy: budget larger than the pool");
  }
  PartiallyLabeledDatabase db;
  db.records.reserve(pool.size());
  for (std::uint64_t i = 0; i < m_; ++i) {
    db.records.push_back({pool[i], static_cast<std::int8_t>(oracle.Label(i))});
  }
  for (std::uint64_t i = m_; i < pool.size(); ++i) {
    db.records.push_back({pool[i], kUnlabeled});
  }
  return base_->Run(db, seed);
}

FirstPositiveQueryStrategy::FirstPositiveQueryStrategy(Domain domain)
    : domain_(domain), name_("firstPositiveQuery") {}

PrivacyParams FirstPositiveQueryStrategy::declared() const {
  return {std::numeric_limits<double>::infinity(), 0};
}

LearnerResult FirstPositiveQueryStrategy::RunActive(LabelOracle& oracle,
                                                    std::uint64_t /*seed*/) const {
  const std::uint64_t limit =
      std::min<std::uint64_t>(oracle.pool().size(), oracle.budget());
  for (std::uint64_t i = oracle.queries_used(); i < limit; ++i) {
    if (oracle.Label(i) == 1) break;
  }
  LearnerResult out;
  out.hypothesis = Hypothesis::FromTable(
      domain_, std::vector<std::uint8_t>(domain_.cardinality(), 0));
  out.labeled_used = oracle.queries_used();
  out.declared = declared();
  return out;
}

std::uint64_t ActiveSubsampleInputSize(std::uint64_t base_total,
                                       double base_epsilon,
                                       double target_epsilon) {
  if (base_total == 0) {
    throw InvalidInputError("subsample pool size: base total must be positive");
  }
  if (!(target_epsilon > 0) || target_epsilon > 1) {
    throw InvalidInputError("subsample pool size: target epsilon must be in (0, 1]");
  }
  if (!std::isfinite(base_epsilon) || base_epsilon < 0) {
    throw InvalidInputError("subsample pool size: invalid base epsilon");
  }
  const double t = (static_cast<double>(base_total) / target_epsilon) *
                   (3.0 + std::exp(2.0 * base_epsilon));
  if (t >= 9.2e18) {
    throw InvalidInputError("subsample pool size: overflow");
  }
  return static_cast<std::uint64_t>(std::ceil(t));
}

SubsampleActiveLearner::SubsampleActiveLearner(
    std::shared_ptr<const Learner> base, std::uint64_t base_total,
    std::uint64_t base_labeled, double target_epsilon)
    : base_(std::move(base)),
      base_total_(base_total),
      base_labeled_(base_labeled),
      target_epsilon_(target_epsilon) {
  if (base_ == nullptr) throw ConfigError("subsample active: null base learner");
  if (base_labeled_ > base_total_) {
    throw ConfigError("subsample active: labeled count exceeds base total");
  }
  required_pool_ = ActiveSubsampleInputSize(
      base_total_, base_->declared().epsilon, target_epsilon_);
  name_ = "subsampleActive(" + base_->name() + ")";
}

PrivacyParams SubsampleActiveLearner::declared() const {
  const PrivacyStage stages[] = {
      PrivacyStage::Base(base_->declared()),
      PrivacyStage::ActiveSubsample(target_epsilon_)};
  return ComposeDeclaredPrivacy(stages);
}

LearnerResult SubsampleActiveLearner::RunActive(LabelOracle& oracle,
                                                std::uint64_t seed) const {
  const std::vector<Point>& pool = oracle.pool();
  if (pool.size() < required_pool_) {
    throw InvalidInputError("subsample active: pool smaller than " +
                            std::to_string(required_pool_) + " points");
  }
  // J: uniform random n-subset of the first t pool positions, in shuffled
  // order. The draw never looks at record contents.
  const std::vector<std::uint64_t> j =
      SubsampleIndices(required_pool_, base_total_, DeriveSeed(seed, 0));
  // K: the smallest m indices of J, queried in ascending order.
  std::vector<std::uint64_t> k(j.begin(), j.end());
  std::sort(k.begin(), k.end());
  k.resize(base_labeled_);

  PartiallyLabeledDatabase db;
  db.records.reserve(base_total_);
  for (std::uint64_t index : k) {
    db.records.push_back(
        {pool[index], static_cast<std::int8_t>(oracle.Label(index))});
  }
  for (std::uint64_t index : j) {
    if (!std::binary_search(k.begin(), k.end(), index)) {
      db.records.push_back({pool[index], kUnlabeled});
    }
  }
  LearnerResult out = base_->Run(db, DeriveSeed(seed, 1));
  out.labeled_used = base_labeled_;
  out.unlabeled_used = base_total_ - base_labeled_;
  out.declared = declared();
  return out;
}

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

class ActiveProbeMechanism : public Mechanism {
 public:
  ActiveProbeMechanism(const ActiveLearner& learner, std::uint64_t budget,
                       bool include_transcript)
      : learner_(learner),
        budget_(budget),
        include_transcript_(include_transcript),
        name_("transcriptProbe(" + learner.name() + ")") {}

  const std::string& name() const override { return name_; }
  PrivacyParams declared() const override { return learner_.declared(); }

  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    std::vector<Point> pool;
    std::vector<std::uint8_t> labels;
    pool.reserve(db.records.size());
    labels.reserve(db.records.size());
    for (const LabeledExample& e : db.records) {
      if (e.y != 0 && e.y != 1) {
        throw InvalidInputError("transcript probe: pools must be fully labeled");
      }
      pool.push_back(e.x);
      labels.push_back(static_cast<std::uint8_t>(e.y));
    }
    const std::uint64_t budget = budget_ == 0 ? pool.size() : budget_;
    LabelOracle oracle(std::move(pool), std::move(labels), budget);
    const ActiveRunResult run = RunActive(learner_, oracle, seed);

    std::uint64_t h = kFnvOffset;
    h = FnvByte(h, run.result.failed ? 1 : 0);
    if (!run.result.failed && run.result.hypothesis.valid()) {
      if (const auto c = run.result.hypothesis.AsConcept(); c.has_value()) {
        h = FnvWord(h, c->index);
      } else {
        const Domain dom = run.result.hypothesis.domain();
        for (Point p = 0; p < dom.cardinality(); ++p) {
          h = FnvByte(h, run.result.hypothesis.Evaluate(p) ? 1 : 0);
        }
      }
    }
    if (include_transcript_) {
      h = FnvWord(h, run.transcript.size());
      for (std::uint64_t q : run.transcript) h = FnvWord(h, q);
    }
    return static_cast<std::int64_t>(h & 0x7fffffffffffffffULL);
  }

 private:
  const ActiveLearner& learner_;
  std::uint64_t budget_;
  bool include_transcript_;
  std::string name_;
};

}  // namespace

AuditReport TranscriptLeakProbe(const ActiveLearner& learner,
                                const NeighborPair& pair, double delta,
                                std::uint64_t trials, std::uint64_t seed,
                                const LeakProbeOptions& opts) {
  const ActiveProbeMechanism mech(learner, opts.budget,
                                  opts.include_transcript);
  return EstimateEpsilon(mech, pair, delta, trials, seed, opts.audit);
}

}  // namespace pssl
