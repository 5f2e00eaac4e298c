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
//
// Active-learning layer: a pool/oracle protocol with query budgets and
// transcripts, plus a subsampling wrapper that runs a semi-supervised
// learner over a random sub-pool so the labeled cost stays fixed while the
// privacy parameter is amplified.

#ifndef PSSL_ACTIVE_H_
#define PSSL_ACTIVE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pssl/audit.h"
#include "pssl/concepts.h"
#include "pssl/database.h"
#include "pssl/errors.h"
#include "pssl/learners.h"

namespace pssl {

// Answers label queries by 0-based pool index, counts every query
// (duplicates included), and refuses queries past the budget.
class LabelOracle {
 public:
  // `labels[i]` (0 or 1) answers queries for pool index i.
  LabelOracle(std::vector<Point> pool, std::vector<std::uint8_t> labels,
              std::uint64_t budget);

  // Oracle whose answers are target(x_i).
  static LabelOracle FromConcept(const ConceptClass& cls, Concept target,
                                 std::vector<Point> pool, std::uint64_t budget);

  // Returns the label of pool index `index`. Throws ProtocolError once the
  // budget is exhausted and InvalidInputError for an out-of-range index.
  int Label(std::uint64_t index);

  const std::vector<Point>& pool() const { return pool_; }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t queries_used() const { return transcript_.size(); }
  // Ordered sequence of queried indices.
  const std::vector<std::uint64_t>& transcript() const { return transcript_; }

 private:
  std::vector<Point> pool_;
  std::vector<std::uint8_t> labels_;
  std::uint64_t budget_ = 0;
  std::vector<std::uint64_t> transcript_;
};

// A learner that sees the unlabeled pool and queries labels through the
// oracle instead of receiving a labeled prefix.
class ActiveLearner {
 public:
  virtual ~ActiveLearner() = default;
  virtual const std::string& name() const = 0;
  virtual PrivacyParams declared() const = 0;
  virtual LearnerResult RunActive(LabelOracle& oracle,
                                  std::uint64_t seed) const = 0;
};

struct ActiveRunResult {
  LearnerResult result;
  std::vector<std::uint64_t> transcript;
};

// Mediates one protocol round-trip: runs the learner against the oracle
// and returns the hypothesis together with the verbatim transcript.
// Budget violations surface as ProtocolError from the oracle.
ActiveRunResult RunActive(const ActiveLearner& learner, LabelOracle& oracle,
                          std::uint64_t seed);

// Adapts a semi-supervised learner: queries the fixed prefix 0..m-1, then
// runs the base on the pool with that prefix labeled and the rest
// unlabeled. The transcript is always (0, 1, ..., m-1).
class PrefixQueryStrategy : public ActiveLearner {
 public:
  PrefixQueryStrategy(std::shared_ptr<const Learner> base, std::uint64_t m);
  const std::string& name() const override { return name_; }
  PrivacyParams declared() const override;
  LearnerResult RunActive(LabelOracle& oracle,
                          std::uint64_t seed) const override;

 private:
  std::shared_ptr<const Learner> base_;
  std::uint64_t m_;
  std::string name_;
};

// Deliberately leaky strategy for transcript probes: scans indices
// 0, 1, 2, ... until it sees a 1-label or runs out of budget, then returns
// a constant all-zeros hypothesis. Its transcript length depends on the
// data, so neighbors are distinguishable from the transcript alone.
class FirstPositiveQueryStrategy : public ActiveLearner {
 public:
  explicit FirstPositiveQueryStrategy(Domain domain);
  const std::string& name() const override { return name_; }
  PrivacyParams declared() const override;
  LearnerResult RunActive(LabelOracle& oracle,
                          std::uint64_t seed) const override;

 private:
  Domain domain_;
  std::string name_;
};

// Pool size required by the subsampling wrapper:
// ceil((n / target_epsilon) * (3 + exp(2 * base_epsilon))).
std::uint64_t ActiveSubsampleInputSize(std::uint64_t base_total,
                                       double base_epsilon,
                                       double target_epsilon);

// Subsampling wrapper: draws a uniform random size-n index set J from the
// first t pool positions (t as above), queries exactly the smallest m
// indices of J in ascending order, and runs the base learner on those m
// labeled records followed by the remaining n-m as unlabeled. The queried
// set never depends on record contents, so the transcript leaks nothing
// beyond the output. Declares
// (target_epsilon, (7+e^eps*)/(3+e^{2 eps*}) * target_epsilon * delta*).
class SubsampleActiveLearner : public ActiveLearner {
 public:
  SubsampleActiveLearner(std::shared_ptr<const Learner> base,
                         std::uint64_t base_total, std::uint64_t base_labeled,
                         double target_epsilon);
  const std::string& name() const override { return name_; }
  PrivacyParams declared() const override;
  LearnerResult RunActive(LabelOracle& oracle,
                          std::uint64_t seed) const override;
  std::uint64_t required_pool() const { return required_pool_; }

 private:
  std::shared_ptr<const Learner> base_;
  std::uint64_t base_total_;
  std::uint64_t base_labeled_;
  double target_epsilon_;
  std::uint64_t required_pool_ = 0;
  std::string name_;
};

struct LeakProbeOptions {
  // 0 means "the whole pool".
  std::uint64_t budget = 0;
  // When false, the outcome hashes the output hypothesis only; when true,
  // the transcript is hashed in as well. Comparing the two estimates shows
  // whether the transcript carries extra information.
  bool include_transcript = true;
  AuditOptions audit;
};

// Estimates the privacy loss of the joint (output, transcript) observable
// on a pair of fully labeled neighboring pools. Labels come from the
// database records; the learner's budget restricts access.
AuditReport TranscriptLeakProbe(const ActiveLearner& learner,
                                const NeighborPair& pair, double delta,
                                std::uint64_t trials, std::uint64_t seed,
                                const LeakProbeOptions& opts = {});

}  // namespace pssl

#endif  // PSSL_ACTIVE_H_
