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

#ifndef PSSL_MECHANISMS_H_
#define PSSL_MECHANISMS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pssl/concepts.h"
#include "pssl/database.h"
#include "pssl/errors.h"
#include "pssl/random.h"

namespace pssl {

// Declared differential-privacy parameters. These are metadata carried by
// mechanisms; the library never enforces privacy at runtime, the audit module
// is the verification path.
struct PrivacyParams {
  double epsilon = 0;
  double delta = 0;

  friend bool operator==(const PrivacyParams&, const PrivacyParams&) = default;
};

// Declared parameters of running a mechanism on an i.i.d. resample of its
// input, valid whenever the base mechanism satisfies epsilon <= 1.
inline const double kIidResampleEpsilon = 5.4971682252932021;  // ln(244)
inline constexpr double kIidResampleDeltaFactor = 2467.0;

enum class ScoreSampler {
  // Default: adds an independent Gumbel perturbation to each scaled score and
  // takes the argmax.
  kGumbelMax,
  // Cross-check: max-shifted exponentiation and a cumulative-sum draw.
  kLogCumulative,
};

// Draws an index with probability proportional to
// exp(epsilon * scores[i] / (2 * sensitivity)). The two samplers agree in
// distribution, not draw by draw. Throws InvalidInputError on an empty score
// list or a non-positive epsilon or sensitivity.
std::size_t SampleExponentialMechanism(double epsilon,
                                       std::span<const std::int64_t> scores,
                                       Rng& rng,
                                       ScoreSampler sampler = ScoreSampler::kGumbelMax,
                                       double sensitivity = 1.0);

// Agreement counts q(S, h) = |{i : h(x_i) = y_i}| for each candidate. The
// integer form keeps the score's sensitivity under a one-record change
// exactly 1. Records must all be labeled.
std::vector<std::int64_t> AgreementScores(const ConceptClass& cls,
                                          std::span<const Concept> candidates,
                                          std::span<const LabeledExample> s);

// Tail bound on selecting a candidate whose empirical error exceeds the best
// by more than `margin` when scores come from m records:
// min(1, candidate_count * exp(-epsilon * margin * m / 2)).
double MisclassificationTailBound(std::uint64_t candidate_count, double epsilon,
                                  std::uint64_t m, double margin);

// A randomized procedure with a discrete outcome, suitable for black-box
// auditing. Implementations must be pure functions of (database, seed).
class Mechanism {
 public:
  virtual ~Mechanism() = default;
  virtual const std::string& name() const = 0;
  virtual PrivacyParams declared() const = 0;
  virtual std::int64_t Run(const PartiallyLabeledDatabase& db,
                           std::uint64_t seed) const = 0;
};

// Randomized response on the label of record 0: reports the true label with
// probability e^epsilon / (1 + e^epsilon), the flipped one otherwise.
// Declared (epsilon, 0)-DP.
std::unique_ptr<Mechanism> MakeRandomizedResponse(double epsilon);

// Input size required by the subsampling amplification wrapper:
// t = ceil((n / target_epsilon) * (3 + e^{base_epsilon})). Requires
// 0 < target_epsilon <= 1.
std::uint64_t SubsampleInputSize(std::uint64_t n, double base_epsilon,
                                 double target_epsilon);

// Declared delta of the subsampled mechanism:
// 4 * target_epsilon * delta / (3 + e^{base_epsilon}).
double SubsampleDelta(double delta, double base_epsilon, double target_epsilon);

// The index sequence the subsample wrapper feeds its base mechanism: a
// uniformly random size-n subset of [0, t), in uniformly shuffled order.
// Depends only on (t, n, seed), never on record contents.
std::vector<std::uint64_t> SubsampleIndices(std::uint64_t t, std::uint64_t n,
                                            std::uint64_t seed);

// Amplification by subsampling: the wrapper takes a database of at least
// SubsampleInputSize(n, base eps, target eps) records, runs the base on a
// random shuffled n-subset, and declares
// (target_epsilon, SubsampleDelta(base delta, ...))-DP.
std::unique_ptr<Mechanism> SubsampleWrapper(std::shared_ptr<const Mechanism> base,
                                            std::uint64_t base_input_size,
                                            double target_epsilon);

// Runs the base on n records drawn i.i.d. with replacement from the n-record
// input. Requires base epsilon <= 1; declares
// (kIidResampleEpsilon, kIidResampleDeltaFactor * base delta)-DP.
std::unique_ptr<Mechanism> IidResampleWrapper(std::shared_ptr<const Mechanism> base);

// One step of a declared-privacy derivation. Stages transform the running
// (epsilon, delta) pair mechanically; nothing is proved at runtime.
struct PrivacyStage {
  enum class Kind {
    kBase,             // adds `base` (sequential composition)
    kRelabelingPass,   // (eps, delta) -> (eps + 3, 4e * delta)
    kSubsample,        // (eps, delta) -> (target, 4 * target * delta / (3 + e^eps))
    kIidResample,      // requires eps <= 1; -> (ln 244, 2467 * delta)
    kActiveSubsample,  // (eps, delta) -> (target, (7 + e^eps)/(3 + e^{2 eps}) * target * delta)
  };

  Kind kind = Kind::kBase;
  PrivacyParams base;         // used by kBase
  double target_epsilon = 0;  // used by kSubsample and kActiveSubsample

  static PrivacyStage Base(PrivacyParams p) {
    return PrivacyStage{Kind::kBase, p, 0};
  }
  static PrivacyStage RelabelingPass() {
    return PrivacyStage{Kind::kRelabelingPass, {}, 0};
  }
  static PrivacyStage Subsample(double target_epsilon) {
    return PrivacyStage{Kind::kSubsample, {}, target_epsilon};
  }
  static PrivacyStage IidResample() {
    return PrivacyStage{Kind::kIidResample, {}, 0};
  }
  static PrivacyStage ActiveSubsample(double target_epsilon) {
    return PrivacyStage{Kind::kActiveSubsample, {}, target_epsilon};
  }
};

// Folds declared privacy through the stages in order, starting from (0, 0).
// An empty list is the identity. Throws InvalidInputError on a stage whose
// precondition the running pair violates.
PrivacyParams ComposeDeclaredPrivacy(std::span<const PrivacyStage> stages);

}  // namespace pssl

#endif  // PSSL_MECHANISMS_H_
