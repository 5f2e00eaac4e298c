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

#include "pssl/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pssl {

std::size_t SampleExponentialMechanism(double epsilon,
                                       std::span<const std::int64_t> scores,
                                       Rng& rng, ScoreSampler sampler,
                                       double sensitivity) {
  if (scores.empty()) {
    throw InvalidInputError("exponential mechanism: no candidates");
  }
  if (!(epsilon > 0)) {
    throw InvalidInputError("exponential mechanism: epsilon must be positive");
  }
  if (!(sensitivity > 0)) {
    throw InvalidInputError("exponential mechanism: sensitivity must be positive");
  }
  const double scale = epsilon / (2.0 * sensitivity);
  switch (sampler) {
    case ScoreSampler::kGumbelMax: {
      std::size_t best = 0;
      double best_key = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < scores.size(); ++i) {
        const double key =
            scale * static_cast<double>(scores[i]) + rng.NextGumbel();
        if (key > best_key) {
          best_key = key;
          best = i;
        }
      }
      return best;
    }
    case ScoreSampler::kLogCumulative: {
      // Shift by the max log-weight before exponentiation so the largest
      // weight is exactly 1.
      double max_lw = -std::numeric_limits<double>::infinity();
      for (std::int64_t s : scores) {
        max_lw = std::max(max_lw, scale * static_cast<double>(s));
      }
      std::vector<double> weights(scores.size());
      double total = 0;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        weights[i] = std::exp(scale * static_cast<double>(scores[i]) - max_lw);
        total += weights[i];
      }
      const double target = rng.NextDouble() * total;
      double acc = 0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
      }
      return weights.size() - 1;
    }
  }
  throw InvalidInputError("exponential mechanism: unknown sampler");
}

std::vector<std::int64_t> AgreementScores(const ConceptClass& cls,
                                          std::span<const Concept> candidates,
                                          std::span<const LabeledExample> s) {
  for (const LabeledExample& e : s) {
    if (e.y != 0 && e.y != 1) {
      throw InvalidInputError("AgreementScores: all records must be labeled");
    }
  }
  std::vector<std::int64_t> scores(candidates.size(), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::int64_t agree = 0;
    for (const LabeledExample& e : s) {
      agree += cls.Evaluate(candidates[i], e.x) == (e.y != 0);
    }
    scores[i] = agree;
  }
  return scores;
}

double MisclassificationTailBound(std::uint64_t candidate_count, double epsilon,
                                  std::uint64_t m, double margin) {
  if (candidate_count == 0 || !(epsilon > 0) || m == 0 || margin < 0) {
    throw InvalidInputError("MisclassificationTailBound: arguments must be positive");
  }
  const double bound = static_cast<double>(candidate_count) *
                       std::exp(-epsilon * margin * static_cast<double>(m) / 2.0);
  return std::min(1.0, bound);
}

namespace {

class RandomizedResponse : public Mechanism {
 public:
  explicit RandomizedResponse(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0)) {
      throw InvalidInputError("randomized response: epsilon must be positive");
    }
  }

  const std::string& name() const override {
    static const std::string kName = "randomizedResponse";
    return kName;
  }
  PrivacyParams declared() const override { return {epsilon_, 0}; }

  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    if (db.records.empty()) {
      throw InvalidInputError("randomized response: empty database");
    }
    const std::int8_t y = db.records[0].y;
    if (y != 0 && y != 1) {
      throw InvalidInputError("randomized response: record 0 must be labeled");
    }
    Rng rng(seed);
    const double flip = 1.0 / (1.0 + std::exp(epsilon_));
    const bool reported = rng.NextBernoulli(flip) ? (y == 0) : (y != 0);
    return reported ? 1 : 0;
  }

 private:
  double epsilon_;
};

}  // namespace

std::unique_ptr<Mechanism> MakeRandomizedResponse(double epsilon) {
  return std::make_unique<RandomizedResponse>(epsilon);
}

std::uint64_t SubsampleInputSize(std::uint64_t n, double base_epsilon,
                                 double target_epsilon) {
  if (n == 0) throw InvalidInputError("SubsampleInputSize: n must be positive");
  if (!(target_epsilon > 0) || target_epsilon > 1) {
    throw InvalidInputError("SubsampleInputSize: target epsilon must be in (0, 1]");
  }
  if (base_epsilon < 0) {
    throw InvalidInputError("SubsampleInputSize: base epsilon must be nonnegative");
  }
  const double t = (static_cast<double>(n) / target_epsilon) *
                   (3.0 + std::exp(base_epsilon));
  return static_cast<std::uint64_t>(std::ceil(t));
}

double SubsampleDelta(double delta, double base_epsilon, double target_epsilon) {
  if (delta < 0) throw InvalidInputError("SubsampleDelta: delta must be nonnegative");
  return 4.0 * target_epsilon * delta / (3.0 + std::exp(base_epsilon));
}

std::vector<std::uint64_t> SubsampleIndices(std::uint64_t t, std::uint64_t n,
                                            std::uint64_t seed) {
  if (n == 0 || n > t) {
    throw InvalidInputError("SubsampleIndices: need 0 < n <= t");
  }
  std::vector<std::uint64_t> idx(t);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // The first n entries of a partial Fisher-Yates pass are a uniformly random
  // ordered n-tuple: subset choice and shuffle in one step.
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t j = i + rng.NextBelow(t - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

namespace {

class Subsampled : public Mechanism {
 public:
  Subsampled(std::shared_ptr<const Mechanism> base, std::uint64_t n,
             double target_epsilon)
      : base_(std::move(base)),
        n_(n),
        target_epsilon_(target_epsilon),
        t_(SubsampleInputSize(n, base_->declared().epsilon, target_epsilon)),
        name_("subsample(" + base_->name() + ")") {}

  const std::string& name() const override { return name_; }

  PrivacyParams declared() const override {
    const PrivacyParams base = base_->declared();
    return {target_epsilon_,
            SubsampleDelta(base.delta, base.epsilon, target_epsilon_)};
  }

  std::uint64_t required_input_size() const { return t_; }

  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    if (db.records.size() < t_) {
      throw InvalidInputError("subsample wrapper: input smaller than " +
                              std::to_string(t_) + " records");
    }
    const std::vector<std::uint64_t> picks =
        SubsampleIndices(db.records.size(), n_, DeriveSeed(seed, 0));
    PartiallyLabeledDatabase sub;
    sub.records.reserve(n_);
    for (std::uint64_t i : picks) sub.records.push_back(db.records[i]);
    return base_->Run(sub, DeriveSeed(seed, 1));
  }

 private:
  std::shared_ptr<const Mechanism> base_;
  std::uint64_t n_;
  double target_epsilon_;
  std::uint64_t t_;
  std::string name_;
};

class IidResampled : public Mechanism {
 public:
  explicit IidResampled(std::shared_ptr<const Mechanism> base)
      : base_(std::move(base)), name_("iidResample(" + base_->name() + ")") {
    if (base_->declared().epsilon > 1.0) {
      throw InvalidInputError(
          "iid resample wrapper: base mechanism must declare epsilon <= 1");
    }
  }

  const std::string& name() const override { return name_; }

  PrivacyParams declared() const override {
    return {kIidResampleEpsilon,
            kIidResampleDeltaFactor * base_->declared().delta};
  }

  std::int64_t Run(const PartiallyLabeledDatabase& db,
                   std::uint64_t seed) const override {
    if (db.records.empty()) {
      throw InvalidInputError("iid resample wrapper: empty database");
    }
    Rng rng(DeriveSeed(seed, 0));
    PartiallyLabeledDatabase sample;
    sample.records.reserve(db.records.size());
    for (std::size_t i = 0; i < db.records.size(); ++i) {
      sample.records.push_back(db.records[rng.NextBelow(db.records.size())]);
    }
    return base_->Run(sample, DeriveSeed(seed, 1));
  }

 private:
  std::shared_ptr<const Mechanism> base_;
  std::string name_;
};

}  // namespace

std::unique_ptr<Mechanism> SubsampleWrapper(std::shared_ptr<const Mechanism> base,
                                            std::uint64_t base_input_size,
                                            double target_epsilon) {
  if (base == nullptr) throw InvalidInputError("subsample wrapper: null base");
  return std::make_unique<Subsampled>(std::move(base), base_input_size,
                                      target_epsilon);
}

std::unique_ptr<Mechanism> IidResampleWrapper(std::shared_ptr<const Mechanism> base) {
  if (base == nullptr) throw InvalidInputError("iid resample wrapper: null base");
  return std::make_unique<IidResampled>(std::move(base));
}

PrivacyParams ComposeDeclaredPrivacy(std::span<const PrivacyStage> stages) {
  PrivacyParams p{0, 0};
  for (const PrivacyStage& stage : stages) {
    switch (stage.kind) {
      case PrivacyStage::Kind::kBase:
        p.epsilon += stage.base.epsilon;
        p.delta += stage.base.delta;
        break;
      case PrivacyStage::Kind::kRelabelingPass:
        p.epsilon += 3.0;
        p.delta *= 4.0 * std::exp(1.0);
        break;
      case PrivacyStage::Kind::kSubsample: {
        if (!(stage.target_epsilon > 0) || stage.target_epsilon > 1) {
          throw InvalidInputError(
              "ComposeDeclaredPrivacy: subsample target epsilon must be in (0, 1]");
        }
        p.delta = SubsampleDelta(p.delta, p.epsilon, stage.target_epsilon);
        p.epsilon = stage.target_epsilon;
        break;
      }
      case PrivacyStage::Kind::kIidResample:
        if (p.epsilon > 1.0) {
          throw InvalidInputError(
              "ComposeDeclaredPrivacy: iid resample requires epsilon <= 1");
        }
        p.epsilon = kIidResampleEpsilon;
        p.delta *= kIidResampleDeltaFactor;
        break;
      case PrivacyStage::Kind::kActiveSubsample: {
        if (!(stage.target_epsilon > 0) || stage.target_epsilon > 1) {
          throw InvalidInputError(
              "ComposeDeclaredPrivacy: subsample target epsilon must be in (0, 1]");
        }
        const double factor = (7.0 + std::exp(p.epsilon)) /
                              (3.0 + std::exp(2.0 * p.epsilon));
        p.delta = factor * stage.target_epsilon * p.delta;
        p.epsilon = stage.target_epsilon;
        break;
      }
    }
  }
  return p;
}

}  // namespace pssl
