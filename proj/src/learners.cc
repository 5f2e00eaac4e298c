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

#include "pssl/learners.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pssl/random.h"

namespace pssl {

std::uint64_t LabeledPrefixSize(const PartiallyLabeledDatabase& db) {
  std::uint64_t m = 0;
  bool in_prefix = true;
  for (const LabeledExample& e : db.records) {
    if (in_prefix && (e.y == 0 || e.y == 1)) {
      ++m;
    } else if (e.y == kUnlabeled) {
      in_prefix = false;
    } else if (!in_prefix) {
      throw InvalidInputError("labeled record after an unlabeled one");
    } else {
      throw InvalidInputError("labels must be 0, 1, or unlabeled");
    }
  }
  return m;
}

namespace {

void RequireFullyLabeled(const PartiallyLabeledDatabase& db,
                         const std::string& who) {
  if (db.records.empty()) throw InvalidInputError(who + ": empty database");
  if (LabeledPrefixSize(db) != db.records.size()) {
    throw InvalidInputError(who + ": database must be fully labeled");
  }
}

// Keeps a uniformly random size-`keep` subset of `v`, preserving the
// relative order of survivors.
template <typename T>
void KeepRandomSubset(std::vector<T>& v, std::uint64_t keep, Rng& rng) {
  const std::uint64_t n = v.size();
  if (keep >= n) return;
  std::vector<std::uint64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::uint64_t i = 0; i < keep; ++i) {
    const std::uint64_t j = i + rng.NextBelow(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<T> kept;
  kept.reserve(keep);
  for (std::uint64_t i : idx) kept.push_back(v[i]);
  v = std::move(kept);
}

}  // namespace

ErmLearner::ErmLearner(ConceptClass cls, std::uint64_t eval_budget)
    : cls_(std::move(cls)), eval_budget_(eval_budget) {}

const std::string& ErmLearner::name() const {
  static const std::string kName = "erm";
  return kName;
}

PrivacyParams ErmLearner::declared() const {
  return {std::numeric_limits<double>::infinity(), 0};
}

LearnerResult ErmLearner::Run(const PartiallyLabeledDatabase& db,
                              std::uint64_t /*seed*/) const {
  RequireFullyLabeled(db, "erm");
  const std::uint64_t card = cls_.domain().cardinality();
  LearnerResult out;
  out.labeled_used = db.records.size();
  out.declared = declared();

  std::uint64_t best_index = 0;
  std::uint64_t best_miss = std::numeric_limits<std::uint64_t>::max();
  if (cls_.size() <= eval_budget_ / std::max<std::uint64_t>(card, 1)) {
    // Catalog path: every concept's error equals its behavior's error, and
    // witnesses are the lowest indices, so the lowest-index minimizer is the
    // witness of the best behavior.
    const BehaviorCatalog& cat = cls_.Behaviors(eval_budget_);
    for (std::size_t t = 0; t < cat.tables.size(); ++t) {
      std::uint64_t miss = 0;
      for (const LabeledExample& e : db.records) {
        miss += BehaviorBit(cat, t, e.x) != (e.y != 0);
      }
      if (miss < best_miss ||
          (miss == best_miss && cat.witnesses[t] < best_index)) {
        best_miss = miss;
        best_index = cat.witnesses[t];
      }
    }
  } else {
    if (cls_.size() > eval_budget_ / std::max<std::uint64_t>(db.records.size(), 1)) {
      throw ResourceError("erm: class enumeration exceeds the evaluation budget");
    }
    for (std::uint64_t c = 0; c < cls_.size(); ++c) {
      std::uint64_t miss = 0;
      for (const LabeledExample& e : db.records) {
        miss += cls_.Evaluate(Concept{c}, e.x) != (e.y != 0);
      }
      if (miss < best_miss) {
        best_miss = miss;
        best_index = c;
      }
    }
  }
  out.hypothesis = Hypothesis::FromConcept(cls_, Concept{best_index});
  return out;
}

PrivateSelectionLearner::PrivateSelectionLearner(ConceptClass cls, double epsilon,
                                                 ScoreSampler sampler,
                                                 std::uint64_t eval_budget)
    : cls_(std::move(cls)),
      epsilon_(epsilon),
      sampler_(sampler),
      eval_budget_(eval_budget) {
  if (!(epsilon > 0)) {
    throw ConfigError("privateSelection: epsilon must be positive");
  }
}

const std::string& PrivateSelectionLearner::name() const {
  static const std::string kName = "privateSelection";
  return kName;
}

PrivacyParams PrivateSelectionLearner::declared() const { return {epsilon_, 0}; }

LearnerResult PrivateSelectionLearner::Run(const PartiallyLabeledDatabase& db,
                                           std::uint64_t seed) const {
  RequireFullyLabeled(db, "privateSelection");
  if (cls_.size() > eval_budget_ / std::max<std::uint64_t>(db.records.size(), 1)) {
    throw ResourceError(
        "privateSelection: class enumeration exceeds the evaluation budget");
  }
  std::vector<Concept> candidates(cls_.size());
  for (std::uint64_t c = 0; c < cls_.size(); ++c) candidates[c] = Concept{c};
  const std::vector<std::int64_t> scores =
      AgreementScores(cls_, candidates, db.records);
  Rng rng(seed);
  const std::size_t pick =
      SampleExponentialMechanism(epsilon_, scores, rng, sampler_);
  LearnerResult out;
  out.hypothesis = Hypothesis::FromConcept(cls_, candidates[pick]);
  out.labeled_used = db.records.size();
  out.declared = declared();
  return out;
}

std::uint64_t GenericLearnerLabeledSize(int vc, double alpha, double beta,
                                        double epsilon, double factor) {
  if (vc < 0 || !(alpha > 0) || alpha >= 1 || !(beta > 0) || beta >= 1 ||
      !(epsilon > 0) || !(factor > 0)) {
    throw InvalidInputError("GenericLearnerLabeledSize: invalid parameters");
  }
  const double main = static_cast<double>(vc) * std::log(1.0 / alpha) /
                      (alpha * alpha * alpha * epsilon);
  const double tail = std::log(1.0 / beta) / (alpha * epsilon);
  return static_cast<std::uint64_t>(std::ceil(factor * (main + tail)));
}

std::uint64_t GenericLearnerTotalSize(int vc, int domain_bits, double alpha,
                                      double beta, double epsilon,
                                      double factor) {
  if (domain_bits <= 0) {
    throw InvalidInputError("GenericLearnerTotalSize: invalid domain bits");
  }
  if (vc < 0 || !(alpha > 0) || alpha >= 1 || !(beta > 0) || beta >= 1 ||
      !(epsilon > 0) || !(factor > 0)) {
    throw InvalidInputError("GenericLearnerTotalSize: invalid parameters");
  }
  const double main = static_cast<double>(domain_bits) *
                      static_cast<double>(vc) * std::log(1.0 / alpha) /
                      (alpha * alpha * alpha * epsilon);
  const double tail = std::log(1.0 / beta) / (alpha * epsilon);
  return static_cast<std::uint64_t>(std::ceil(factor * (main + tail)));
}

SanitizeSelectLearner::SanitizeSelectLearner(ConceptClass cls, double alpha,
                                             double beta, double epsilon,
                                             SanitizeSelectOptions opts)
    : cls_(std::move(cls)),
      alpha_(alpha),
      beta_(beta),
      epsilon_(epsilon),
      opts_(opts) {
  if (!(alpha > 0) || alpha >= 1 || !(beta > 0) || beta >= 1) {
    throw ConfigError("sanitizeSelect: alpha and beta must be in (0, 1)");
  }
  if (!(epsilon > 0)) throw ConfigError("sanitizeSelect: epsilon must be positive");
}

const std::string& SanitizeSelectLearner::name() const {
  static const std::string kName = "sanitizeSelect";
  return kName;
}

PrivacyParams SanitizeSelectLearner::declared() const {
  return {2.0 * epsilon_, 0};
}

LearnerResult SanitizeSelectLearner::Run(const PartiallyLabeledDatabase& db,
                                         std::uint64_t seed) const {
  return RunDetailed(db, seed).result;
}

SanitizeSelectDetail SanitizeSelectLearner::RunDetailed(
    const PartiallyLabeledDatabase& db, std::uint64_t seed) const {
  const std::uint64_t m = LabeledPrefixSize(db);
  if (m == db.records.size()) {
    throw InvalidInputError("sanitizeSelect: needs at least one unlabeled record");
  }
  std::vector<Point> unlabeled;
  unlabeled.reserve(db.records.size() - m);
  for (std::size_t i = m; i < db.records.size(); ++i) {
    unlabeled.push_back(db.records[i].x);
  }

  SanitizeSelectDetail detail;
  LearnerSanitization san =
      SanitizeForLearner(unlabeled, cls_, alpha_, beta_, epsilon_,
                         DeriveSeed(seed, 0), opts_.sanitizer);
  const Projection proj = ProjectWithWitnesses(
      cls_, san.support, {.eval_budget = opts_.eval_budget});
  const std::span<const LabeledExample> labeled(db.records.data(), m);
  const std::vector<std::int64_t> scores =
      AgreementScores(cls_, proj.witnesses, labeled);
  Rng rng(DeriveSeed(seed, 1));
  const std::size_t pick =
      SampleExponentialMechanism(epsilon_, scores, rng, opts_.sampler);

  detail.result.hypothesis =
      Hypothesis::FromConcept(cls_, proj.witnesses[pick]);
  detail.result.labeled_used = m;
  detail.result.unlabeled_used = unlabeled.size();
  detail.result.declared = declared();
  detail.declared_disjoint = {epsilon_, 0};
  detail.support_size = san.support.size();
  detail.hypothesis_count = proj.witnesses.size();
  detail.synthetic = std::move(san.synthetic);
  return detail;
}

ExpansionPassResult LabelExpansionPass(const PartiallyLabeledDatabase& db,
                                       const ConceptClass& cls,
                                       std::uint64_t seed,
                                       const ExpansionOptions& opts) {
  ValidateSegments(db);
  const Segmentation seg = *db.segments;

  // Distinct points of the first two segments, ascending.
  std::vector<Point> pts;
  pts.reserve(seg.expand_end);
  for (std::size_t i = 0; i < seg.expand_end; ++i) pts.push_back(db.records[i].x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const Projection proj =
      ProjectWithWitnesses(cls, pts, {.eval_budget = opts.eval_budget});
  const std::span<const LabeledExample> labeled(db.records.data(),
                                                seg.labeled_end);
  const std::vector<std::int64_t> scores =
      AgreementScores(cls, proj.witnesses, labeled);
  Rng rng(seed);
  const std::size_t pick =
      SampleExponentialMechanism(1.0, scores, rng, opts.sampler);
  const Concept chosen = proj.witnesses[pick];

  ExpansionPassResult out;
  out.database.records = db.records;
  for (std::size_t i = 0; i < seg.expand_end; ++i) {
    out.database.records[i].y =
        cls.Evaluate(chosen, out.database.records[i].x) ? 1 : 0;
  }
  out.database.segments = Segmentation{seg.expand_end, seg.expand_end};
  out.chosen = chosen;
  out.hypothesis_count = proj.witnesses.size();
  out.support_size = pts.size();
  return out;
}

double LabelBoostSchedule::AlphaAt(int i) const {
  return alpha / (10.0 * std::exp2(static_cast<double>(i)));
}

double LabelBoostSchedule::BetaAt(int i) const {
  return beta / (4.0 * std::exp2(static_cast<double>(i)));
}

namespace {

// c * n * scale rounded to nearest. The products are exact in doubles at
// any plausible size, and fixtures pick scales where c * n * scale is
// integral, so nearest-rounding just cancels representation noise.
std::uint64_t ScaledConstant(std::uint64_t c, std::uint64_t n, double scale) {
  const double value = static_cast<double>(c) * static_cast<double>(n) * scale;
  if (value >= 9.2e18) {
    throw InvalidInputError("label boost: scaled size constant overflows");
  }
  return static_cast<std::uint64_t>(std::llround(value));
}

}  // namespace

std::uint64_t LabelBoostSchedule::LoopTarget() const {
  return ScaledConstant(300, base_sample_size, scale);
}

std::uint64_t LabelBoostSchedule::PoolMinimum() const {
  return ScaledConstant(90000, base_sample_size, scale);
}

std::uint64_t LabelBoostSchedule::IterationCap() const {
  return ScaledConstant(30000, base_sample_size, scale);
}

std::uint64_t LabelBoostSchedule::MinLabeled() const {
  const double denom = agnostic ? alpha * alpha : alpha;
  const double raw = scale * (96000.0 / denom) * static_cast<double>(vc) *
                     std::log(2240.0 / (alpha * beta));
  return static_cast<std::uint64_t>(
      std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

double LabelBoostSchedule::GrowthAllowanceLog(int i, std::uint64_t s) const {
  return std::log(BetaAt(i) * static_cast<double>(vc)) +
         AlphaAt(i) * static_cast<double>(s) /
             (200.0 * static_cast<double>(vc) * scale);
}

std::uint64_t LabelBoostSchedule::GrowthAllowance(int i, std::uint64_t s) const {
  const double lg = GrowthAllowanceLog(i, s);
  const double kLogCap = 42.975125194716609;  // ln(2^62)
  if (lg >= kLogCap) return std::uint64_t{1} << 62;
  const double value = std::exp(lg);
  return value <= 0 ? 0 : static_cast<std::uint64_t>(std::floor(value));
}

std::uint64_t LabelBoostSchedule::VAt(int i, std::uint64_t s) const {
  const std::uint64_t allowance = GrowthAllowance(i, s);
  if (allowance <= s) return 0;
  return std::min(IterationCap(), allowance - s);
}

std::uint64_t LabelBoostSchedule::KeepAfterDeletion(std::uint64_t size,
                                                    std::uint64_t num,
                                                    std::uint64_t den) {
  return size - (num * size) / den;
}

LabelBoostLearner::LabelBoostLearner(ConceptClass cls,
                                     std::shared_ptr<const Learner> base,
                                     std::uint64_t base_sample_size,
                                     double alpha, double beta,
                                     LabelBoostOptions opts)
    : cls_(std::move(cls)), base_(std::move(base)), opts_(opts) {
  if (base_ == nullptr) throw ConfigError("labelBoost: null base learner");
  if (!(alpha > 0) || alpha >= 1 || !(beta > 0) || beta >= 1) {
    throw ConfigError("labelBoost: alpha and beta must be in (0, 1)");
  }
  if (base_sample_size == 0) {
    throw ConfigError("labelBoost: base sample size must be positive");
  }
  if (!(opts.scale > 0)) throw ConfigError("labelBoost: scale must be positive");
  if (!(base_->declared().epsilon <= 1.0)) {
    throw ConfigError("labelBoost: base learner must declare epsilon <= 1");
  }
  schedule_.alpha = alpha;
  schedule_.beta = beta;
  schedule_.scale = opts.scale;
  schedule_.base_sample_size = base_sample_size;
  schedule_.agnostic = opts.agnostic;
  schedule_.vc = cls_.known_vc().has_value()
                     ? *cls_.known_vc()
                     : VcDimension(cls_, {.eval_budget = opts.eval_budget});
  if (schedule_.vc < 1) schedule_.vc = 1;
  name_ = (opts.agnostic ? std::string("labelBoostAgnostic(")
                         : std::string("labelBoost(")) +
          base_->name() + ")";
}

const std::string& LabelBoostLearner::name() const { return name_; }

PrivacyParams LabelBoostLearner::declared() const {
  return {1.0, 41.0 * base_->declared().delta};
}

LearnerResult LabelBoostLearner::Run(const PartiallyLabeledDatabase& db,
                                     std::uint64_t seed) const {
  return RunDetailed(db, seed).result;
}

LabelBoostDetail LabelBoostLearner::RunDetailed(
    const PartiallyLabeledDatabase& db, std::uint64_t seed) const {
  const std::uint64_t m = LabeledPrefixSize(db);
  LabelBoostDetail detail;
  detail.result.labeled_used = m;
  detail.result.declared = declared();

  std::vector<LabeledExample> s(db.records.begin(), db.records.begin() + m);
  const std::size_t pool_size = db.records.size() - m;
  std::size_t pool_head = m;

  detail.labeled_below_minimum = m < schedule_.MinLabeled();
  detail.pool_below_minimum = pool_size < schedule_.PoolMinimum();

  const std::uint64_t target = schedule_.LoopTarget();
  int i = 0;
  while (s.size() < target) {
    ++i;
    if (i > opts_.max_iterations) {
      detail.result.failed = true;
      detail.result.failure_reason = "iteration cap exceeded";
      break;
    }
    BoostIterationStat stat;
    stat.index = i;
    stat.labeled_before = s.size();

    const std::uint64_t v = schedule_.VAt(i, s.size());
    if (v == 0) {
      detail.result.failed = true;
      detail.result.failure_reason =
          "relabeling growth stalled at iteration " + std::to_string(i);
      break;
    }
    if (v > db.records.size() - pool_head) {
      detail.result.failed = true;
      detail.result.failure_reason =
          "unlabeled pool exhausted at iteration " + std::to_string(i) +
          " (need " + std::to_string(v) + ", have " +
          std::to_string(db.records.size() - pool_head) + ")";
      break;
    }
    stat.attached = v;

    std::vector<LabeledExample> t;
    t.reserve(v);
    for (std::uint64_t k = 0; k < v; ++k) {
      t.push_back({db.records[pool_head + k].x, kUnlabeled});
    }
    pool_head += v;
    detail.pool_consumed += v;

    const std::uint64_t iter_seed = DeriveSeed(seed, static_cast<std::uint64_t>(i));
    {
      Rng del_t(DeriveSeed(iter_seed, 0));
      KeepRandomSubset(t, LabelBoostSchedule::KeepAfterDeletion(t.size(), 99, 100),
                       del_t);
      Rng del_s(DeriveSeed(iter_seed, 1));
      KeepRandomSubset(s, LabelBoostSchedule::KeepAfterDeletion(s.size(), 99, 100),
                       del_s);
    }
    stat.labeled_kept = s.size();
    stat.attached_kept = t.size();

    PartiallyLabeledDatabase pass_input;
    pass_input.records.reserve(s.size() + t.size());
    pass_input.records.insert(pass_input.records.end(), s.begin(), s.end());
    pass_input.records.insert(pass_input.records.end(), t.begin(), t.end());
    pass_input.segments = Segmentation{s.size(), s.size() + t.size()};
    ExpansionPassResult pass =
        LabelExpansionPass(pass_input, cls_, DeriveSeed(iter_seed, 2),
                           {opts_.sampler, opts_.eval_budget});
    s = std::move(pass.database.records);
    stat.labeled_after = s.size();
    stat.relabel_concept = pass.chosen.index;
    detail.iterations.push_back(stat);
  }

  detail.result.unlabeled_used = detail.pool_consumed;
  if (detail.result.failed) return detail;

  const std::uint64_t final_seed = DeriveSeed(seed, 0);
  {
    Rng del_final(DeriveSeed(final_seed, 0));
    KeepRandomSubset(s, LabelBoostSchedule::KeepAfterDeletion(s.size(), 299, 300),
                     del_final);
  }
  detail.final_kept = s.size();

  PartiallyLabeledDatabase resampled;
  if (s.empty()) {
    detail.result.failed = true;
    detail.result.failure_reason = "no labeled records left for the base learner";
    return detail;
  }
  Rng resample(DeriveSeed(final_seed, 1));
  resampled.records.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    resampled.records.push_back(s[resample.NextBelow(s.size())]);
  }

  LearnerResult base_result = base_->Run(resampled, DeriveSeed(final_seed, 2));
  detail.result.hypothesis = std::move(base_result.hypothesis);
  detail.result.failed = base_result.failed;
  detail.result.failure_reason = base_result.failure_reason;
  return detail;
}

namespace {

class SubsampledLearner : public Learner {
 public:
  SubsampledLearner(std::shared_ptr<const Learner> base,
                    std::uint64_t base_total, double target_epsilon)
      : base_(std::move(base)),
        base_total_(base_total),
        target_epsilon_(target_epsilon),
        name_("subsample(" + base_->name() + ")") {
    if (!std::isfinite(base_->declared().epsilon)) {
      throw ConfigError(
          "privacy boost: base learner must declare a finite epsilon");
    }
    required_ = SubsampleInputSize(base_total_, base_->declared().epsilon,
                                   target_epsilon_);
  }

  const std::string& name() const override { return name_; }

  PrivacyParams declared() const override {
    const PrivacyParams base = base_->declared();
    return {target_epsilon_,
            SubsampleDelta(base.delta, base.epsilon, target_epsilon_)};
  }

  LearnerResult Run(const PartiallyLabeledDatabase& db,
                    std::uint64_t seed) const override {
    if (db.records.size() < required_) {
      throw InvalidInputError("privacy boost: input smaller than " +
                              std::to_string(required_) + " records");
    }
    const std::uint64_t labeled_end = LabeledPrefixSize(db);
    const std::vector<std::uint64_t> picks = SubsampleIndices(
        db.records.size(), base_total_, DeriveSeed(seed, 0));
    // Stable partition of the shuffled picks: labeled records first, so the
    // base sees the labeled-prefix shape. Which picks are labeled depends
    // only on the indices, never on record contents.
    PartiallyLabeledDatabase sub;
    sub.records.reserve(base_total_);
    std::uint64_t labeled_count = 0;
    for (std::uint64_t p : picks) {
      if (p < labeled_end) {
        ++labeled_count;
        sub.records.push_back(db.records[p]);
      }
    }
    for (std::uint64_t p : picks) {
      if (p >= labeled_end) {
        sub.records.push_back({db.records[p].x, kUnlabeled});
      }
    }
    LearnerResult out = base_->Run(sub, DeriveSeed(seed, 1));
    out.labeled_used = labeled_count;
    out.unlabeled_used = base_total_ - labeled_count;
    out.declared = declared();
    return out;
  }

 private:
  std::shared_ptr<const Learner> base_;
  std::uint64_t base_total_;
  double target_epsilon_;
  std::uint64_t required_ = 0;
  std::string name_;
};

}  // namespace

std::unique_ptr<Learner> BoostPrivacy(std::shared_ptr<const Learner> base,
                                      std::uint64_t base_total,
                                      double target_epsilon) {
  if (base == nullptr) throw ConfigError("privacy boost: null base learner");
  if (base_total == 0) {
    throw ConfigError("privacy boost: base input size must be positive");
  }
  return std::make_unique<SubsampledLearner>(std::move(base), base_total,
                                             target_epsilon);
}

}  // namespace pssl
