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

#include "pssl/concepts.h"

#include "pssl/random.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace pssl {

namespace {

std::size_t WordsFor(std::uint64_t cardinality) {
  return static_cast<std::size_t>((cardinality + 63) / 64);
}

bool TableBit(const std::vector<std::uint64_t>& table, Point p) {
  return (table[p >> 6] >> (p & 63)) & 1;
}

void SetTableBit(std::vector<std::uint64_t>& table, Point p) {
  table[p >> 6] |= std::uint64_t{1} << (p & 63);
}

struct TableHash {
  std::size_t operator()(const std::vector<std::uint64_t>& t) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t w : t) {
      h ^= w;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

class ConceptClass::Impl {
 public:
  Impl(Domain domain, std::uint64_t count, std::optional<int> known_vc,
       std::string description)
      : domain_(domain),
        count_(count),
        known_vc_(known_vc),
        description_(std::move(description)) {
    if (count_ == 0) throw InvalidInputError("concept class must be nonempty");
  }
  virtual ~Impl() = default;

  virtual bool Eval(std::uint64_t index, Point x) const = 0;

  const BehaviorCatalog& Behaviors(std::uint64_t eval_budget) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (!behaviors_.has_value()) {
      const std::uint64_t card = domain_.cardinality();
      if (count_ > eval_budget / std::max<std::uint64_t>(card, 1)) {
        throw ResourceError("behavior enumeration for " + description_ +
                            " exceeds the evaluation budget");
      }
      BehaviorCatalog cat;
      cat.words_per_table = WordsFor(card);
      std::unordered_map<std::vector<std::uint64_t>, std::size_t, TableHash> seen;
      std::vector<std::uint64_t> table(cat.words_per_table);
      for (std::uint64_t c = 0; c < count_; ++c) {
        std::fill(table.begin(), table.end(), 0);
        for (Point p = 0; p < card; ++p) {
          if (Eval(c, p)) SetTableBit(table, p);
        }
        if (seen.emplace(table, cat.tables.size()).second) {
          cat.tables.push_back(table);
          cat.witnesses.push_back(c);
        }
      }
      behaviors_ = std::move(cat);
    }
    return *behaviors_;
  }

  // Direct catalog installation for classes that are stored as tables.
  void InstallBehaviors(BehaviorCatalog cat) const {
    std::lock_guard<std::mutex> lock(mu_);
    behaviors_ = std::move(cat);
  }

  std::optional<int> CachedVc() const {
    std::lock_guard<std::mutex> lock(mu_);
    return vc_cache_;
  }
  void CacheVc(int vc) const {
    std::lock_guard<std::mutex> lock(mu_);
    vc_cache_ = vc;
  }

  Domain domain_;
  std::uint64_t count_;
  std::optional<int> known_vc_;
  std::string description_;

 private:
  mutable std::mutex mu_;
  mutable std::optional<BehaviorCatalog> behaviors_;
  mutable std::optional<int> vc_cache_;
};

namespace {

class ThresholdImpl : public ConceptClass::Impl {
 public:
  explicit ThresholdImpl(int bits)
      : Impl(Domain::Bitline(bits), Domain::Bitline(bits).cardinality() + 1, 1,
             "thresholds(" + std::to_string(bits) + ")") {}
  bool Eval(std::uint64_t index, Point x) const override { return x < index; }
};

class SingletonsImpl : public ConceptClass::Impl {
 public:
  explicit SingletonsImpl(const Domain& d)
      : Impl(d, d.cardinality(), 1, "singletons(" + d.Describe() + ")") {}
  bool Eval(std::uint64_t index, Point x) const override { return x == index; }
};

class RectanglesImpl : public ConceptClass::Impl {
 public:
  RectanglesImpl(int bits, int axes)
      : Impl(Domain::Grid(bits, axes),
             Domain::Grid(bits, axes).cardinality() *
                 Domain::Grid(bits, axes).cardinality(),
             KnownVc(bits, axes),
             (axes == 1 ? "intervals(" + std::to_string(bits) + ")"
                        : "rectangles(" + std::to_string(bits) + "," +
                              std::to_string(axes) + ")")) {}

  bool Eval(std::uint64_t index, Point x) const override {
    const std::uint64_t card = domain_.cardinality();
    const Point a = static_cast<Point>(index / card);
    const Point b = static_cast<Point>(index % card);
    for (int i = 0; i < domain_.axes(); ++i) {
      const std::uint64_t xi = domain_.Coordinate(x, i);
      if (xi < domain_.Coordinate(a, i) || xi > domain_.Coordinate(b, i)) {
        return false;
      }
    }
    return true;
  }

 private:
  // One axis always shatters two points; with at least three values per axis
  // the standard cross construction shatters two points per axis. Tiny axes
  // (two values) with several axes fall short of 2*axes, so no claim is made.
  static std::optional<int> KnownVc(int bits, int axes) {
    if (axes == 1) return 2;
    if (bits >= 2) return 2 * axes;
    return std::nullopt;
  }
};

class TableBackedImpl : public ConceptClass::Impl {
 public:
  TableBackedImpl(const Domain& d, std::vector<std::vector<std::uint64_t>> tables,
                  std::string description)
      : Impl(d, tables.size(), std::nullopt, std::move(description)),
        tables_(std::move(tables)) {
    BehaviorCatalog cat;
    cat.words_per_table = WordsFor(d.cardinality());
    cat.tables = tables_;
    cat.witnesses.resize(tables_.size());
    for (std::size_t i = 0; i < tables_.size(); ++i) cat.witnesses[i] = i;
    InstallBehaviors(std::move(cat));
  }

  bool Eval(std::uint64_t index, Point x) const override {
    return TableBit(tables_[index], x);
  }

 private:
  std::vector<std::vector<std::uint64_t>> tables_;
};

std::shared_ptr<const ConceptClass::Impl> MakeShared(ConceptClass::Impl* p) {
  return std::shared_ptr<const ConceptClass::Impl>(p);
}

}  // namespace

ConceptClass::ConceptClass(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

ConceptClass ConceptClass::Thresholds(int bits) {
  return ConceptClass(MakeShared(new ThresholdImpl(bits)));
}

ConceptClass ConceptClass::Singletons(const Domain& domain) {
  return ConceptClass(MakeShared(new SingletonsImpl(domain)));
}

ConceptClass ConceptClass::Rectangles(int bits, int axes) {
  if (bits * axes > 28) {
    throw InvalidInputError("Rectangles: domain too large to index pairs");
  }
  return ConceptClass(MakeShared(new RectanglesImpl(bits, axes)));
}

ConceptClass ConceptClass::Intervals(int bits) { return Rectangles(bits, 1); }

ConceptClass ConceptClass::Explicit(
    const Domain& domain, std::vector<std::vector<std::uint8_t>> tables) {
  const std::uint64_t card = domain.cardinality();
  if (tables.empty()) throw InvalidInputError("Explicit: no concepts given");
  std::vector<std::vector<std::uint64_t>> packed;
  std::unordered_set<std::vector<std::uint64_t>, TableHash> seen;
  packed.reserve(tables.size());
  for (const auto& t : tables) {
    if (t.size() != card) {
      throw InvalidInputError("Explicit: truth table length must equal domain size");
    }
    std::vector<std::uint64_t> bits(WordsFor(card), 0);
    for (Point p = 0; p < card; ++p) {
      if (t[p] > 1) throw InvalidInputError("Explicit: table entries must be 0/1");
      if (t[p]) SetTableBit(bits, p);
    }
    if (!seen.insert(bits).second) {
      throw InvalidInputError("Explicit: concepts must be distinct as functions");
    }
    packed.push_back(std::move(bits));
  }
  return ConceptClass(MakeShared(new TableBackedImpl(
      domain, std::move(packed),
      "explicit(" + domain.Describe() + "," + std::to_string(tables.size()) + ")")));
}

ConceptClass ConceptClass::Disagreements(const ConceptClass& base,
                                         std::uint64_t eval_budget) {
  const BehaviorCatalog& cat = base.Behaviors(eval_budget);
  const std::uint64_t nb = cat.tables.size();
  const std::uint64_t card = base.domain().cardinality();
  const std::uint64_t pairs = nb * (nb + 1) / 2;
  if (pairs > eval_budget / std::max<std::uint64_t>(card, 1)) {
    throw ResourceError("disagreement class over " + base.Describe() +
                        " exceeds the evaluation budget");
  }
  // Disagreement behavior depends only on the two base behaviors, so pairs of
  // distinct behaviors already generate every member, including the
  // everywhere-zero one from equal pairs.
  std::vector<std::vector<std::uint64_t>> out;
  std::unordered_set<std::vector<std::uint64_t>, TableHash> seen;
  std::vector<std::uint64_t> table(cat.words_per_table);
  for (std::uint64_t i = 0; i < nb; ++i) {
    for (std::uint64_t j = i; j < nb; ++j) {
      for (std::size_t w = 0; w < cat.words_per_table; ++w) {
        table[w] = cat.tables[i][w] ^ cat.tables[j][w];
      }
      if (seen.insert(table).second) out.push_back(table);
    }
  }
  return ConceptClass(MakeShared(new TableBackedImpl(
      base.domain(), std::move(out), "disagreements(" + base.Describe() + ")")));
}

const Domain& ConceptClass::domain() const { return impl_->domain_; }
std::uint64_t ConceptClass::size() const { return impl_->count_; }
std::optional<int> ConceptClass::known_vc() const { return impl_->known_vc_; }
const std::string& ConceptClass::Describe() const { return impl_->description_; }

bool ConceptClass::Evaluate(Concept c, Point x) const {
  if (c.index >= impl_->count_) {
    throw InvalidInputError("Evaluate: concept index out of range");
  }
  if (!impl_->domain_.Contains(x)) {
    throw InvalidInputError("Evaluate: point outside the class domain");
  }
  return impl_->Eval(c.index, x);
}

const BehaviorCatalog& ConceptClass::Behaviors(std::uint64_t eval_budget) const {
  return impl_->Behaviors(eval_budget);
}

Hypothesis Hypothesis::FromConcept(const ConceptClass& cls, Concept c) {
  if (c.index >= cls.size()) {
    throw InvalidInputError("Hypothesis: concept index out of range");
  }
  Hypothesis h;
  h.domain_ = cls.domain();
  h.cls_ = cls;
  h.concept_ = c;
  return h;
}

Hypothesis Hypothesis::FromTable(const Domain& domain,
                                 std::vector<std::uint8_t> table) {
  if (table.size() != domain.cardinality()) {
    throw InvalidInputError("Hypothesis: table length must equal domain size");
  }
  for (std::uint8_t v : table) {
    if (v > 1) throw InvalidInputError("Hypothesis: table entries must be 0/1");
  }
  Hypothesis h;
  h.domain_ = domain;
  h.table_ = std::move(table);
  return h;
}

std::optional<Concept> Hypothesis::AsConcept() const {
  if (!proper()) return std::nullopt;
  return concept_;
}

bool Hypothesis::Evaluate(Point x) const {
  if (!valid()) throw InvalidInputError("Hypothesis: empty");
  if (!domain_.Contains(x)) {
    throw InvalidInputError("Hypothesis: point outside domain");
  }
  if (cls_.has_value()) return cls_->Evaluate(concept_, x);
  return table_[x] != 0;
}

namespace {

std::vector<Point> DedupePoints(const ConceptClass& cls,
                                std::span<const Point> b) {
  std::vector<Point> pts;
  std::unordered_set<Point> seen;
  pts.reserve(b.size());
  for (Point p : b) {
    if (!cls.domain().Contains(p)) {
      throw InvalidInputError("projection: point outside the class domain");
    }
    if (seen.insert(p).second) pts.push_back(p);
  }
  return pts;
}

// Whether the behavior catalog is affordable for this class.
bool CatalogAffordable(const ConceptClass& cls, std::uint64_t eval_budget) {
  const std::uint64_t card = cls.domain().cardinality();
  return cls.size() <= eval_budget / std::max<std::uint64_t>(card, 1);
}

}  // namespace

Projection ProjectWithWitnesses(const ConceptClass& cls,
                                std::span<const Point> b,
                                const ProjectionOptions& opts) {
  Projection out;
  out.points = DedupePoints(cls, b);
  std::map<Dichotomy, std::uint64_t> rows;
  if (CatalogAffordable(cls, opts.eval_budget)) {
    const BehaviorCatalog& cat = cls.Behaviors(opts.eval_budget);
    Dichotomy z(out.points.size());
    for (std::size_t t = 0; t < cat.tables.size(); ++t) {
      for (std::size_t i = 0; i < out.points.size(); ++i) {
        z[i] = TableBit(cat.tables[t], out.points[i]) ? 1 : 0;
      }
      rows.emplace(z, cat.witnesses[t]);  // catalog is in ascending witness order
    }
  } else {
    if (cls.size() > opts.eval_budget /
                         std::max<std::uint64_t>(out.points.size(), 1)) {
      throw ResourceError("projection over " + cls.Describe() +
                          " exceeds the evaluation budget");
    }
    Dichotomy z(out.points.size());
    for (std::uint64_t c = 0; c < cls.size(); ++c) {
      for (std::size_t i = 0; i < out.points.size(); ++i) {
        z[i] = cls.Evaluate(Concept{c}, out.points[i]) ? 1 : 0;
      }
      rows.emplace(z, c);
    }
  }
  out.dichotomies.reserve(rows.size());
  out.witnesses.reserve(rows.size());
  for (const auto& [z, w] : rows) {
    out.dichotomies.push_back(z);
    out.witnesses.push_back(Concept{w});
  }
  return out;
}

std::vector<Dichotomy> Project(const ConceptClass& cls, std::span<const Point> b,
                               const ProjectionOptions& opts) {
  return ProjectWithWitnesses(cls, b, opts).dichotomies;
}

std::optional<Concept> ConsistentConcept(const ConceptClass& cls,
                                         std::span<const Point> b,
                                         const Dichotomy& z,
                                         const ProjectionOptions& opts) {
  if (z.size() != b.size()) {
    throw InvalidInputError("ConsistentConcept: dichotomy length must match point count");
  }
  std::vector<Point> pts;
  std::vector<std::uint8_t> want;
  std::unordered_map<Point, std::uint8_t> req;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!cls.domain().Contains(b[i])) {
      throw InvalidInputError("ConsistentConcept: point outside the class domain");
    }
    if (z[i] > 1) throw InvalidInputError("ConsistentConcept: labels must be 0/1");
    auto [it, inserted] = req.emplace(b[i], z[i]);
    if (inserted) {
      pts.push_back(b[i]);
      want.push_back(z[i]);
    } else if (it->second != z[i]) {
      return std::nullopt;  // duplicated point with conflicting labels
    }
  }
  if (CatalogAffordable(cls, opts.eval_budget)) {
    const BehaviorCatalog& cat = cls.Behaviors(opts.eval_budget);
    for (std::size_t t = 0; t < cat.tables.size(); ++t) {
      bool ok = true;
      for (std::size_t i = 0; i < pts.size() && ok; ++i) {
        ok = TableBit(cat.tables[t], pts[i]) == (want[i] != 0);
      }
      if (ok) return Concept{cat.witnesses[t]};
    }
    return std::nullopt;
  }
  if (cls.size() > opts.eval_budget / std::max<std::uint64_t>(pts.size(), 1)) {
    throw ResourceError("consistency scan over " + cls.Describe() +
                        " exceeds the evaluation budget");
  }
  for (std::uint64_t c = 0; c < cls.size(); ++c) {
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i) {
      ok = cls.Evaluate(Concept{c}, pts[i]) == (want[i] != 0);
    }
    if (ok) return Concept{c};
  }
  return std::nullopt;
}

int VcDimension(const ConceptClass& cls, const VcOptions& opts) {
  if (auto cached = cls.impl().CachedVc(); cached.has_value()) return *cached;

  const BehaviorCatalog& cat = cls.Behaviors(opts.eval_budget);
  const std::uint64_t card = cls.domain().cardinality();
  const std::size_t ntab = cat.tables.size();

  // A set of size k can only be shattered if the class has 2^k behaviors.
  int max_k = 0;
  while ((std::size_t{1} << (max_k + 1)) <= ntab &&
         static_cast<std::uint64_t>(max_k + 1) <= card && max_k + 1 < 25) {
    ++max_k;
  }

  std::uint64_t subsets_seen = 0;
  int vc = 0;
  for (int k = 1; k <= max_k; ++k) {
    const std::uint32_t need = std::uint32_t{1} << k;
    std::vector<std::uint32_t> stamp(need, 0);
    std::uint32_t epoch = 0;
    std::vector<std::uint64_t> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    bool shattered = false;
    for (;;) {
      if (++subsets_seen > opts.subset_budget) {
        throw ResourceError("shattering search over " + cls.Describe() +
                            " exceeds the subset budget");
      }
      ++epoch;
      std::uint32_t distinct = 0;
      for (std::size_t t = 0; t < ntab; ++t) {
        std::uint32_t pattern = 0;
        for (int i = 0; i < k; ++i) {
          pattern |= static_cast<std::uint32_t>(TableBit(cat.tables[t], comb[i]))
                     << i;
        }
        if (stamp[pattern] != epoch) {
          stamp[pattern] = epoch;
          if (++distinct == need) break;
        }
      }
      if (distinct == need) {
        shattered = true;
        break;
      }
      // Next k-combination of [0, card).
      int i = k - 1;
      while (i >= 0 && comb[i] == card - k + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
    if (!shattered) break;
    vc = k;
  }
  cls.impl().CacheVc(vc);
  return vc;
}

Fraction EmpiricalError(const Hypothesis& h, std::span<const LabeledExample> s) {
  if (!h.valid()) throw InvalidInputError("EmpiricalError: empty hypothesis");
  if (s.empty()) throw InvalidInputError("EmpiricalError: no records");
  long long mismatches = 0;
  for (const LabeledExample& e : s) {
    if (e.y != 0 && e.y != 1) {
      throw InvalidInputError("EmpiricalError: all records must be labeled");
    }
    mismatches += h.Evaluate(e.x) != (e.y != 0);
  }
  return Fraction(mismatches, static_cast<long long>(s.size()));
}

Fraction EmpiricalError(const ConceptClass& cls, Concept c,
                        std::span<const LabeledExample> s) {
  return EmpiricalError(Hypothesis::FromConcept(cls, c), s);
}

Fraction DisagreementRate(const Hypothesis& h, const Hypothesis& f,
                          std::span<const Point> points) {
  if (!h.valid() || !f.valid()) {
    throw InvalidInputError("DisagreementRate: empty hypothesis");
  }
  if (!(h.domain() == f.domain())) {
    throw InvalidInputError("DisagreementRate: hypotheses over different domains");
  }
  if (points.empty()) throw InvalidInputError("DisagreementRate: no points");
  long long mismatches = 0;
  for (Point p : points) mismatches += h.Evaluate(p) != f.Evaluate(p);
  return Fraction(mismatches, static_cast<long long>(points.size()));
}

ErrorEstimate GeneralizationError(const Hypothesis& h, const Hypothesis& target,
                                  const Distribution& mu) {
  if (!h.valid() || !target.valid()) {
    throw InvalidInputError("GeneralizationError: empty hypothesis");
  }
  if (!(h.domain() == target.domain()) || !(h.domain() == mu.domain())) {
    throw InvalidInputError("GeneralizationError: domain mismatch");
  }
  const std::uint64_t card = mu.domain().cardinality();
  if (card > kDefaultEvalBudget) {
    throw ResourceError("GeneralizationError: domain too large to enumerate");
  }
  ErrorEstimate out;
  out.exact = true;
  if (mu.is_uniform()) {
    std::uint64_t mismatches = 0;
    for (Point p = 0; p < card; ++p) {
      mismatches += h.Evaluate(p) != target.Evaluate(p);
    }
    out.value = static_cast<double>(mismatches) / static_cast<double>(card);
  } else {
    double mass = 0;
    for (Point p = 0; p < card; ++p) {
      if (h.Evaluate(p) != target.Evaluate(p)) mass += mu.Probability(p);
    }
    out.value = mass;
  }
  return out;
}

ErrorEstimate GeneralizationErrorMonteCarlo(const Hypothesis& h,
                                            const Hypothesis& target,
                                            const Distribution& mu,
                                            std::uint64_t samples,
                                            std::uint64_t seed) {
  if (!h.valid() || !target.valid()) {
    throw InvalidInputError("GeneralizationError: empty hypothesis");
  }
  if (!(h.domain() == target.domain()) || !(h.domain() == mu.domain())) {
    throw InvalidInputError("GeneralizationError: domain mismatch");
  }
  if (samples == 0) throw InvalidInputError("GeneralizationError: samples must be positive");
  Rng rng(seed);
  std::uint64_t mismatches = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Point p = mu.Sample(rng);
    mismatches += h.Evaluate(p) != target.Evaluate(p);
  }
  ErrorEstimate out;
  out.value = static_cast<double>(mismatches) / static_cast<double>(samples);
  // Two-sided Hoeffding interval at 95%.
  out.ci_half_width =
      std::sqrt(std::log(2.0 / 0.05) / (2.0 * static_cast<double>(samples)));
  return out;
}

}  // namespace pssl
