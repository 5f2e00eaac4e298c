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

#include "pssl/serialization.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <utility>

#include "pssl/errors.h"

namespace pssl {

namespace {

// Rejects unknown keys so config typos fail loudly instead of being
// silently ignored.
void CheckKeys(const Json& j, std::initializer_list<const char*> allowed,
               const char* where) {
  if (!j.is_object()) {
    throw ConfigError(std::string(where) + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string(where) + ": unknown key \"" + item.key() +
                        "\"");
    }
  }
}

double GetDouble(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ConfigError(std::string(key) + ": expected a number");
  }
  return j.at(key).get<double>();
}

std::uint64_t GetCount(const Json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(std::string(key) + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string GetString(const Json& j, const char* key,
                      const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) {
    throw ConfigError(std::string(key) + ": expected a string");
  }
  return j.at(key).get<std::string>();
}

LabeledExample RecordFromJson(const Json& j, const char* where) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(std::string(where) + ": records are [x, y] pairs");
  }
  LabeledExample e;
  e.x = j.at(0).get<Point>();
  const std::int64_t y = j.at(1).get<std::int64_t>();
  if (y != -1 && y != 0 && y != 1) {
    throw ConfigError(std::string(where) + ": label must be -1, 0, or 1");
  }
  e.y = static_cast<std::int8_t>(y);
  return e;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return j;
}

ConceptClassSpec ConceptClassSpec::FromJson(const Json& j) {
  CheckKeys(j, {"family", "bits", "axes", "tables", "base"}, "conceptClass");
  ConceptClassSpec spec;
  spec.family = GetString(j, "family", "");
  if (spec.family.empty()) throw ConfigError("conceptClass: family required");
  spec.bits = static_cast<int>(GetCount(j, "bits", 1));
  spec.axes = static_cast<int>(GetCount(j, "axes", 1));
  if (j.contains("tables")) {
    for (const Json& t : j.at("tables")) {
      std::vector<std::uint8_t> table;
      for (const Json& b : t) {
        const std::int64_t v = b.get<std::int64_t>();
        if (v != 0 && v != 1) {
          throw ConfigError("conceptClass: table entries must be 0 or 1");
        }
        table.push_back(static_cast<std::uint8_t>(v));
      }
      spec.tables.push_back(std::move(table));
    }
  }
  if (j.contains("base")) {
    spec.base = std::make_shared<const ConceptClassSpec>(
        ConceptClassSpec::FromJson(j.at("base")));
  }
  return spec;
}

Json ConceptClassSpec::ToJson() const {
  Json j;
  j["family"] = family;
  j["bits"] = bits;
  j["axes"] = axes;
  if (!tables.empty()) j["tables"] = tables;
  if (base != nullptr) j["base"] = base->ToJson();
  return j;
}

Domain ConceptClassSpec::BuildDomain() const {
  if (family == "XOR_OF") {
    if (base == nullptr) throw ConfigError("conceptClass: XOR_OF needs a base");
    return base->BuildDomain();
  }
  return axes == 1 ? Domain::Bitline(bits) : Domain::Grid(bits, axes);
}

ConceptClass ConceptClassSpec::Build() const {
  if (family == "THRESH") {
    if (axes != 1) throw ConfigError("conceptClass: THRESH is one-dimensional");
    return ConceptClass::Thresholds(bits);
  }
  if (family == "POINT") return ConceptClass::Singletons(BuildDomain());
  if (family == "INTERVAL") {
    if (axes != 1) throw ConfigError("conceptClass: INTERVAL is one-dimensional");
    return ConceptClass::Intervals(bits);
  }
  if (family == "RECT") return ConceptClass::Rectangles(bits, axes);
  if (family == "EXPLICIT") {
    if (tables.empty()) throw ConfigError("conceptClass: EXPLICIT needs tables");
    return ConceptClass::Explicit(BuildDomain(), tables);
  }
  if (family == "XOR_OF") {
    if (base == nullptr) throw ConfigError("conceptClass: XOR_OF needs a base");
    return ConceptClass::Disagreements(base->Build());
  }
  throw ConfigError("conceptClass: unknown family \"" + family + "\"");
}

DistributionSpec DistributionSpec::FromJson(const Json& j) {
  DistributionSpec spec;
  if (j.is_string()) {
    if (j.get<std::string>() != "uniform") {
      throw ConfigError("distribution: expected \"uniform\" or {weights}");
    }
    return spec;
  }
  CheckKeys(j, {"weights"}, "distribution");
  if (!j.contains("weights")) {
    throw ConfigError("distribution: weights required");
  }
  spec.weights = j.at("weights").get<std::vector<double>>();
  return spec;
}

Json DistributionSpec::ToJson() const {
  if (weights.empty()) return Json("uniform");
  Json j;
  j["weights"] = weights;
  return j;
}

Distribution DistributionSpec::Build(const Domain& domain) const {
  if (weights.empty()) return Distribution::Uniform(domain);
  return Distribution::Table(domain, weights);
}

TargetSpec TargetSpec::FromJson(const Json& j) {
  TargetSpec spec;
  if (j.is_string()) {
    if (j.get<std::string>() != "random") {
      throw ConfigError("target: expected \"random\" or a concept index");
    }
    return spec;
  }
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError("target: expected \"random\" or a concept index");
  }
  spec.random = false;
  spec.fixed = j.get<std::uint64_t>();
  return spec;
}

Json TargetSpec::ToJson() const {
  if (random) return Json("random");
  return Json(fixed);
}

SweepSpec SweepSpec::FromJson(const Json& j) {
  CheckKeys(j, {"axis", "values"}, "sweep");
  SweepSpec spec;
  spec.axis = GetString(j, "axis", "");
  if (spec.axis != "m" && spec.axis != "n" && spec.axis != "alpha" &&
      spec.axis != "epsilon") {
    throw ConfigError("sweep: axis must be m, n, alpha, or epsilon");
  }
  if (!j.contains("values") || !j.at("values").is_array()) {
    throw ConfigError("sweep: values array required");
  }
  spec.values = j.at("values").get<std::vector<double>>();
  return spec;
}

Json SweepSpec::ToJson() const {
  Json j;
  j["axis"] = axis;
  j["values"] = values;
  return j;
}

const std::string& LearnerKindName(LearnerKind kind) {
  static const std::string kNames[] = {
      "erm",        "privateSelection",   "sanitizeSelect",
      "labelBoost", "labelBoostAgnostic", "subsampleActive"};
  return kNames[static_cast<int>(kind)];
}

LearnerKind ParseLearnerKind(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(LearnerKind::kSubsampleActive); ++k) {
    if (LearnerKindName(static_cast<LearnerKind>(k)) == name) {
      return static_cast<LearnerKind>(k);
    }
  }
  throw ConfigError("unknown learner \"" + name + "\"");
}

const std::string& SamplerName(ScoreSampler sampler) {
  static const std::string kGumbel = "gumbel";
  static const std::string kLogCum = "logCumulative";
  return sampler == ScoreSampler::kGumbelMax ? kGumbel : kLogCum;
}

ScoreSampler ParseSampler(const std::string& name) {
  if (name == "gumbel") return ScoreSampler::kGumbelMax;
  if (name == "logCumulative") return ScoreSampler::kLogCumulative;
  throw ConfigError("unknown sampler \"" + name + "\"");
}

ExperimentConfig ExperimentConfig::FromJson(const Json& j) {
  CheckKeys(j,
            {"learner", "conceptClass", "distribution", "target", "alpha",
             "beta", "epsilon", "delta", "labeled", "total", "trials",
             "rootSeed", "scale", "baseSampleSize", "baseEpsilon", "kappa",
             "sampler", "errorThreshold", "sweep"},
            "config");
  ExperimentConfig c;
  c.learner = ParseLearnerKind(GetString(j, "learner", "erm"));
  if (!j.contains("conceptClass")) {
    throw ConfigError("config: conceptClass required");
  }
  c.concept_class = ConceptClassSpec::FromJson(j.at("conceptClass"));
  if (j.contains("distribution")) {
    c.distribution = DistributionSpec::FromJson(j.at("distribution"));
  }
  if (j.contains("target")) c.target = TargetSpec::FromJson(j.at("target"));
  c.alpha = GetDouble(j, "alpha", c.alpha);
  c.beta = GetDouble(j, "beta", c.beta);
  c.epsilon = GetDouble(j, "epsilon", c.epsilon);
  c.delta = GetDouble(j, "delta", c.delta);
  c.labeled = GetCount(j, "labeled", c.labeled);
  c.total = GetCount(j, "total", c.total);
  c.trials = GetCount(j, "trials", c.trials);
  c.root_seed = GetCount(j, "rootSeed", c.root_seed);
  c.scale = GetDouble(j, "scale", c.scale);
  c.base_sample_size = GetCount(j, "baseSampleSize", c.base_sample_size);
  c.base_epsilon = GetDouble(j, "baseEpsilon", c.base_epsilon);
  c.kappa = GetDouble(j, "kappa", c.kappa);
  c.sampler = ParseSampler(GetString(j, "sampler", "gumbel"));
  c.error_threshold = GetDouble(j, "errorThreshold", c.error_threshold);
  if (j.contains("sweep")) c.sweep = SweepSpec::FromJson(j.at("sweep"));
  if (c.trials < 1) throw ConfigError("config: trials must be at least 1");
  return c;
}

ExperimentConfig ExperimentConfig::FromJsonFile(const std::string& path) {
  return FromJson(LoadJsonFile(path));
}

Json ExperimentConfig::ToJson() const {
  Json j;
  j["learner"] = LearnerKindName(learner);
  j["conceptClass"] = concept_class.ToJson();
  j["distribution"] = distribution.ToJson();
  j["target"] = target.ToJson();
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["labeled"] = labeled;
  j["total"] = total;
  j["trials"] = trials;
  j["rootSeed"] = root_seed;
  j["scale"] = scale;
  j["baseSampleSize"] = base_sample_size;
  j["baseEpsilon"] = base_epsilon;
  j["kappa"] = kappa;
  j["sampler"] = SamplerName(sampler);
  j["errorThreshold"] = error_threshold;
  if (sweep.has_value()) j["sweep"] = sweep->ToJson();
  return j;
}

AuditConfig AuditConfig::FromJson(const Json& j) {
  CheckKeys(j,
            {"mechanism", "conceptClass", "epsilon", "delta", "trials",
             "rootSeed", "sampler", "records", "segments", "diffIndex",
             "replacement", "confidence", "clopperPearson", "subsetEvents"},
            "audit config");
  AuditConfig c;
  c.mechanism = GetString(j, "mechanism", c.mechanism);
  if (j.contains("conceptClass")) {
    c.concept_class = ConceptClassSpec::FromJson(j.at("conceptClass"));
  }
  c.epsilon = GetDouble(j, "epsilon", c.epsilon);
  c.delta = GetDouble(j, "delta", c.delta);
  c.trials = GetCount(j, "trials", c.trials);
  c.root_seed = GetCount(j, "rootSeed", c.root_seed);
  c.sampler = ParseSampler(GetString(j, "sampler", "gumbel"));
  if (!j.contains("records")) throw ConfigError("audit config: records required");
  for (const Json& r : j.at("records")) {
    c.database.records.push_back(RecordFromJson(r, "records"));
  }
  if (j.contains("segments")) {
    const Json& s = j.at("segments");
    if (!s.is_array() || s.size() != 2) {
      throw ConfigError("audit config: segments must be [labeledEnd, expandEnd]");
    }
    c.database.segments =
        Segmentation{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
  }
  if (!j.contains("diffIndex") || !j.contains("replacement")) {
    throw ConfigError("audit config: diffIndex and replacement required");
  }
  c.diff_index = j.at("diffIndex").get<std::size_t>();
  c.replacement = RecordFromJson(j.at("replacement"), "replacement");
  c.options.confidence = GetDouble(j, "confidence", c.options.confidence);
  if (j.contains("clopperPearson")) {
    c.options.clopper_pearson = j.at("clopperPearson").get<bool>();
  }
  if (j.contains("subsetEvents")) {
    c.options.subset_events = j.at("subsetEvents").get<bool>();
  }
  return c;
}

AuditConfig AuditConfig::FromJsonFile(const std::string& path) {
  return FromJson(LoadJsonFile(path));
}

Json AuditConfig::ToJson() const {
  Json j;
  j["mechanism"] = mechanism;
  if (concept_class.has_value()) j["conceptClass"] = concept_class->ToJson();
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["trials"] = trials;
  j["rootSeed"] = root_seed;
  j["sampler"] = SamplerName(sampler);
  Json records = Json::array();
  for (const LabeledExample& e : database.records) {
    records.push_back({e.x, e.y});
  }
  j["records"] = std::move(records);
  if (database.segments.has_value()) {
    j["segments"] = {database.segments->labeled_end,
                     database.segments->expand_end};
  }
  j["diffIndex"] = diff_index;
  j["replacement"] = {replacement.x, replacement.y};
  j["confidence"] = options.confidence;
  j["clopperPearson"] = options.clopper_pearson;
  j["subsetEvents"] = options.subset_events;
  return j;
}

void WriteTrialsCsv(std::ostream& os, std::span<const TrialRow> rows) {
  os << "# schema=pssl.trials.v1\n";
  os << "trial,seed,err,err_ci,labeled_used,unlabeled_used,failed\n";
  for (const TrialRow& r : rows) {
    os << r.trial << ',' << r.seed << ',' << FormatDouble(r.err) << ','
       << FormatDouble(r.err_ci) << ',' << r.labeled_used << ','
       << r.unlabeled_used << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

void WriteSweepCsv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "# schema=pssl.sweep.v1\n";
  os << "value,trials,failures,failure_fraction,mean_err,mean_labeled_used,"
        "bound\n";
  for (const SweepRow& r : rows) {
    os << FormatDouble(r.value) << ',' << r.trials << ',' << r.failures << ','
       << FormatDouble(r.failure_fraction) << ',' << FormatDouble(r.mean_err)
       << ',' << FormatDouble(r.mean_labeled_used) << ',';
    if (r.bound.has_value()) os << FormatDouble(*r.bound);
    os << '\n';
  }
}

void WriteAuditCsv(std::ostream& os, const AuditReport& report) {
  os << "# schema=pssl.audit.v1\n";
  os << "mechanism,epsilon_hat,infinite,delta,trials,seed,confidence,"
        "distinct_outcomes,witness_outcome\n";
  os << report.mechanism << ',' << FormatDouble(report.epsilon_hat) << ','
     << (report.infinite ? 1 : 0) << ',' << FormatDouble(report.delta) << ','
     << report.trials << ',' << report.seed << ','
     << FormatDouble(report.confidence) << ',' << report.distinct_outcomes
     << ',' << report.witness_outcome << '\n';
}

Json AuditReportJson(const AuditReport& report) {
  Json j;
  j["schema"] = "pssl.audit.v1";
  j["mechanism"] = report.mechanism;
  if (report.infinite) {
    j["epsilonHat"] = "inf";
  } else {
    j["epsilonHat"] = report.epsilon_hat;
  }
  j["infinite"] = report.infinite;
  j["delta"] = report.delta;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  j["confidence"] = report.confidence;
  j["distinctOutcomes"] = report.distinct_outcomes;
  j["witnessOutcome"] = report.witness_outcome;
  Json counts = Json::array();
  for (const OutcomeCount& c : report.outcome_counts) {
    counts.push_back({{"outcome", c.outcome},
                      {"count1", c.count1},
                      {"count2", c.count2}});
  }
  j["outcomeCounts"] = std::move(counts);
  return j;
}

}  // namespace pssl
