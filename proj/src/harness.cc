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

#include "pssl/harness.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "CLI11.hpp"
#include "pssl/active.h"
#include "pssl/learners.h"
#include "pssl/random.h"
#include "pssl/sanitizer.h"

namespace pssl {

namespace {

struct BuiltExperiment {
  ConceptClass cls;
  Distribution mu;
  std::shared_ptr<const Learner> learner;                // passive path
  std::shared_ptr<const SubsampleActiveLearner> active;  // active path
  std::uint64_t pool_size = 0;                           // active path
};

BuiltExperiment BuildExperiment(const ExperimentConfig& c) {
  ConceptClass cls = c.concept_class.Build();
  Distribution mu = c.distribution.Build(cls.domain());

  const auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  };
  std::shared_ptr<const Learner> learner;
  std::shared_ptr<const SubsampleActiveLearner> active;
  std::uint64_t pool_size = 0;
  switch (c.learner) {
    case LearnerKind::kErm:
      require(c.total >= 1 && c.labeled == c.total,
              "erm: labeled must equal total (fully labeled input)");
      learner = std::make_shared<ErmLearner>(cls);
      break;
    case LearnerKind::kPrivateSelection:
      require(c.total >= 1 && c.labeled == c.total,
              "privateSelection: labeled must equal total");
      learner =
          std::make_shared<PrivateSelectionLearner>(cls, c.epsilon, c.sampler);
      break;
    case LearnerKind::kSanitizeSelect: {
      require(c.labeled >= 1, "sanitizeSelect: labeled must be at least 1");
      require(c.total > c.labeled,
              "sanitizeSelect: needs unlabeled records (total > labeled)");
      SanitizeSelectOptions opts;
      opts.sanitizer.kappa = c.kappa;
      opts.sampler = c.sampler;
      learner = std::make_shared<SanitizeSelectLearner>(cls, c.alpha, c.beta,
                                                        c.epsilon, opts);
      break;
    }
    case LearnerKind::kLabelBoost:
    case LearnerKind::kLabelBoostAgnostic: {
      require(c.base_sample_size >= 1, "labelBoost: baseSampleSize required");
      require(c.labeled >= 1 && c.total >= c.labeled,
              "labelBoost: need labeled >= 1 and total >= labeled");
      auto base = std::make_shared<PrivateSelectionLearner>(
          cls, c.base_epsilon, c.sampler);
      LabelBoostOptions opts;
      opts.scale = c.scale;
      opts.agnostic = c.learner == LearnerKind::kLabelBoostAgnostic;
      opts.sampler = c.sampler;
      learner = std::make_shared<LabelBoostLearner>(
          cls, std::move(base), c.base_sample_size, c.alpha, c.beta, opts);
      break;
    }
    case LearnerKind::kSubsampleActive: {
      require(c.labeled >= 1 && c.total >= c.labeled,
              "subsampleActive: need labeled >= 1 and total >= labeled");
      SanitizeSelectOptions opts;
      opts.sanitizer.kappa = c.kappa;
      opts.sampler = c.sampler;
      auto base = std::make_shared<SanitizeSelectLearner>(
          cls, c.alpha, c.beta, c.base_epsilon, opts);
      active = std::make_shared<SubsampleActiveLearner>(
          std::move(base), c.total, c.labeled, c.epsilon);
      pool_size = active->required_pool();
      break;
    }
  }
  return BuiltExperiment{std::move(cls), std::move(mu), std::move(learner),
                         std::move(active), pool_size};
}

TrialRow RunOneTrial(const ExperimentConfig& c, const BuiltExperiment& ex,
                     std::uint64_t t) {
  TrialRow row;
  row.trial = t;
  const std::uint64_t tseed = DeriveSeed(c.root_seed, t);
  row.seed = tseed;

  Concept target;
  if (c.target.random) {
    Rng target_rng(DeriveSeed(tseed, 0));
    target = Concept{target_rng.NextBelow(ex.cls.size())};
  } else {
    if (c.target.fixed >= ex.cls.size()) {
      throw ConfigError("target: fixed index out of range");
    }
    target = Concept{c.target.fixed};
  }

  Rng data_rng(DeriveSeed(tseed, 1));
  LearnerResult res;
  if (ex.active != nullptr) {
    std::vector<Point> pool(ex.pool_size);
    for (Point& p : pool) p = ex.mu.Sample(data_rng);
    LabelOracle oracle =
        LabelOracle::FromConcept(ex.cls, target, std::move(pool), c.labeled);
    res = RunActive(*ex.active, oracle, DeriveSeed(tseed, 2)).result;
  } else {
    PartiallyLabeledDatabase db;
    db.records.resize(c.total);
    for (std::uint64_t i = 0; i < c.total; ++i) {
      const Point x = ex.mu.Sample(data_rng);
      db.records[i].x = x;
      db.records[i].y = i < c.labeled
                            ? static_cast<std::int8_t>(
                                  ex.cls.Evaluate(target, x) ? 1 : 0)
                            : kUnlabeled;
    }
    res = ex.learner->Run(db, DeriveSeed(tseed, 2));
  }

  row.labeled_used = res.labeled_used;
  row.unlabeled_used = res.unlabeled_used;
  row.failed = res.failed || !res.hypothesis.valid();
  if (row.failed) {
    row.err = 1.0;
    row.err_ci = 0.0;
  } else {
    const Hypothesis target_h = Hypothesis::FromConcept(ex.cls, target);
    const ErrorEstimate e =
        GeneralizationError(res.hypothesis, target_h, ex.mu);
    row.err = e.value;
    row.err_ci = e.ci_half_width;
  }
  // Label-budget recheck: module code enforces this, the harness re-verifies.
  if (row.labeled_used > c.labeled) {
    throw ProtocolError("trial " + std::to_string(t) +
                        ": labeled budget exceeded (" +
                        std::to_string(row.labeled_used) + " > " +
                        std::to_string(c.labeled) + ")");
  }
  return row;
}

double Milliseconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ExperimentReport RunExperiment(const ExperimentConfig& config,
                               unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  const BuiltExperiment ex = BuildExperiment(config);

  ExperimentReport report;
  report.rows.resize(config.trials);
  report.learner_name =
      ex.active != nullptr ? ex.active->name() : ex.learner->name();
  report.declared =
      ex.active != nullptr ? ex.active->declared() : ex.learner->declared();
  report.error_threshold = config.ErrorThreshold();

  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    while (true) {
      const std::uint64_t t = next.fetch_add(1);
      if (t >= config.trials) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error != nullptr) return;
      }
      try {
        report.rows[t] = RunOneTrial(config, ex, t);
      } catch (const ResourceError& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error == nullptr) {
          first_error = std::make_exception_ptr(ResourceError(
              "trial " + std::to_string(t) + ": " + e.what()));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error == nullptr) first_error = std::current_exception();
      }
    }
  };

  const unsigned worker_count = std::max(
      1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(
                                          config.trials, 1024))));
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (unsigned i = 0; i < worker_count; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (first_error != nullptr) std::rethrow_exception(first_error);

  double err_sum = 0;
  double labeled_sum = 0;
  double unlabeled_sum = 0;
  for (const TrialRow& r : report.rows) {
    if (r.failed || r.err > report.error_threshold) ++report.failures;
    err_sum += r.err;
    labeled_sum += static_cast<double>(r.labeled_used);
    unlabeled_sum += static_cast<double>(r.unlabeled_used);
  }
  const double n = static_cast<double>(config.trials);
  report.failure_fraction = static_cast<double>(report.failures) / n;
  report.mean_err = err_sum / n;
  report.mean_labeled_used = labeled_sum / n;
  report.mean_unlabeled_used = unlabeled_sum / n;
  report.wall_ms = Milliseconds(start);
  return report;
}

SweepReport RunSweep(const ExperimentConfig& config, unsigned threads) {
  if (!config.sweep.has_value()) {
    throw ConfigError("sweep: config has no sweep section");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::string axis = config.sweep->axis;
  SweepReport report;
  report.axis = axis;

  std::uint64_t class_size = 0;
  if (config.learner == LearnerKind::kPrivateSelection) {
    class_size = config.concept_class.Build().size();
  }

  for (const double value : config.sweep->values) {
    ExperimentConfig point = config;
    point.sweep.reset();
    if (axis == "m" || axis == "n") {
      if (!(value >= 1) || value != std::floor(value)) {
        throw ConfigError("sweep: " + axis + " values must be positive integers");
      }
      const auto count = static_cast<std::uint64_t>(value);
      if (axis == "m") {
        point.labeled = count;
        // Fully labeled learners keep labeled == total.
        if (point.learner == LearnerKind::kErm ||
            point.learner == LearnerKind::kPrivateSelection) {
          point.total = count;
        }
      } else {
        point.total = count;
      }
    } else if (axis == "alpha") {
      point.alpha = value;
    } else {
      point.epsilon = value;
    }

    const ExperimentReport r = RunExperiment(point, threads);
    SweepRow row;
    row.value = value;
    row.trials = point.trials;
    row.failures = r.failures;
    row.failure_fraction = r.failure_fraction;
    row.mean_err = r.mean_err;
    row.mean_labeled_used = r.mean_labeled_used;
    if (config.learner == LearnerKind::kPrivateSelection) {
      row.bound = MisclassificationTailBound(class_size, point.epsilon,
                                             point.labeled,
                                             point.ErrorThreshold());
    }
    report.rows.push_back(row);
    if (report.learner_name.empty()) report.learner_name = r.learner_name;
  }
  report.wall_ms = Milliseconds(start);
  return report;
}

AuditReport RunAudit(const AuditConfig& config) {
  std::unique_ptr<Mechanism> mech;
  if (config.mechanism == "randomizedResponse") {
    mech = MakeRandomizedResponse(config.epsilon);
  } else if (config.mechanism == "selection") {
    if (!config.concept_class.has_value()) {
      throw ConfigError("audit: selection mechanism needs a conceptClass");
    }
    mech = MakeSelectionMechanism(config.concept_class->Build(),
                                  config.epsilon, config.sampler);
  } else if (config.mechanism == "relabelPass") {
    if (!config.concept_class.has_value()) {
      throw ConfigError("audit: relabelPass mechanism needs a conceptClass");
    }
    ExpansionOptions opts;
    opts.sampler = config.sampler;
    mech = MakeRelabelPassMechanism(config.concept_class->Build(), opts);
  } else {
    throw ConfigError("audit: unknown mechanism \"" + config.mechanism + "\"");
  }
  const NeighborPair pair =
      MakeNeighbors(config.database, config.diff_index, config.replacement);
  return EstimateEpsilon(*mech, pair, config.delta, config.trials,
                         config.root_seed, config.options);
}

namespace {

Json PrivacyJson(const PrivacyParams& p) {
  Json j;
  if (std::isfinite(p.epsilon)) {
    j["epsilon"] = p.epsilon;
  } else {
    j["epsilon"] = "inf";
  }
  j["delta"] = p.delta;
  return j;
}

}  // namespace

Json SummaryJson(const ExperimentConfig& config,
                 const ExperimentReport& report) {
  Json j;
  j["schema"] = "pssl.summary.v1";
  j["config"] = config.ToJson();
  j["learner"] = report.learner_name;
  j["declared"] = PrivacyJson(report.declared);
  j["trials"] = config.trials;
  j["failures"] = report.failures;
  j["failureFraction"] = report.failure_fraction;
  j["meanErr"] = report.mean_err;
  j["meanLabeledUsed"] = report.mean_labeled_used;
  j["meanUnlabeledUsed"] = report.mean_unlabeled_used;
  j["errorThreshold"] = report.error_threshold;
  j["timingMs"] = report.wall_ms;
  return j;
}

Json SweepSummaryJson(const ExperimentConfig& config,
                      const SweepReport& report) {
  Json j;
  j["schema"] = "pssl.sweepsummary.v1";
  j["config"] = config.ToJson();
  j["learner"] = report.learner_name;
  j["axis"] = report.axis;
  Json rows = Json::array();
  for (const SweepRow& r : report.rows) {
    Json row;
    row["value"] = r.value;
    row["trials"] = r.trials;
    row["failures"] = r.failures;
    row["failureFraction"] = r.failure_fraction;
    row["meanErr"] = r.mean_err;
    row["meanLabeledUsed"] = r.mean_labeled_used;
    if (r.bound.has_value()) row["bound"] = *r.bound;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["timingMs"] = report.wall_ms;
  return j;
}

std::string RenderSummary(const ExperimentReport& report) {
  std::ostringstream os;
  const auto line = [&](const char* label, const std::string& value) {
    os << std::left << std::setw(22) << label << value << '\n';
  };
  line("learner", report.learner_name);
  line("declared epsilon", FormatDouble(report.declared.epsilon));
  line("declared delta", FormatDouble(report.declared.delta));
  line("trials", std::to_string(report.rows.size()));
  line("failures", std::to_string(report.failures));
  line("failure fraction", FormatDouble(report.failure_fraction));
  line("mean err", FormatDouble(report.mean_err));
  line("mean labeled used", FormatDouble(report.mean_labeled_used));
  line("mean unlabeled used", FormatDouble(report.mean_unlabeled_used));
  line("error threshold", FormatDouble(report.error_threshold));
  line("wall ms", FormatDouble(report.wall_ms));
  return os.str();
}

std::string RenderSweepSummary(const SweepReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(12) << report.axis << std::setw(8) << "trials"
     << std::setw(10) << "failures" << std::setw(12) << "fail_frac"
     << std::setw(14) << "mean_err" << std::setw(16) << "mean_labeled"
     << "bound" << '\n';
  for (const SweepRow& r : report.rows) {
    os << std::left << std::setw(12) << FormatDouble(r.value) << std::setw(8)
       << r.trials << std::setw(10) << r.failures << std::setw(12)
       << FormatDouble(r.failure_fraction) << std::setw(14)
       << FormatDouble(r.mean_err) << std::setw(16)
       << FormatDouble(r.mean_labeled_used)
       << (r.bound.has_value() ? FormatDouble(*r.bound) : std::string("-"))
       << '\n';
  }
  return os.str();
}

namespace {

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open output file: " + path.string());
  }
  out << text;
}

}  // namespace

int RunCli(int argc, const char* const* argv) {
  CLI::App app{"private semi-supervised learning experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed_override = -1;
  std::int64_t trials_override = -1;
  unsigned threads = 1;
  bool print_summary = false;

  const auto add_common = [&](CLI::App* sub, bool with_threads) {
    sub->add_option("config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed_override, "override rootSeed");
    sub->add_option("--trials", trials_override, "override trial count");
    sub->add_option("--out-dir", out_dir, "output directory (default .)");
    if (with_threads) {
      sub->add_option("--threads", threads, "worker threads (default 1)")
          ->check(CLI::PositiveNumber);
    }
    sub->add_flag("--summary", print_summary, "print an aligned text table");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run seeded trials");
  add_common(run_cmd, true);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run a sweep over one axis");
  add_common(sweep_cmd, true);
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "estimate epsilon on a neighbor pair");
  add_common(audit_cmd, false);
  CLI::App* vc_cmd =
      app.add_subcommand("vc", "report a concept class's dimensions");
  vc_cmd->add_option("spec", config_path, "concept class spec JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::filesystem::path dir(out_dir);
    if (run_cmd->parsed()) {
      ExperimentConfig config = ExperimentConfig::FromJsonFile(config_path);
      if (seed_override >= 0) {
        config.root_seed = static_cast<std::uint64_t>(seed_override);
      }
      if (trials_override >= 0) {
        config.trials = static_cast<std::uint64_t>(trials_override);
        if (config.trials < 1) throw ConfigError("trials must be at least 1");
      }
      const ExperimentReport report = RunExperiment(config, threads);
      std::filesystem::create_directories(dir);
      std::ostringstream csv;
      WriteTrialsCsv(csv, report.rows);
      WriteFile(dir / "trials.csv", csv.str());
      WriteFile(dir / "summary.json", SummaryJson(config, report).dump(2) + "\n");
      if (print_summary) std::cout << RenderSummary(report);
      std::cout << "wrote " << (dir / "trials.csv").string() << " and "
                << (dir / "summary.json").string() << '\n';
    } else if (sweep_cmd->parsed()) {
      ExperimentConfig config = ExperimentConfig::FromJsonFile(config_path);
      if (seed_override >= 0) {
        config.root_seed = static_cast<std::uint64_t>(seed_override);
      }
      if (trials_override >= 0) {
        config.trials = static_cast<std::uint64_t>(trials_override);
        if (config.trials < 1) throw ConfigError("trials must be at least 1");
      }
      const SweepReport report = RunSweep(config, threads);
      std::filesystem::create_directories(dir);
      std::ostringstream csv;
      WriteSweepCsv(csv, report.rows);
      WriteFile(dir / "sweep.csv", csv.str());
      WriteFile(dir / "summary.json",
                SweepSummaryJson(config, report).dump(2) + "\n");
      if (print_summary) std::cout << RenderSweepSummary(report);
      std::cout << "wrote " << (dir / "sweep.csv").string() << " and "
                << (dir / "summary.json").string() << '\n';
    } else if (audit_cmd->parsed()) {
      AuditConfig config = AuditConfig::FromJsonFile(config_path);
      if (seed_override >= 0) {
        config.root_seed = static_cast<std::uint64_t>(seed_override);
      }
      if (trials_override >= 0) {
        config.trials = static_cast<std::uint64_t>(trials_override);
      }
      const AuditReport report = RunAudit(config);
      std::filesystem::create_directories(dir);
      std::ostringstream csv;
      WriteAuditCsv(csv, report);
      WriteFile(dir / "audit.csv", csv.str());
      WriteFile(dir / "audit.json", AuditReportJson(report).dump(2) + "\n");
      if (print_summary) {
        std::cout << "mechanism           " << report.mechanism << '\n'
                  << "epsilon hat         " << FormatDouble(report.epsilon_hat)
                  << '\n'
                  << "distinct outcomes   " << report.distinct_outcomes
                  << '\n';
      }
      std::cout << "wrote " << (dir / "audit.csv").string() << " and "
                << (dir / "audit.json").string() << '\n';
    } else {
      const Json j = LoadJsonFile(config_path);
      const ConceptClassSpec spec = ConceptClassSpec::FromJson(
          j.contains("conceptClass") ? j.at("conceptClass") : j);
      const ConceptClass cls = spec.Build();
      const ConceptClass xor_cls = ConceptClass::Disagreements(cls);
      Json out;
      out["class"] = cls.Describe();
      out["domainCardinality"] = cls.domain().cardinality();
      out["size"] = cls.size();
      out["vc"] = VcDimension(cls);
      out["disagreementSize"] = xor_cls.size();
      out["disagreementVc"] = VcDimension(xor_cls);
      std::cout << out.dump(2) << '\n';
    }
    return 0;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace pssl
