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
// Batch experiment runner: seeded trial loops, sweep curves, audit runs,
// and the CLI entry point. Everything is deterministic given the root
// seed; wall-clock timings appear only in the JSON summaries, never in
// CSV rows.

#ifndef PSSL_HARNESS_H_
#define PSSL_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pssl/serialization.h"

namespace pssl {

struct ExperimentReport {
  std::vector<TrialRow> rows;
  std::uint64_t failures = 0;
  double failure_fraction = 0;
  double mean_err = 0;
  double mean_labeled_used = 0;
  double mean_unlabeled_used = 0;
  PrivacyParams declared;
  std::string learner_name;
  double error_threshold = 0;
  double wall_ms = 0;
};

// Runs config.trials seeded trials. Trial t uses seed
// DeriveSeed(rootSeed, t) regardless of thread count, so reports are
// byte-identical across reruns and thread settings. Resource errors from
// module code propagate with the trial index attached.
ExperimentReport RunExperiment(const ExperimentConfig& config,
                               unsigned threads = 1);

struct SweepReport {
  std::string axis;
  std::vector<SweepRow> rows;
  std::string learner_name;
  double wall_ms = 0;
};

// One RunExperiment per sweep value; the bound column carries the
// closed-form selection tail bound when the learner is a plain private
// selection, and stays empty otherwise.
SweepReport RunSweep(const ExperimentConfig& config, unsigned threads = 1);

AuditReport RunAudit(const AuditConfig& config);

Json SummaryJson(const ExperimentConfig& config, const ExperimentReport& report);
Json SweepSummaryJson(const ExperimentConfig& config, const SweepReport& report);

// Aligned text tables for --summary.
std::string RenderSummary(const ExperimentReport& report);
std::string RenderSweepSummary(const SweepReport& report);

// Full CLI: `pssl run|sweep|audit|vc ...`. Returns the process exit code:
// 0 success, 2 configuration error, 3 resource error.
int RunCli(int argc, const char* const* argv);

}  // namespace pssl

#endif  // PSSL_HARNESS_H_
