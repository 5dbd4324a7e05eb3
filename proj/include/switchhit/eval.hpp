// Copyright 2026 The SwitchHit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "switchhit/dataset.hpp"
#include "switchhit/matchers.hpp"
#include "switchhit/switching.hpp"

namespace switchhit {

/// |retrieved - gt| <= tolerance.
bool is_correct(const MatchCandidate& candidate, std::size_t gt_index,
                std::size_t tolerance) noexcept;

struct PRPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;

  friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

struct ScoredLabel {
  double confidence = 0.0;
  bool correct = false;
};

/// Sweeps every distinct confidence plus the sentinels 0 and 1. At cutoff t
/// the accepted set is {confidence >= t}; precision is 1 when nothing is
/// accepted. Points come out in decreasing-threshold order.
std::vector<PRPoint> pr_curve(std::span<const ScoredLabel> results);

/// Trapezoidal area under precision over recall, from recall 0 to the
/// curve's maximum recall. If the curve does not reach recall 0 its first
/// precision is held constant down to 0. Throws Error(kInvalidArgument) with
/// fewer than two distinct points.
double auc(std::span<const PRPoint> curve);

struct CurveSummary {
  std::string name;
  std::size_t correct = 0;
  std::vector<PRPoint> curve;
  double auc = 0.0;
};

struct EvalReport {
  std::size_t n_queries = 0;
  double threshold = 0.0;
  std::vector<CurveSummary> techniques;  // combination order
  CurveSummary switchhit;
  std::vector<std::string> switch_pattern;          // accepted technique per query
  std::map<std::size_t, std::size_t> attempts_histogram;  // attempts -> queries
  std::map<std::string, std::size_t> accepted_by;
};

using TechniqueResults = std::map<std::string, std::vector<MatchCandidate>>;

/// Runs every technique on every query of the manifest.
TechniqueResults run_all(const DatasetManifest& manifest,
                         const std::vector<std::string>& combination,
                         const TechniqueMap& techniques);

/// Individual curves use the raw matching score as confidence; the
/// switching curve uses the accepted attempt's posterior. Throws
/// Error(kDataset) on inconsistent query counts.
EvalReport build_report(const std::vector<SwitchTrace>& traces,
                        const std::vector<std::string>& combination,
                        const TechniqueResults& results,
                        const DatasetManifest& manifest, double threshold);

/// Rebuilds traces from a parsed CSV by taking each attempt's reference
/// index from `results`. Throws Error(kDataset) when the counts disagree
/// ("trace/query count mismatch") or an attempt's score does not match.
std::vector<SwitchTrace> reconstruct_traces(const std::vector<TraceSummary>& summaries,
                                            const TechniqueResults& results,
                                            std::size_t n_queries);

/// report.json, pr_<name>.csv for each curve, switch_pattern.csv.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

std::string report_to_json(const EvalReport& report);

}  // namespace switchhit
