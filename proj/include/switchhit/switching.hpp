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
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "switchhit/dataset.hpp"
#include "switchhit/matchers.hpp"
#include "switchhit/stats.hpp"

namespace switchhit {

struct SwitchConfig {
  std::vector<std::string> combination;  // first entry is the primary
  double threshold = 0.5;
  std::optional<std::size_t> max_attempts;  // defaults to combination size

  std::size_t attempt_limit() const noexcept;
  /// Throws Error(kConfig) on an empty or duplicated combination, or a
  /// threshold outside [0,1].
  void validate() const;
};

/// Posterior P(M|Z) = P(M)P(Z|M) / (P(M)P(Z|M) + P(MM)P(Z|MM)).
double posterior(const TechniqueProfile& profile, std::size_t bin);

/// Complementarity of A with B at the query's bin:
/// P(Z|M_A) P(Z|M_B) / (P(Z|MM_A) P(Z|MM_B)).
struct ComplementarityScore {
  std::string from;  // A
  std::string to;    // B
  double value = 0.0;

  friend bool operator==(const ComplementarityScore&,
                         const ComplementarityScore&) = default;
};

ComplementarityScore complementarity(const TechniqueProfile& a,
                                     const TechniqueProfile& b, std::size_t bin);

struct Attempt {
  std::string technique;
  MatchCandidate candidate;
  std::size_t bin = 0;
  double posterior = 0.0;
  /// Untried techniques ranked best-first, filled only when this attempt
  /// fell below the threshold and alternatives remained.
  std::vector<ComplementarityScore> ranking;

  friend bool operator==(const Attempt&, const Attempt&) = default;
};

enum class AcceptanceMode { kThresholdPass, kMaxPosteriorFallback };
const char* acceptance_mode_name(AcceptanceMode mode) noexcept;
AcceptanceMode parse_acceptance_mode(const std::string& name);

struct SwitchTrace {
  std::size_t query_index = 0;
  std::vector<Attempt> attempts;
  std::size_t accepted_attempt = 0;  // index into attempts
  AcceptanceMode mode = AcceptanceMode::kThresholdPass;

  const Attempt& accepted() const { return attempts.at(accepted_attempt); }
  const std::string& accepted_technique() const { return accepted().technique; }
  const MatchCandidate& accepted_candidate() const { return accepted().candidate; }

  friend bool operator==(const SwitchTrace&, const SwitchTrace&) = default;
};

using ProfileMap = std::map<std::string, TechniqueProfile>;
using TechniqueMap = std::map<std::string, std::shared_ptr<const Technique>>;

/// Runs the switching cascade for one query:
///  1. run the current technique, bin its score, compute its posterior;
///  2. accept if posterior >= threshold;
///  3. otherwise rank untried techniques by complementarity with the one that
///     just failed, at its bin, and switch to the best (ties: combination
///     order);
///  4. stop after attempt_limit() attempts and accept the highest-posterior
///     attempt (ties: earliest).
/// Throws Error(kConfig) when a configured technique lacks a profile or index.
SwitchTrace run_query(std::size_t query_index, const GrayImage& query,
                      const SwitchConfig& config, const ProfileMap& profiles,
                      const TechniqueMap& techniques);

/// One trace per query, in manifest order.
std::vector<SwitchTrace> run_dataset(const DatasetManifest& manifest,
                                     const SwitchConfig& config,
                                     const ProfileMap& profiles,
                                     const TechniqueMap& techniques);

/// CSV header, exact column order.
inline constexpr const char* kTraceCsvHeader =
    "query_index,attempt_ordinal,technique,score,bin,posterior,accepted,acceptance_mode";

/// One row per attempt; attempt_ordinal starts at 1.
void write_trace_csv(std::ostream& out, const std::vector<SwitchTrace>& traces);

/// Row of a parsed trace CSV. The complementarity rankings and reference
/// indices are not part of the file format.
struct TraceRow {
  std::size_t query_index = 0;
  std::size_t attempt_ordinal = 0;
  std::string technique;
  double score = 0.0;
  std::size_t bin = 0;
  double posterior = 0.0;
  bool accepted = false;
  AcceptanceMode mode = AcceptanceMode::kThresholdPass;
};

/// Summary of one query's rows.
struct TraceSummary {
  std::size_t query_index = 0;
  std::vector<TraceRow> rows;
  const TraceRow& accepted() const;
};

/// Parses and groups rows per query. Throws Error(kParse) on malformed rows
/// and Error(kSchema) on a wrong header or inconsistent grouping.
std::vector<TraceSummary> read_trace_csv(std::istream& in);

}  // namespace switchhit
