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

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "switchhit/matchers.hpp"

namespace switchhit {

inline constexpr std::size_t kBinCount = 10;

/// Score bin: [b/10, (b+1)/10) for b < 9, and [0.9, 1.0] for the top bin.
/// Throws Error(kInvalidArgument) for scores outside [0,1] (or NaN).
std::size_t bin_of(double score);

struct BinCounts {
  std::size_t matches = 0;     // W
  std::size_t mismatches = 0;  // Y
  std::size_t total = 0;       // X = W + Y

  friend bool operator==(const BinCounts&, const BinCounts&) = default;
};

struct BinLikelihood {
  double match = 0.5;     // P(Z|M), read as the within-bin correct rate
  double mismatch = 0.5;  // P(Z|MM)

  friend bool operator==(const BinLikelihood&, const BinLikelihood&) = default;
};

/// Trained statistics for one technique: add-one smoothed priors and
/// per-bin likelihoods plus the raw counts they came from.
struct TechniqueProfile {
  std::string technique;
  double prior_match = 0.5;     // P(M)
  double prior_mismatch = 0.5;  // P(MM)
  std::array<BinLikelihood, kBinCount> likelihood{};
  std::array<BinCounts, kBinCount> counts{};
  std::size_t training_size = 0;

  /// Throws Error(kSchema) naming the first violated invariant.
  void validate() const;

  friend bool operator==(const TechniqueProfile&, const TechniqueProfile&) = default;
};

struct ScoredOutcome {
  MatchCandidate candidate;
  bool correct = false;
};

/// P(M) = (correct + 1) / (N + 2), P(MM) = (incorrect + 1) / (N + 2);
/// per bin P(Z|M) = (W + 1) / (X + 2), P(Z|MM) = (Y + 1) / (X + 2).
/// Throws Error(kInvalidArgument) on an empty result list.
TechniqueProfile train_profile(const std::string& technique,
                               std::span<const ScoredOutcome> results);

/// JSON with 17 significant digits per probability.
std::string profile_to_json(const TechniqueProfile& profile);
TechniqueProfile profile_from_json(const std::string& text);

void save_profile(const TechniqueProfile& profile, const std::filesystem::path& path);
TechniqueProfile load_profile(const std::filesystem::path& path);

}  // namespace switchhit
