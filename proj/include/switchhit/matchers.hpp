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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "switchhit/dataset.hpp"
#include "switchhit/image.hpp"

namespace switchhit {

/// A technique's answer for one query.
struct MatchCandidate {
  std::size_t reference_index = 0;
  double score = 0.0;  // in [0,1]

  friend bool operator==(const MatchCandidate&, const MatchCandidate&) = default;
};

enum class MatcherVariant { kTinyImage, kHog, kHistogram };

MatcherVariant parse_matcher_variant(const std::string& name);
const char* matcher_variant_name(MatcherVariant variant) noexcept;

struct MatcherConfig {
  MatcherVariant variant = MatcherVariant::kTinyImage;
  std::size_t tiny_side = 8;        // tiny-image: output side S, >= 2
  std::size_t histogram_bins = 32;  // histogram: bin count, >= 2

  /// Throws Error(kConfig) for out-of-range parameters.
  void validate() const;
};

// HOG geometry: 64x64 resample, 8x8 cells, 9 unsigned bins, 2x2-cell blocks
// with unit stride.
inline constexpr std::size_t kHogImageSide = 64;
inline constexpr std::size_t kHogCellSide = 8;
inline constexpr std::size_t kHogBins = 9;
inline constexpr std::size_t kHogBlockCells = 2;
std::size_t hog_descriptor_length() noexcept;

/// Box-filter downsample to side x side. Throws Error(kDataset) if the image
/// is smaller than side in either dimension.
std::vector<double> tiny_image_descriptor(const GrayImage& image, std::size_t side);

/// Concatenated L2-normalized block histograms, hog_descriptor_length() long.
std::vector<double> hog_descriptor(const GrayImage& image);

/// Luminance histogram normalized to sum 1.
std::vector<double> luminance_histogram(const GrayImage& image, std::size_t bins);

/// (1 + r) / 2 for Pearson correlation r; 0.5 if either side has zero variance.
double pearson_score(std::span<const double> a, std::span<const double> b);
/// Cosine similarity clamped to [0,1]; 0 if either side has zero norm.
double cosine_score(std::span<const double> a, std::span<const double> b);
/// Sum of per-bin minima.
double histogram_intersection(std::span<const double> a, std::span<const double> b);

/// Anything that can answer "which reference does this query show, and how
/// sure is the raw similarity". Implementations must be safe to call
/// concurrently.
class Technique {
 public:
  virtual ~Technique() = default;
  virtual MatchCandidate best_match(const GrayImage& query) const = 0;
  virtual std::size_t reference_count() const = 0;
};

/// Precomputed reference descriptors for one matcher variant. Immutable.
class MatcherIndex final : public Technique {
 public:
  MatcherIndex(const MatcherConfig& config, std::span<const ImagePtr> references);

  MatchCandidate best_match(const GrayImage& query) const override;
  std::size_t reference_count() const override { return descriptors_.size(); }

  const MatcherConfig& config() const noexcept { return config_; }
  /// Raw (unprepared) descriptor of reference `i`.
  std::span<const double> descriptor(std::size_t i) const { return descriptors_.at(i); }
  std::size_t descriptor_length() const noexcept {
    return descriptors_.empty() ? 0 : descriptors_.front().size();
  }

  std::vector<double> describe(const GrayImage& image) const;
  double similarity(std::span<const double> reference,
                    std::span<const double> query) const;

 private:
  MatcherConfig config_;
  std::vector<std::vector<double>> descriptors_;
};

/// Throws Error(kInvalidArgument) on an empty reference list.
MatcherIndex index_references(const MatcherConfig& config,
                              std::span<const ImagePtr> references);

inline MatchCandidate best_match(const Technique& index, const GrayImage& query) {
  return index.best_match(query);
}

}  // namespace switchhit
