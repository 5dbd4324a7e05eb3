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

#include "switchhit/matchers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "switchhit/error.hpp"

namespace switchhit {

namespace {
constexpr double kTieEpsilon = 1e-12;
constexpr double kVarianceFloor = 1e-20;
}  // namespace

MatcherVariant parse_matcher_variant(const std::string& name) {
  if (name == "tiny-image") return MatcherVariant::kTinyImage;
  if (name == "hog") return MatcherVariant::kHog;
  if (name == "histogram") return MatcherVariant::kHistogram;
  throw Error(ErrorCode::kConfig, "unknown matcher variant: " + name);
}

const char* matcher_variant_name(MatcherVariant variant) noexcept {
  switch (variant) {
    case MatcherVariant::kTinyImage: return "tiny-image";
    case MatcherVariant::kHog: return "hog";
    case MatcherVariant::kHistogram: return "histogram";
  }
  return "tiny-image";
}

void MatcherConfig::validate() const {
  if (variant == MatcherVariant::kTinyImage && tiny_side < 2) {
    throw Error(ErrorCode::kConfig, "tiny-image side must be >= 2");
  }
  if (variant == MatcherVariant::kHistogram && histogram_bins < 2) {
    throw Error(ErrorCode::kConfig, "histogram bins must be >= 2");
  }
}

std::size_t hog_descriptor_length() noexcept {
  constexpr std::size_t cells = kHogImageSide / kHogCellSide;
  constexpr std::size_t blocks = cells - kHogBlockCells + 1;
  return blocks * blocks * kHogBlockCells * kHogBlockCells * kHogBins;
}

std::vector<double> tiny_image_descriptor(const GrayImage& image, std::size_t side) {
  if (side == 0 || image.width() < side || image.height() < side) {
    throw Error(ErrorCode::kDataset, "image too small for a " + std::to_string(side) + "x" +
                                         std::to_string(side) + " tiny image");
  }
  const std::size_t w = image.width(), h = image.height();
  std::vector<double> out(side * side);
  for (std::size_t cy = 0; cy < side; ++cy) {
    const std::size_t y0 = cy * h / side, y1 = (cy + 1) * h / side;
    for (std::size_t cx = 0; cx < side; ++cx) {
      const std::size_t x0 = cx * w / side, x1 = (cx + 1) * w / side;
      double acc = 0.0;
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) acc += image.at(x, y);
      }
      out[cy * side + cx] = acc / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

std::vector<double> hog_descriptor(const GrayImage& image) {
  if (image.width() < kHogCellSide || image.height() < kHogCellSide) {
    throw Error(ErrorCode::kDataset, "image too small for HOG (minimum 8x8)");
  }
  const GrayImage img = (image.width() == kHogImageSide && image.height() == kHogImageSide)
                            ? image
                            : resample_bilinear(image, kHogImageSide, kHogImageSide);
  constexpr std::size_t n = kHogImageSide;
  constexpr std::size_t cells = n / kHogCellSide;
  constexpr double bin_width = M_PI / kHogBins;

  std::vector<double> cell_hist(cells * cells * kHogBins, 0.0);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double gx = img.at(std::min(x + 1, n - 1), y) - img.at(x == 0 ? 0 : x - 1, y);
      const double gy = img.at(x, std::min(y + 1, n - 1)) - img.at(x, y == 0 ? 0 : y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double theta = std::atan2(gy, gx);
      if (theta < 0) theta += M_PI;
      if (theta >= M_PI) theta -= M_PI;
      // Linear vote between the two nearest bin centers (wrapping at pi).
      const double pos = theta / bin_width - 0.5;
      const double lower = std::floor(pos);
      const double frac = pos - lower;
      const auto b0 = static_cast<std::size_t>((static_cast<long>(lower) + kHogBins) % kHogBins);
      const std::size_t b1 = (b0 + 1) % kHogBins;
      double* hist = &cell_hist[((y / kHogCellSide) * cells + x / kHogCellSide) * kHogBins];
      hist[b0] += mag * (1.0 - frac);
      hist[b1] += mag * frac;
    }
  }

  constexpr std::size_t blocks = cells - kHogBlockCells + 1;
  constexpr std::size_t block_len = kHogBlockCells * kHogBlockCells * kHogBins;
  std::vector<double> out;
  out.reserve(hog_descriptor_length());
  std::vector<double> block(block_len);
  for (std::size_t by = 0; by < blocks; ++by) {
    for (std::size_t bx = 0; bx < blocks; ++bx) {
      auto it = block.begin();
      for (std::size_t cy = by; cy < by + kHogBlockCells; ++cy) {
        for (std::size_t cx = bx; cx < bx + kHogBlockCells; ++cx) {
          const double* hist = &cell_hist[(cy * cells + cx) * kHogBins];
          it = std::copy(hist, hist + kHogBins, it);
        }
      }
      const double norm2 = std::inner_product(block.begin(), block.end(), block.begin(), 0.0);
      const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2 + 1e-12) : 0.0;
      for (double v : block) out.push_back(v * scale);
    }
  }
  return out;
}

std::vector<double> luminance_histogram(const GrayImage& image, std::size_t bins) {
  if (bins == 0 || image.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "histogram needs bins and pixels");
  }
  std::vector<double> hist(bins, 0.0);
  for (double p : image.pixels()) {
    const auto b = std::min(static_cast<std::size_t>(p * static_cast<double>(bins)), bins - 1);
    hist[b] += 1.0;
  }
  const double total = static_cast<double>(image.pixels().size());
  for (double& h : hist) h /= total;
  return hist;
}

double pearson_score(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor length mismatch");
  }
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va <= kVarianceFloor || vb <= kVarianceFloor) return 0.5;
  const double r = cov / std::sqrt(va * vb);
  return std::clamp((1.0 + r) / 2.0, 0.0, 1.0);
}

double cosine_score(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor length mismatch");
  }
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  const double na = std::inner_product(a.begin(), a.end(), a.begin(), 0.0);
  const double nb = std::inner_product(b.begin(), b.end(), b.begin(), 0.0);
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

double histogram_intersection(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "histogram length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::min(a[i], b[i]);
  return std::clamp(acc, 0.0, 1.0);
}

MatcherIndex::MatcherIndex(const MatcherConfig& config, std::span<const ImagePtr> references)
    : config_(config) {
  config_.validate();
  if (references.empty()) throw Error(ErrorCode::kInvalidArgument, "empty reference list");
  descriptors_.reserve(references.size());
  for (const auto& ref : references) {
    if (!ref) throw Error(ErrorCode::kInvalidArgument, "null reference image");
    descriptors_.push_back(describe(*ref));
  }
}

std::vector<double> MatcherIndex::describe(const GrayImage& image) const {
  switch (config_.variant) {
    case MatcherVariant::kTinyImage: return tiny_image_descriptor(image, config_.tiny_side);
    case MatcherVariant::kHog: return hog_descriptor(image);
    case MatcherVariant::kHistogram: return luminance_histogram(image, config_.histogram_bins);
  }
  throw Error(ErrorCode::kInternal, "unhandled matcher variant");
}

double MatcherIndex::similarity(std::span<const double> reference,
                                std::span<const double> query) const {
  switch (config_.variant) {
    case MatcherVariant::kTinyImage: return pearson_score(reference, query);
    case MatcherVariant::kHog: return cosine_score(reference, query);
    case MatcherVariant::kHistogram: return histogram_intersection(reference, query);
  }
  throw Error(ErrorCode::kInternal, "unhandled matcher variant");
}

MatchCandidate MatcherIndex::best_match(const GrayImage& query) const {
  const std::vector<double> q = describe(query);
  MatchCandidate best{0, similarity(descriptors_[0], q)};
  for (std::size_t i = 1; i < descriptors_.size(); ++i) {
    const double s = similarity(descriptors_[i], q);
    if (s > best.score + kTieEpsilon) best = {i, s};
  }
  best.score = std::clamp(best.score, 0.0, 1.0);
  return best;
}

MatcherIndex index_references(const MatcherConfig& config,
                              std::span<const ImagePtr> references) {
  return MatcherIndex(config, references);
}

}  // namespace switchhit
